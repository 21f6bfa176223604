import random
from fractions import Fraction

import pytest

from outerbilliard.operators import (
    apply_field,
    check_h_scaling,
    check_vh_equals_w,
    epsilon_expansion,
    h_operator,
    symplectic_gradient,
    w_operator,
)
from outerbilliard.polycore import Poly, parse_poly as P, random_poly, reduce_mod


def brute_force_expansion(F, K):
    """Oracle: substitute x + e*F_y, y - e*F_x with e as a third variable and
    collect powers of e (independent of the closed-form coefficients)."""
    lift = lambda p: Poly({(i, j, 0): c for (i, j), c in p.items()}, 3)
    x, y, e = (Poly.variable(i, 3) for i in range(3))
    Fy, Fx = lift(F.diff(1)), lift(F.diff(0))
    sub = lift(F).compose([x + e * Fy, y - e * Fx, e])
    coeffs = [{} for _ in range(K + 1)]
    for (i, j, k), c in sub.items():
        if k <= K:
            coeffs[k][(i, j)] = c
    return [Poly(c) for c in coeffs]


def test_symplectic_gradient_examples():
    v = symplectic_gradient(P("x^2+y^2-1"))
    assert (v.dx_component, v.dy_component) == (P("2*y"), P("-2*x"))
    v = symplectic_gradient(P("x*y"))
    assert (v.dx_component, v.dy_component) == (P("x"), P("-y"))


def test_field_is_tangent_to_level_sets():
    rng = random.Random(1)
    for _ in range(50):
        F = random_poly(rng, 4)
        assert apply_field(symplectic_gradient(F), F).is_zero()


def test_field_kills_constants():
    assert apply_field(symplectic_gradient(P("x^3+y^2")), Poly.constant(5)).is_zero()


def test_h_examples():
    assert h_operator(P("x^2+y^2-1")) == P("8*x^2+8*y^2")
    assert h_operator(P("x^3+y^2")) == P("18*x^4+24*x*y^2")
    assert h_operator(P("x")).is_zero()


@pytest.mark.parametrize("a,b", [(1, 1), (2, 1), (3, 2), (5, 1)])
def test_h_constant_on_ellipse(a, b):
    f = P(f"x^2/{a * a} + y^2/{b * b} - 1")
    assert reduce_mod(h_operator(f), f) == Poly.constant(Fraction(8, a * a * b * b))


def test_w_examples():
    assert w_operator(P("x^2+y^2-1")).is_zero()
    assert w_operator(P("x^4+y^4-1")) == P("1536*x*y^9 - 1536*x^9*y")
    assert w_operator(P("x^3+y^2")) == P("48*y^3")


def test_w_vanishes_for_quadratics():
    rng = random.Random(2)
    for _ in range(50):
        assert w_operator(random_poly(rng, 2)).is_zero()


def test_vh_equals_w_examples():
    F = P("x^3+y^2")
    assert apply_field(symplectic_gradient(F), h_operator(F)) == P("48*y^3") == w_operator(F)
    assert check_vh_equals_w(P("x^2+y^2-1"))


def test_vh_equals_w_random():
    rng = random.Random(3)
    for _ in range(100):
        assert check_vh_equals_w(random_poly(rng, 4))


def test_scaling_examples():
    f = P("x^2+y^2-1")
    assert check_h_scaling(f, Poly.constant(1))
    assert check_h_scaling(f, P("x"))


def test_scaling_random():
    rng = random.Random(4)
    for _ in range(50):
        f = random_poly(rng, 3)
        if f.is_zero():
            continue
        assert check_h_scaling(f, random_poly(rng, 3))


def test_h_is_cubic_under_scalar_scaling():
    rng = random.Random(5)
    for _ in range(30):
        F = random_poly(rng, 4)
        lam = Fraction(rng.randint(1, 5), rng.randint(1, 4))
        assert h_operator(lam * F) == lam ** 3 * h_operator(F)


def test_expansion_matches_brute_force_substitution():
    rng = random.Random(6)
    for _ in range(20):
        F = random_poly(rng, 3)
        exp = epsilon_expansion(F, 5)
        assert list(exp.coefficients) == brute_force_expansion(F, 5)


def test_expansion_links_to_h_and_w():
    rng = random.Random(7)
    for _ in range(30):
        F = random_poly(rng, 4)
        exp = epsilon_expansion(F, 3)
        assert exp[0] == F
        assert exp[1].is_zero()
        assert 2 * exp[2] == h_operator(F)
        assert 6 * exp[3] == w_operator(F)


def test_circle_expansion():
    exp = epsilon_expansion(P("x^2+y^2-1"), 5)
    assert exp.order == 5
    assert exp[2] == P("4*x^2+4*y^2")
    assert all(c.is_zero() for c in exp.coefficients[3:])


def test_quadratic_odd_coefficients_vanish():
    rng = random.Random(8)
    for _ in range(30):
        exp = epsilon_expansion(random_poly(rng, 2), 9)
        assert all(c.is_zero() for _, c in exp.odd())


def test_expansion_order_validated():
    with pytest.raises(ValueError):
        epsilon_expansion(P("x"), 2)
