import random
from fractions import Fraction

import numpy as np
import pytest

from outerbilliard.errors import ConvergenceFailure, DegenerateInput, DivisorZero, ParseError, ZeroPolynomial
from outerbilliard.polycore import (
    Poly,
    X,
    Y,
    dehomogenize,
    divmod_poly,
    exact_divide,
    homogenize,
    parse_poly,
    random_poly,
    reduce_mod,
    resultant,
    sylvester_matrix,
)
from outerbilliard.roots import complex_roots, squarefree_parts


def P(text, variables=("x", "y")):
    return parse_poly(text, variables)


# -- parsing ------------------------------------------------------------------


def test_parse_circle():
    assert P("x^2 + y^2 - 1").terms == {(2, 0): 1, (0, 2): 1, (0, 0): -1}


def test_parse_zero():
    assert P("0").is_zero()
    assert P("0").degree == -1


def test_parse_rational_coefficients():
    assert P("x*y^3/2 - 3/4").terms == {(1, 3): Fraction(1, 2), (0, 0): Fraction(-3, 4)}


def test_parse_accepts_star_star_and_parentheses():
    assert P("(x+y)**2") == X ** 2 + 2 * X * Y + Y ** 2


def test_parse_coefficient_without_star():
    assert P("2x - 3/4y^2") == P("2*x - 3/4*y^2")


@pytest.mark.parametrize("bad", ["x^^", "x +", "x2", "x^-1", "x/y", "x/0", "z", "(x", ""])
def test_parse_errors_report_position(bad):
    with pytest.raises(ParseError) as info:
        P(bad)
    assert info.value.position >= 0


def test_to_string_round_trip():
    rng = random.Random(3)
    for _ in range(100):
        p = random_poly(rng, 4)
        assert P(p.to_string()) == p


# -- ring arithmetic --------------------------------------------------------------


def test_small_identities():
    assert (X + (-X)).is_zero()
    assert (X + Y) * (X - Y) == X ** 2 - Y ** 2
    p = P("x^3 - 2/3*x*y + 5")
    assert p * 1 == p


def test_ring_axioms_random():
    rng = random.Random(11)
    for _ in range(500):
        p, q, r = (random_poly(rng, 3) for _ in range(3))
        assert (p + q) + r == p + (q + r)
        assert p + q == q + p
        assert (p * q) * r == p * (q * r)
        assert p * q == q * p
        assert p * (q + r) == p * q + p * r


def test_degree_is_additive_under_multiplication():
    rng = random.Random(5)
    for _ in range(100):
        p, q = random_poly(rng, 3), random_poly(rng, 3)
        if p.is_zero() or q.is_zero():
            continue
        assert (p * q).degree == p.degree + q.degree


# -- derivatives and evaluation ----------------------------------------------------


def test_derivative_examples():
    assert P("x^2+y^2-1").diff(0) == 2 * X
    assert P("x*y^3").diff(1) == 3 * X * Y ** 2
    assert P("7/3").diff(0).is_zero()


def test_mixed_partials_commute():
    rng = random.Random(8)
    for _ in range(200):
        p = random_poly(rng, 5)
        assert p.diff(0).diff(1) == p.diff(1).diff(0)


def test_leibniz_rule():
    rng = random.Random(9)
    for _ in range(50):
        p, q = random_poly(rng, 3), random_poly(rng, 3)
        assert (p * q).diff(0) == p.diff(0) * q + p * q.diff(0)


def test_evaluate_exact_and_complex():
    assert P("x^2+y^2-1").evaluate([1, 0]) == 0
    assert P("x*y").evaluate([1j, 1j]) == -1
    assert P("x^2/4 - y").evaluate([Fraction(1, 3), 2]) == Fraction(1, 36) - 2


def test_evaluate_on_quartic_curve_point():
    # second coordinate from an independent root solve of t^4 = 1 - 0.9^4
    roots = np.roots([1, 0, 0, 0, -(1 - 0.9 ** 4)])
    y = max(r.real for r in roots if abs(r.imag) < 1e-12)
    assert abs(y - (1 - 0.9 ** 4) ** 0.25) < 1e-12
    assert abs(y - 0.765787) < 1e-6
    assert abs(P("x^4+y^4-1").evaluate([0.9, y])) < 1e-12


def test_numeric_matches_exact():
    rng = random.Random(4)
    for _ in range(50):
        p = random_poly(rng, 4)
        pt = (rng.uniform(-2, 2), rng.uniform(-2, 2))
        exact = p.evaluate([Fraction(pt[0]), Fraction(pt[1])])
        assert abs(p.numeric()(*pt) - float(exact)) < 1e-9 * (1 + abs(float(exact)))


# -- homogenization ---------------------------------------------------------------------


XYZ = ("x", "y", "z")


def test_homogenize_examples():
    assert homogenize(P("x^2+y^2-1")) == P("x^2+y^2-z^2", XYZ)
    assert homogenize(P("x^3 + y")) == P("x^3 + y*z^2", XYZ)
    assert dehomogenize(P("x^2+y^2-z^2", XYZ)) == P("x^2+y^2-1")


def test_homogenize_zero_rejected():
    with pytest.raises(ZeroPolynomial):
        homogenize(Poly.zero())


def test_homogenize_round_trip():
    rng = random.Random(12)
    for _ in range(100):
        p = random_poly(rng, 4)
        if p.is_zero():
            continue
        H = homogenize(p)
        assert H.is_homogeneous() and H.degree == p.degree
        assert dehomogenize(H) == p


# -- division ------------------------------------------------------------------------------


CIRCLE = P("x^2+y^2-1")


def test_exact_divide_examples():
    assert exact_divide(CIRCLE * P("x+3"), CIRCLE) == P("x+3")
    assert exact_divide(X, CIRCLE) is None
    assert exact_divide(P("8*x^2+8*y^2-8"), CIRCLE) == Poly.constant(8)


def test_divide_by_zero_rejected():
    with pytest.raises(DivisorZero):
        divmod_poly(X, Poly.zero())


def test_division_identity_and_round_trip():
    rng = random.Random(13)
    for _ in range(200):
        f = random_poly(rng, 3)
        if f.degree < 1:
            continue
        p = random_poly(rng, 5)
        q, r = divmod_poly(p, f)
        assert q * f + r == p
        assert exact_divide(p * f, f) == p
        assert reduce_mod(p * f + r, f) == reduce_mod(r, f)


# -- resultants -------------------------------------------------------------------------------


def test_resultant_examples():
    assert resultant(P("y^2 - x"), P("y - 1")) == P("1 - x")
    assert resultant(CIRCLE, Y) == P("x^2 - 1")


def test_resultant_needs_positive_degree():
    with pytest.raises(DegenerateInput):
        resultant(X, P("y^2 - 1"))
    with pytest.raises(DegenerateInput):
        resultant(Poly.zero(), Y)


def test_sylvester_size():
    m = sylvester_matrix(P("y^3 + x"), P("y^2 - 1"), 1)
    assert len(m) == 5 and all(len(row) == 5 for row in m)


def test_resultant_vanishes_at_planted_common_root():
    # plant (a, b) as a common zero; Res_y then vanishes at x = a
    rng = random.Random(21)
    for _ in range(30):
        a, b = Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3))
        p = random_poly(rng, 2) * (Y - b) + random_poly(rng, 1) * (X - a)
        q = random_poly(rng, 2) * (Y - b) + random_poly(rng, 2) * (X - a)
        if p.degree_in(1) < 1 or q.degree_in(1) < 1:
            continue
        assert resultant(p, q).evaluate([a, 0]) == 0


def test_resultant_of_linear_factor_is_substitution():
    rng = random.Random(22)
    for _ in range(30):
        p = random_poly(rng, 3)
        if p.degree_in(1) < 1:
            continue
        c = Poly({(1, 0): rng.randint(-3, 3), (0, 0): rng.randint(-3, 3)})
        substituted = p.compose([X, c])
        res = resultant(p, Y - c)
        # Res_y(p, y - c) = (-1)^deg p(x, c)
        sign = (-1) ** p.degree_in(1)
        assert res == sign * substituted


# -- complex roots --------------------------------------------------------------------------------


def test_roots_examples():
    r = complex_roots([1, 0, 1])
    assert sorted((round(z.value.imag, 12), z.multiplicity) for z in r) == [(-1.0, 1), (1.0, 1)]
    r = complex_roots([1, -2, 1])
    assert len(r) == 1 and r.roots[0].multiplicity == 2 and abs(r.roots[0].value - 1) < 1e-12
    r = complex_roots([-1, 0, 0, 1])
    assert len(r) == 3 and all(z.multiplicity == 1 for z in r)
    for z in r:
        assert abs(z.value ** 3 - 1) < 1e-12


def test_roots_agree_with_numpy():
    rng = np.random.default_rng(1)
    for _ in range(50):
        deg = int(rng.integers(2, 9))
        coeffs = [Fraction(int(c)) for c in rng.integers(-9, 10, size=deg + 1)]
        if coeffs[-1] == 0:
            coeffs[-1] = Fraction(1)
        ref = np.roots([float(c) for c in reversed(coeffs)])
        # match every numpy root to one of ours (multiplicities expanded)
        expanded = [z.value for z in complex_roots(coeffs) for _ in range(z.multiplicity)]
        assert len(expanded) == len(ref)
        for z in ref:
            assert min(abs(z - w) for w in expanded) < 1e-5 * max(1, abs(z))


def test_root_multiplicities_are_exact():
    # (x - 1/2)^3 (x + 2)^2 (x^2 + 1)
    p = Poly({(1,): 1, (0,): Fraction(-1, 2)}, 1) ** 3 * Poly({(1,): 1, (0,): 2}, 1) ** 2 * Poly({(2,): 1, (0,): 1}, 1)
    r = complex_roots(p)
    mults = sorted(z.multiplicity for z in r)
    assert mults == [1, 1, 2, 3]
    assert r.total_multiplicity() == 7


def test_squarefree_parts():
    parts = squarefree_parts([Fraction(c) for c in (1, -2, 1)])
    assert parts == [([-1, 1], 2)]


def test_roots_of_constant_are_empty_and_zero_rejected():
    assert len(complex_roots([3])) == 0
    with pytest.raises((ValueError, ZeroPolynomial)):
        complex_roots([0, 0])


def test_convergence_failure_carries_partial():
    err = ConvergenceFailure("x", partial=[1])
    assert err.partial == [1]
