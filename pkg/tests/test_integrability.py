from fractions import Fraction

import numpy as np
import pytest

from outerbilliard.integrability import (
    Verdict,
    certify,
    evenness_defect,
    h_constant_on_curve,
    inflection_witness,
    verify_ideal_identity,
)
from outerbilliard.operators import h_operator
from outerbilliard.polycore import Poly, exact_divide, parse_poly as P

CIRCLE = P("x^2+y^2-1")
ELLIPSE = P("x^2/4+y^2-1")
QUARTIC = P("x^4+y^4-1")
ONE = Poly.constant(1)


def quartic_curve_points(n=16):
    # oracle: real points of x^4+y^4=1 from an independent 1-d root solve
    pts = []
    for x in np.linspace(-0.95, 0.95, n):
        y = (1 - x ** 4) ** 0.25
        pts += [(x, y), (x, -y)]
    return pts


def test_evenness_conics():
    for f in (CIRCLE, ELLIPSE):
        defects = evenness_defect(f, ONE, 5)
        assert [k for k, _ in defects] == [1, 3, 5]
        assert all(r.is_zero() for _, r in defects)


def test_evenness_quartic_defect():
    (k1, r1), (k3, r3) = evenness_defect(QUARTIC, ONE, 3)
    assert r1.is_zero()
    assert not r3.is_zero()
    # c_3 = 256 x y (y^8 - x^8) is not divisible by f
    c3 = P("256*x*y^9 - 256*x^9*y")
    assert exact_divide(c3, QUARTIC) is None
    # the residue agrees with c_3 on the curve
    rn, cn = r3.numeric(), c3.numeric()
    for x, y in quartic_curve_points():
        assert abs(rn(x, y) - cn(x, y)) < 1e-9
    assert max(abs(rn(x, y)) for x, y in quartic_curve_points()) > 1


def test_h_constants():
    assert h_constant_on_curve(CIRCLE, ONE) == 8
    assert h_constant_on_curve(ELLIPSE, ONE) == 2
    assert h_constant_on_curve(CIRCLE, P("x")) is None


def test_ideal_identity():
    assert verify_ideal_identity(CIRCLE, ONE, 8) == Poly.constant(8)
    h = verify_ideal_identity(ELLIPSE, ONE, 2)
    assert h is not None and ONE * h_operator(ELLIPSE) - 2 == h * ELLIPSE
    assert verify_ideal_identity(CIRCLE, ONE, 7) is None
    with pytest.raises(ValueError):
        verify_ideal_identity(CIRCLE, ONE, 0)


def test_witness():
    assert inflection_witness(CIRCLE) is None
    w = inflection_witness(P("x^3+y^3+1"))
    x, y = w.affine_point()
    assert abs(x) < 1e-8 and abs(y + 1) < 1e-8
    w = inflection_witness(QUARTIC)
    pt = list(w.affine_point())
    assert abs(QUARTIC.evaluate(pt)) < 1e-6
    assert abs(h_operator(QUARTIC).evaluate(pt)) < 1e-6


def test_certify_circle():
    r = certify(CIRCLE, ONE, 5)
    assert r.verdict is Verdict.CONIC_CONSISTENT
    assert r.constant_c == 8 and r.quotient_h == Poly.constant(8)


def test_certify_ellipse():
    r = certify(ELLIPSE, ONE, 7, interior=(0, 0))
    assert r.verdict is Verdict.CONIC_CONSISTENT
    assert r.constant_c == Fraction(2)
    assert h_operator(ELLIPSE) - 2 == r.quotient_h * ELLIPSE
    assert r.convexity == "verified"
    assert [s["stage"] for s in r.stages] == ["nonsingular", "cofactor", "evenness", "h_constant", "ideal"]


def test_certify_quartic_fails_evenness():
    r = certify(QUARTIC, ONE, 3)
    assert r.verdict is Verdict.EVENNESS_FAILS
    assert not dict(r.odd_defects)[3].is_zero()


def test_certify_invalid_inputs():
    assert certify(CIRCLE, CIRCLE).verdict is Verdict.INVALID_INPUT
    assert certify(CIRCLE, Poly.zero()).verdict is Verdict.INVALID_INPUT
    assert certify(P("y^2-x^3-x^2"), ONE).verdict is Verdict.INVALID_INPUT
    assert certify(P("x+y"), ONE).verdict is Verdict.INVALID_INPUT


def test_certify_bad_cofactor_on_circle():
    r = certify(CIRCLE, P("x"))
    assert r.verdict in (Verdict.EVENNESS_FAILS, Verdict.H_NOT_CONSTANT)


def test_certify_with_cofactor_that_is_constant_on_curve():
    # g = 1 + f equals 1 on the circle, so the pipeline still succeeds
    r = certify(CIRCLE, ONE + CIRCLE)
    assert r.verdict is Verdict.CONIC_CONSISTENT and r.constant_c == 8


@pytest.mark.parametrize("f", [QUARTIC, P("x^3+y^3+1"), P("x^4+2*y^4+x*y-1")])
def test_forced_skip_reaches_contradiction(f):
    r = certify(f, ONE, 3, bypass=("evenness", "h_constant", "ideal"))
    assert r.verdict is Verdict.CONTRADICTION_WITNESS
    c = r.contradiction
    assert c["f_at_witness"] < 1e-6 and c["h_of_f_at_witness"] < 1e-6
    assert abs(complex(*c["left"]) + 1) < 1e-6
    assert abs(complex(*c["right"])) < 1e-6


def test_bypass_names_validated():
    with pytest.raises(ValueError):
        certify(CIRCLE, ONE, bypass=("nonsingular",))
    with pytest.raises(ValueError):
        certify(CIRCLE, ONE, 2)


def test_report_json_shape():
    data = certify(ELLIPSE, ONE).to_json()
    assert data["verdict"] == "CONIC_CONSISTENT"
    assert data["constant_c"] == "2"
    assert data["convexity"] == "assumed"
    assert {"f", "g", "odd_defects", "quotient_h", "witness", "stages"} <= set(data)
