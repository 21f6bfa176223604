"""Certification pipeline for algebraic integrability of an outer billiard.

Given the defining polynomial ``f`` of an oval and a cofactor ``g``, the
candidate invariant is ``F = g*f``.  The stages, in order:

1. the projective closure of ``f = 0`` is nonsingular;
2. ``g`` does not vanish identically on the curve (``f`` does not divide ``g``);
3. every odd coefficient of ``F(x + e*F_y, y - e*F_x)`` vanishes on the curve;
4. ``H(F)`` reduces to a nonzero constant ``c`` modulo ``f``;
5. ``g^3 H(f) - c = h*f`` for a polynomial ``h``;
6. conics stop here.  Higher degree curves have a finite inflection where
   ``f = H(f) = 0``, so the left side of stage 5 is ``-c`` while the right
   side is ``0``; the witness point is reported.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .curves import (
    InflectionRecord,
    ProjectiveCurve,
    inflection_points,
    is_nonsingular,
    sample_real_branch,
)
from .errors import BranchNotFound, SingularCurve, WitnessNotFound
from .operators import epsilon_expansion, h_operator
from .polycore import Poly, exact_divide, reduce_mod

WITNESS_TOL = 1e-6
STAGES = ("nonsingular", "cofactor", "evenness", "h_constant", "ideal", "witness")


class Verdict(str, enum.Enum):
    CONIC_CONSISTENT = "CONIC_CONSISTENT"
    EVENNESS_FAILS = "EVENNESS_FAILS"
    H_NOT_CONSTANT = "H_NOT_CONSTANT"
    CONTRADICTION_WITNESS = "CONTRADICTION_WITNESS"
    INVALID_INPUT = "INVALID_INPUT"


@dataclass
class IntegrabilityReport:
    f: Poly
    g: Poly
    degree: int
    order: int
    nonsingular: bool | None = None
    g_nonzero_on_curve: bool | None = None
    odd_defects: list = field(default_factory=list)
    h_of_F_mod_f: Poly | None = None
    constant_c: Fraction | None = None
    quotient_h: Poly | None = None
    witness: InflectionRecord | None = None
    contradiction: dict | None = None
    convexity: str = "assumed"
    stages: list = field(default_factory=list)
    verdict: Verdict | None = None
    reason: str = ""

    def to_json(self):
        def poly(p):
            return None if p is None else p.to_string()

        witness = None
        if self.witness is not None:
            witness = self.witness.to_json()
            ax, ay = self.witness.affine_point()
            witness["affine"] = [[ax.real, ax.imag], [ay.real, ay.imag]]
        return {
            "f": poly(self.f),
            "g": poly(self.g),
            "degree": self.degree,
            "order": self.order,
            "nonsingular": self.nonsingular,
            "g_nonzero_on_curve": self.g_nonzero_on_curve,
            "odd_defects": [{"k": k, "residue": poly(r), "zero": r.is_zero()} for k, r in self.odd_defects],
            "h_of_F_mod_f": poly(self.h_of_F_mod_f),
            "constant_c": None if self.constant_c is None else str(self.constant_c),
            "quotient_h": poly(self.quotient_h),
            "witness": witness,
            "contradiction": self.contradiction,
            "convexity": self.convexity,
            "stages": self.stages,
            "verdict": self.verdict.value if self.verdict else None,
            "reason": self.reason,
        }


def evenness_defect(f: Poly, g: Poly, K: int = 7):
    """Odd Taylor coefficients of ``F = g*f`` along tangent lines, reduced mod ``f``.

    Returns ``[(k, residue)]`` for odd ``k <= K``; a zero residue means the
    coefficient vanishes on the curve.
    """
    expansion = epsilon_expansion(g * f, K)
    return [(k, reduce_mod(c, f)) for k, c in expansion.odd()]


def h_residue(f: Poly, g: Poly) -> Poly:
    return reduce_mod(h_operator(g * f), f)


def h_constant_on_curve(f: Poly, g: Poly):
    """The constant value of ``H(g*f)`` on the curve, or ``None``."""
    r = h_residue(f, g)
    if r.is_constant() and not r.is_zero():
        return Fraction(r.constant_value())
    return None


def verify_ideal_identity(f: Poly, g: Poly, c) -> Poly | None:
    """Quotient ``h`` with ``g^3 H(f) - c = h*f``, or ``None``."""
    c = Fraction(c)
    if c == 0:
        raise ValueError("the constant must be nonzero")
    return exact_divide(g ** 3 * h_operator(f) - c, f)


def _witness_key(record: InflectionRecord):
    return (-round(abs(record.point[2]), 9), not record.real,
            [(round(c.real, 8), round(c.imag, 8)) for c in record.point])


def inflection_witness(f: Poly, seed: int = 0) -> InflectionRecord | None:
    """A finite inflection of the complexified curve, or ``None`` for conics.

    Among finite inflections the one farthest from the line at infinity is
    returned (real points first on ties), and ``H(f)`` is checked to vanish
    there.
    """
    curve = ProjectiveCurve.from_affine(f)
    if not is_nonsingular(curve, seed):
        raise SingularCurve("projective closure of f = 0 is singular")
    if curve.degree <= 2:
        return None
    finite = [r for r in inflection_points(curve, seed, check_singular=False) if not r.at_infinity]
    if not finite:
        raise WitnessNotFound("every computed inflection lies at infinity")
    witness = min(finite, key=_witness_key)
    hf = h_operator(f)
    if abs(complex(hf.evaluate(list(witness.affine_point())))) >= WITNESS_TOL:
        raise WitnessNotFound("H(f) does not vanish at the computed inflection")
    return witness


def _convexity(f: Poly, interior, samples: int = 256) -> str:
    try:
        points = sample_real_branch(f, samples, interior)
    except BranchNotFound:
        return "failed: no closed branch around the interior point"
    hn = h_operator(f).numeric()
    values = [hn(x, y) for x, y in points]
    if all(v > 0 for v in values) or all(v < 0 for v in values):
        return "verified"
    return "failed: curvature changes sign or vanishes"


def certify(f: Poly, g: Poly, K: int = 7, *, seed: int = 0, interior=None,
            bypass: Iterable[str] = (), assumed_constant=1) -> IntegrabilityReport:
    """Run the certification pipeline and return a structured report.

    ``bypass`` names stages among ``evenness``, ``h_constant`` and ``ideal``
    to skip (diagnostic use).  When ``h_constant`` is skipped,
    ``assumed_constant`` stands in for ``c``.
    """
    if f.is_zero():
        raise ValueError("f must be nonzero")
    if K < 3:
        raise ValueError("expansion order must be at least 3")
    bypass = set(bypass)
    unknown = bypass - {"evenness", "h_constant", "ideal"}
    if unknown:
        raise ValueError(f"cannot bypass {sorted(unknown)}")
    report = IntegrabilityReport(f=f, g=g, degree=f.degree, order=K)

    def stage(name, status, **info):
        report.stages.append({"stage": name, "status": status, **info})

    def invalid(reason):
        report.verdict = Verdict.INVALID_INPUT
        report.reason = reason
        return report

    if f.degree < 2:
        report.nonsingular = True
        stage("nonsingular", "failed")
        return invalid("degree < 2 cannot bound an oval")
    report.nonsingular = is_nonsingular(ProjectiveCurve.from_affine(f), seed)
    if not report.nonsingular:
        stage("nonsingular", "failed")
        return invalid("projective closure of f = 0 is singular")
    stage("nonsingular", "passed")

    report.g_nonzero_on_curve = not g.is_zero() and exact_divide(g, f) is None
    if not report.g_nonzero_on_curve:
        stage("cofactor", "failed")
        return invalid("g vanishes identically on the curve")
    stage("cofactor", "passed")

    if interior is not None:
        report.convexity = _convexity(f, interior)

    if "evenness" in bypass:
        stage("evenness", "skipped")
    else:
        report.odd_defects = evenness_defect(f, g, K)
        failing = [k for k, r in report.odd_defects if not r.is_zero()]
        if failing:
            stage("evenness", "failed", orders=failing)
            report.verdict = Verdict.EVENNESS_FAILS
            report.reason = f"odd coefficient(s) {failing} do not vanish on the curve"
            return report
        stage("evenness", "passed")

    if "h_constant" in bypass:
        stage("h_constant", "skipped")
        report.constant_c = Fraction(assumed_constant)
    else:
        report.h_of_F_mod_f = h_residue(f, g)
        c = report.h_of_F_mod_f
        if not c.is_constant() or c.is_zero():
            stage("h_constant", "failed")
            report.verdict = Verdict.H_NOT_CONSTANT
            report.reason = "H(g*f) is not a nonzero constant on the curve"
            return report
        report.constant_c = Fraction(c.constant_value())
        stage("h_constant", "passed")

    if "ideal" in bypass:
        stage("ideal", "skipped")
    else:
        report.quotient_h = verify_ideal_identity(f, g, report.constant_c)
        if report.quotient_h is None:
            stage("ideal", "failed")
            report.verdict = Verdict.H_NOT_CONSTANT
            report.reason = "g^3 H(f) - c is not a multiple of f"
            return report
        stage("ideal", "passed")

    if f.degree == 2:
        report.verdict = Verdict.CONIC_CONSISTENT
        report.reason = "conic: every stage passes"
        return report

    witness = inflection_witness(f, seed)
    report.witness = witness
    point = list(witness.affine_point())
    c = report.constant_c
    left = complex((g ** 3 * h_operator(f)).evaluate(point)) - float(c)
    f_value = complex(f.evaluate(point))
    if report.quotient_h is not None:
        right = complex(report.quotient_h.evaluate(point)) * f_value
    else:
        right = f_value
    report.contradiction = {
        "left": [left.real, left.imag],
        "right": [right.real, right.imag],
        "f_at_witness": abs(f_value),
        "h_of_f_at_witness": abs(complex(h_operator(f).evaluate(point))),
        "gap_from_minus_c": abs(left + float(c)),
    }
    stage("witness", "passed")
    report.verdict = Verdict.CONTRADICTION_WITNESS
    report.reason = "finite inflection makes g^3 H(f) - c = -c while h*f = 0"
    return report
