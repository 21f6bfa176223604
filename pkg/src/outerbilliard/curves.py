"""Projective plane curves: singularity test, Hessian curve and inflections.

Intersections of two projective curves are found by elimination.  A random
integer change of projective coordinates (fixed seed) puts the curves in
general position first, so that no intersection lies on the new line at
infinity and distinct intersections have distinct ``x``.  Then
``Res_y`` is a univariate polynomial whose root multiplicities equal the
intersection multiplicities, and each root is lifted back to a point by
solving for ``y``.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BranchNotFound, ConvergenceFailure, DegenerateInput, SingularCurve
from .polycore import Poly, dehomogenize, homogenize, resultant
from .roots import complex_roots

NONSINGULAR_TOL = 1e-8
POINT_TOL = 1e-8
REAL_TOL = 1e-8
INFINITY_TOL = 1e-8
MAX_SHEARS = 8


@dataclass(frozen=True)
class ProjectiveCurve:
    defining: Poly

    def __post_init__(self):
        if self.defining.nvars != 3 or not self.defining.is_homogeneous():
            raise ValueError("projective curves need a homogeneous polynomial in x, y, z")

    @classmethod
    def from_affine(cls, f: Poly) -> "ProjectiveCurve":
        return cls(homogenize(f))

    @property
    def degree(self):
        return self.defining.degree

    def affine(self) -> Poly:
        return dehomogenize(self.defining)


@dataclass(frozen=True)
class InflectionRecord:
    point: tuple
    multiplicity: int
    at_infinity: bool
    real: bool

    def affine_point(self):
        x, y, z = self.point
        return x / z, y / z

    def to_json(self):
        return {
            "point": [[p.real, p.imag] for p in self.point],
            "multiplicity": self.multiplicity,
            "at_infinity": self.at_infinity,
            "real": self.real,
        }


def normalize_point(p: Sequence[complex]) -> tuple:
    """Scale so the largest-modulus coordinate is exactly 1 (first on ties)."""
    p = [complex(c) for c in p]
    mods = [abs(c) for c in p]
    top = max(mods)
    if top == 0:
        raise ValueError("(0:0:0) is not a projective point")
    k = next(i for i, m in enumerate(mods) if m >= top * (1 - 1e-9))
    pivot = p[k]
    out = [_snap(c / pivot) for c in p]
    out[k] = 1 + 0j
    return tuple(out)


def _snap(c: complex, eps: float = 1e-15) -> complex:
    return complex(0.0 if abs(c.real) < eps else c.real, 0.0 if abs(c.imag) < eps else c.imag)


def _relative_residual(numeric, abs_numeric, *pt):
    """``|P(pt)|`` over the sum of its term magnitudes at ``pt``."""
    scale = abs_numeric(*[abs(c) for c in pt])
    value = abs(numeric(*pt))
    return value / scale if scale > 0 else value


def _abs_poly(P: Poly) -> Poly:
    return Poly({e: abs(c) for e, c in P.items()}, P.nvars)


def _scaled_abs(P: Poly, point):
    """``|P(point)|`` relative to the 1-norm of the coefficients."""
    scale = sum(abs(float(c)) for _, c in P.items()) or 1.0
    return abs(complex(P.evaluate(list(point)))) / scale


def _random_frame(rng: random.Random):
    while True:
        # Diagonally dominant frames stay well conditioned.
        m = [[4 if i == j else rng.choice((-2, -1, 1, 2)) for j in range(3)] for i in range(3)]
        det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
               - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
               + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
        if det:
            return m


def _substitution(m):
    X = [Poly.variable(i, 3) for i in range(3)]
    return [X[0] * m[i][0] + X[1] * m[i][1] + X[2] * m[i][2] for i in range(3)]


def _apply(m, v):
    return tuple(sum(m[i][j] * v[j] for j in range(3)) for i in range(3))


def _frames(seed):
    rng = random.Random(seed)
    for _ in range(MAX_SHEARS):
        yield _random_frame(rng)


def _leading_y_constant(P: Poly):
    """Coefficient of y^deg in a homogeneous P (the value at (0:1:0))."""
    return P.coefficient((0, P.degree, 0))


def _intersect(P: Poly, Q: Poly, seed: int):
    """Intersection points of two projective curves with multiplicities.

    Returns a list of ``(point, multiplicity)`` in the original coordinates,
    or raises :class:`ConvergenceFailure` if no tried frame is generic.
    """
    expected = P.degree * Q.degree
    last_error = None
    for m in _frames(seed):
        subs = _substitution(m)
        Ps, Qs = P.compose(subs), Q.compose(subs)
        if not _leading_y_constant(Ps) or not _leading_y_constant(Qs):
            continue
        p2, q2 = dehomogenize(Ps), dehomogenize(Qs)
        R = resultant(p2, q2, 1)
        if R.is_zero():
            return None
        if R.degree != expected:
            continue
        try:
            roots = complex_roots(R.drop_variable(1).univariate_coeffs())
        except ConvergenceFailure as exc:
            last_error = exc
            continue
        points = _lift(roots, p2, q2, m)
        if points is not None:
            return points
    raise ConvergenceFailure("no generic coordinate frame found", partial=last_error)


def _lift(roots, p2: Poly, q2: Poly, m):
    pc = [c.drop_variable(1) for c in p2.coefficients_in(1)]
    qn, qa = q2.numeric(), _abs_poly(q2).numeric()
    out = []
    for root in roots:
        x0 = root.value
        ys = complex_roots([complex(c.evaluate([x0])) for c in pc]).values()
        scores = [_relative_residual(qn, qa, x0, y0) for y0 in ys]
        order = np.argsort(scores)
        best = ys[order[0]]
        # Distinct intersections must project to distinct x in a generic frame.
        if len(ys) > 1 and scores[order[1]] < 1e-6:
            return None
        if scores[order[0]] > 1e-6:
            return None
        x1, y1 = _newton_polish(p2, q2, x0, best)
        out.append((normalize_point(_apply(m, (x1, y1, 1))), root.multiplicity))
    return out


def _newton_polish(p2: Poly, q2: Poly, x0, y0, steps=8):
    """Least-squares Newton on ``p2 = q2 = 0``; keeps the best iterate.

    At tangential intersections the Jacobian is singular and the step falls
    back to the minimum-norm solution, which still converges (linearly).
    """
    fs = [p2.numeric(), q2.numeric()]
    grads = [(g.diff(0).numeric(), g.diff(1).numeric()) for g in (p2, q2)]
    scales = [sum(abs(float(c)) for _, c in g.items()) or 1.0 for g in (p2, q2)]

    def res(x, y):
        return max(abs(f(x, y)) / s for f, s in zip(fs, scales))

    best, best_r = (x0, y0), res(x0, y0)
    x, y = x0, y0
    for _ in range(steps):
        F = np.array([fs[0](x, y) / scales[0], fs[1](x, y) / scales[1]], dtype=complex)
        J = np.array([[gx(x, y) / s, gy(x, y) / s] for (gx, gy), s in zip(grads, scales)], dtype=complex)
        step = np.linalg.lstsq(J, -F, rcond=1e-12)[0]
        x, y = x + step[0], y + step[1]
        r = res(x, y)
        if not np.isfinite(r):
            break
        if r < best_r:
            best, best_r = (x, y), r
    if abs(best[0] - x0) + abs(best[1] - y0) > 1e-3 * max(1.0, abs(x0), abs(y0)):
        return x0, y0
    return best


def _nonconstant_check(curve: ProjectiveCurve):
    if curve.degree < 1:
        raise DegenerateInput("degree-0 curve")


def is_nonsingular(curve: ProjectiveCurve, seed: int = 0) -> bool:
    """True iff the partials of the defining form have no common projective zero."""
    _nonconstant_check(curve)
    F = curve.defining
    if curve.degree == 1:
        return True
    grads = [F.diff(i) for i in range(3)]
    if any(g.is_zero() for g in grads) and all(g.is_zero() for g in grads):
        return False
    rng = random.Random(seed + 7919)
    for _ in range(MAX_SHEARS):
        a = [rng.randint(-4, 4) for _ in range(3)]
        b = [rng.randint(-4, 4) for _ in range(3)]
        A = grads[0] * a[0] + grads[1] * a[1] + grads[2] * a[2]
        B = grads[0] * b[0] + grads[1] * b[1] + grads[2] * b[2]
        if A.is_zero() or B.is_zero() or A.degree != curve.degree - 1:
            continue
        try:
            points = _intersect(A, B, rng.randrange(1 << 30))
        except ConvergenceFailure:
            continue
        if points is None:
            # A and B share a component, so the partials vanish along a curve.
            return False
        for point, _ in points:
            if all(_scaled_abs(g, point) < NONSINGULAR_TOL for g in grads if not g.is_zero()):
                return False
        return True
    raise ConvergenceFailure("could not decide nonsingularity")


def hessian_curve(curve: ProjectiveCurve) -> Poly:
    """Determinant of the 3x3 matrix of second partials of the defining form."""
    if curve.degree < 2:
        raise DegenerateInput("Hessian curve needs degree >= 2")
    F = curve.defining
    h = [[F.diff(i).diff(j) for j in range(3)] for i in range(3)]
    return (h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1])
            - h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0])
            + h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]))


def inflection_points(curve: ProjectiveCurve, seed: int = 0, check_singular: bool = True):
    """Intersections of a nonsingular curve with its Hessian, with multiplicities."""
    if curve.degree < 2:
        raise DegenerateInput("inflections need degree >= 2")
    if check_singular and not is_nonsingular(curve, seed):
        raise SingularCurve("curve is singular")
    H = hessian_curve(curve)
    if H.is_zero():
        raise DegenerateInput("Hessian vanishes identically")
    if H.degree == 0:
        return []
    points = _intersect(curve.defining, H, seed)
    if points is None:
        raise SingularCurve("curve shares a component with its Hessian")
    records = []
    for point, mult in points:
        if _scaled_abs(curve.defining, point) >= POINT_TOL or _scaled_abs(H, point) >= POINT_TOL:
            raise ConvergenceFailure("inflection residual above tolerance", partial=points)
        records.append(InflectionRecord(
            point=point,
            multiplicity=mult,
            at_infinity=abs(point[2]) < INFINITY_TOL,
            real=all(abs(c.imag) < REAL_TOL for c in point),
        ))
    records.sort(key=lambda r: (r.at_infinity, not r.real, [(round(c.real, 8), round(c.imag, 8)) for c in r.point]))
    return records


def classify_inflections(records, degree: int | None = None) -> dict:
    summary = {
        "total": len(records),
        "total_multiplicity": sum(r.multiplicity for r in records),
        "finite_count": sum(not r.at_infinity for r in records),
        "at_infinity_count": sum(r.at_infinity for r in records),
        "real_count": sum(r.real for r in records),
        "max_multiplicity": max((r.multiplicity for r in records), default=0),
    }
    if degree is not None and summary["max_multiplicity"] > degree - 2:
        warnings.warn(
            f"inflection multiplicity {summary['max_multiplicity']} exceeds d-2 = {degree - 2}; "
            "likely a root clustering error",
            RuntimeWarning,
        )
    return summary


# -- real branch tracing ---------------------------------------------------


def restrict_to_line(f: Poly, point, direction):
    """Float coefficients (ascending) of ``t -> f(point + t*direction)``."""
    P = np.polynomial.polynomial
    lx = np.array([float(point[0]), float(direction[0])])
    ly = np.array([float(point[1]), float(direction[1])])
    out = np.zeros(max(f.degree, 0) + 1)
    for (i, j), c in f.items():
        term = P.polymul(P.polypow(lx, i), P.polypow(ly, j)) * float(c)
        out[: len(term)] += term
    return out


def ray_hit(f: Poly, seed, angle: float, search_radius: float = 1e6):
    """First positive zero of ``f`` along the ray from ``seed`` at ``angle``."""
    u = (math.cos(angle), math.sin(angle))
    coeffs = restrict_to_line(f, seed, u)
    nz = np.nonzero(np.abs(coeffs) > 0)[0]
    if nz.size == 0 or nz[-1] == 0:
        raise BranchNotFound(f"no zero along ray at angle {angle:.6g}")
    coeffs = coeffs[: nz[-1] + 1]
    candidates = []
    for r in np.polynomial.polynomial.polyroots(coeffs):
        if abs(r.imag) < 1e-7 * max(1.0, abs(r)) and 0 < r.real <= search_radius:
            candidates.append(r.real)
    if not candidates:
        raise BranchNotFound(f"no zero along ray at angle {angle:.6g}")
    t = min(candidates)
    dc = np.polynomial.polynomial.polyder(coeffs)
    for _ in range(5):
        d = np.polynomial.polynomial.polyval(t, dc)
        if d == 0:
            break
        step = np.polynomial.polynomial.polyval(t, coeffs) / d
        t -= step
        if abs(step) < 1e-16 * t:
            break
    return seed[0] + t * u[0], seed[1] + t * u[1]


def sample_real_branch(f: Poly, n: int, seed=(0.0, 0.0)):
    """``n`` points of the real branch around ``seed``, ordered by angle from 0."""
    return [ray_hit(f, seed, 2 * math.pi * k / n) for k in range(n)]
