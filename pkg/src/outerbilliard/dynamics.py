"""Numerical outer billiard dynamics.

The outer billiard map ``T`` sends an exterior point ``x`` to its mirror
image in the tangency point of the right tangent line from ``x`` to the
oval.  "Right" is fixed as: facing from ``x`` towards the interior seed
``s``, the tangency point ``p`` is on the right hand, i.e.
``cross(p - x, s - x) > 0``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .curves import ray_hit, restrict_to_line
from .errors import (
    DegenerateTangent,
    InsufficientPairs,
    OuterBilliardError,
    PointInsideOval,
    SolverDivergence,
)
from .polycore import Poly

SWEEP_SAMPLES = 256
TANGENCY_TOL = 1e-12


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


@dataclass(frozen=True)
class Oval:
    """A convex oval, either an ellipse ``x^2/a^2 + y^2/b^2 = 1`` or an
    implicit curve ``f = 0`` around an interior seed point."""

    kind: str
    a: float = 1.0
    b: float = 1.0
    f: Poly | None = None
    seed: tuple = (0.0, 0.0)

    @classmethod
    def ellipse(cls, a: float, b: float) -> "Oval":
        if a <= 0 or b <= 0:
            raise ValueError("ellipse semi-axes must be positive")
        return cls("ellipse", a=float(a), b=float(b))

    @classmethod
    def implicit(cls, f: Poly, seed=(0.0, 0.0)) -> "Oval":
        oval = cls("implicit", f=f, seed=(float(seed[0]), float(seed[1])))
        oval._validate()
        return oval

    # -- implicit-curve machinery -----------------------------------------

    @cached_property
    def _numeric(self):
        f = self.f
        fx, fy = f.diff(0), f.diff(1)
        return {
            "f": f.numeric(),
            "fx": fx.numeric(),
            "fy": fy.numeric(),
            "fxx": fx.diff(0).numeric(),
            "fxy": fx.diff(1).numeric(),
            "fyy": fy.diff(1).numeric(),
        }

    @cached_property
    def _sweep(self):
        angles = 2 * np.pi * np.arange(SWEEP_SAMPLES) / SWEEP_SAMPLES
        pts = np.array([ray_hit(self.f, self.seed, t) for t in angles])
        radii = np.hypot(pts[:, 0] - self.seed[0], pts[:, 1] - self.seed[1])
        return angles, radii

    def boundary_samples(self, samples: int):
        """Parameters, points and gradients on a uniform parameter grid (cached)."""
        cache = self.__dict__.setdefault("_boundary_cache", {})
        if samples not in cache:
            thetas = 2 * np.pi * np.arange(samples + 1) / samples
            pts = np.array([self._boundary(t)[0] for t in thetas])
            grads = np.array([self.gradient(p) for p in pts])
            cache[samples] = (thetas, pts, grads)
        return cache[samples]

    def _validate(self):
        try:
            angles, radii = self._sweep
        except OuterBilliardError as exc:
            raise ValueError(f"no closed branch around the seed: {exc}") from exc
        sx, sy = self.seed
        pts = np.column_stack([sx + radii * np.cos(angles), sy + radii * np.sin(angles)])
        edges = np.roll(pts, -1, axis=0) - pts
        turns = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
        if not np.all(turns > 0):
            raise ValueError("the branch around the seed is not a strictly convex oval")

    def _radius(self, theta):
        """Distance from the seed to the curve along angle ``theta``."""
        angles, radii = self._sweep
        r = float(np.interp(theta % (2 * np.pi), np.append(angles, 2 * np.pi), np.append(radii, radii[0])))
        num = self._numeric
        c, s = math.cos(theta), math.sin(theta)
        sx, sy = self.seed
        for _ in range(50):
            x, y = sx + r * c, sy + r * s
            d = num["fx"](x, y) * c + num["fy"](x, y) * s
            step = num["f"](x, y) / d
            r -= step
            if abs(step) <= 1e-16 * r:
                break
        return r

    def _boundary(self, theta):
        """Point on the oval at parameter ``theta`` and its theta-derivative."""
        if self.kind == "ellipse":
            c, s = math.cos(theta), math.sin(theta)
            return np.array([self.a * c, self.b * s]), np.array([-self.a * s, self.b * c])
        num = self._numeric
        r = self._radius(theta)
        u = np.array([math.cos(theta), math.sin(theta)])
        v = np.array([-u[1], u[0]])
        p = np.array(self.seed) + r * u
        grad = np.array([num["fx"](*p), num["fy"](*p)])
        dr = -r * grad.dot(v) / grad.dot(u)
        return p, dr * u + r * v

    def gradient(self, p):
        if self.kind == "ellipse":
            return np.array([2 * p[0] / self.a ** 2, 2 * p[1] / self.b ** 2])
        num = self._numeric
        return np.array([num["fx"](*p), num["fy"](*p)])

    def hessian(self, p):
        if self.kind == "ellipse":
            return np.diag([2 / self.a ** 2, 2 / self.b ** 2])
        num = self._numeric
        xy = num["fxy"](*p)
        return np.array([[num["fxx"](*p), xy], [xy, num["fyy"](*p)]])

    def value(self, p):
        if self.kind == "ellipse":
            return (p[0] / self.a) ** 2 + (p[1] / self.b) ** 2 - 1.0
        return self._numeric["f"](*p)

    def contains(self, x) -> bool:
        """True when ``x`` is inside the oval or on it."""
        if self.kind == "ellipse":
            return self.value(x) <= 0.0
        dx, dy = x[0] - self.seed[0], x[1] - self.seed[1]
        return math.hypot(dx, dy) <= self._radius(math.atan2(dy, dx))


def _ellipse_tangency(oval: Oval, x):
    # Tangency points are the images of the unit-circle tangency points
    # from q = (x/a, y/b): w = q/|q|^2 +- q_perp*sqrt(|q|^2 - 1)/|q|^2.
    q = np.array([x[0] / oval.a, x[1] / oval.b])
    rho2 = q.dot(q)
    if rho2 <= 1.0:
        raise PointInsideOval(f"point ({float(x[0])}, {float(x[1])}) is not outside the oval")
    perp = np.array([-q[1], q[0]])
    root = math.sqrt(rho2 - 1.0)
    scale = np.array([oval.a, oval.b])
    return [scale * (q + sign * root * perp) / rho2 for sign in (1.0, -1.0)]


def _tangency_function(oval: Oval, x):
    def g(theta):
        p, dp = oval._boundary(theta)
        grad = oval.gradient(p)
        value = grad.dot(p - x)
        slope = dp.dot(oval.hessian(p).dot(p - x)) + grad.dot(dp)
        return value, slope
    return g


def _safeguarded_newton(g, lo, hi, g_lo):
    """Root of ``g`` in ``[lo, hi]`` (sign change given) by Newton with bisection fallback."""
    theta = 0.5 * (lo + hi)
    for _ in range(200):
        value, slope = g(theta)
        if value == 0:
            return theta
        if (value > 0) == (g_lo > 0):
            lo, g_lo = theta, value
        else:
            hi = theta
        step = value / slope if slope else math.inf
        candidate = theta - step
        if not (lo < candidate < hi):
            candidate = 0.5 * (lo + hi)
        if abs(candidate - theta) <= 1e-16 * max(1.0, abs(theta)) or hi - lo <= 1e-16 * max(1.0, abs(lo)):
            return candidate
        theta = candidate
    raise SolverDivergence("tangency solver did not converge")


def _implicit_tangencies(oval: Oval, x):
    g = _tangency_function(oval, x)
    for samples in (SWEEP_SAMPLES, 16 * SWEEP_SAMPLES):
        thetas, pts, grads = oval.boundary_samples(samples)
        values = np.einsum("ij,ij->i", grads, pts - x)
        brackets = [k for k in range(samples) if (values[k] > 0) != (values[k + 1] > 0)]
        if len(brackets) == 2:
            break
    else:
        raise SolverDivergence("could not bracket two tangency points")
    out = []
    for k in brackets:
        theta = _safeguarded_newton(g, thetas[k], thetas[k + 1], values[k])
        out.append(oval._boundary(theta)[0])
    return out


def tangency_residual(oval: Oval, x, p) -> float:
    """Sine of the angle between ``p - x`` and the tangent line at ``p``."""
    grad = oval.gradient(p)
    d = np.asarray(p) - np.asarray(x)
    return abs(grad.dot(d)) / (np.linalg.norm(grad) * np.linalg.norm(d))


def tangency_from_point(oval: Oval, x) -> np.ndarray:
    """Tangency point of the right tangent line from the exterior point ``x``."""
    x = np.asarray(x, dtype=float)
    if oval.contains(x):
        raise PointInsideOval(f"point ({float(x[0])}, {float(x[1])}) is not outside the oval")
    if oval.kind == "ellipse":
        candidates = _ellipse_tangency(oval, x)
    else:
        candidates = _implicit_tangencies(oval, x)
    s = np.asarray(oval.seed)
    for p in candidates:
        if _cross(p - x, s - x) > 0:
            return p
    raise SolverDivergence("no tangency point on the right-hand side")


def outer_billiard_step(oval: Oval, x) -> np.ndarray:
    p = tangency_from_point(oval, x)
    return 2 * p - np.asarray(x, dtype=float)


@dataclass
class OrbitRecord:
    points: list = field(default_factory=list)
    tangency_points: list = field(default_factory=list)
    solver_residuals: list = field(default_factory=list)
    error: str | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "x", "y", "p_x", "p_y", "residual"])
        for k, pt in enumerate(self.points):
            if k < len(self.tangency_points):
                p = self.tangency_points[k]
                writer.writerow([k, repr(pt[0]), repr(pt[1]), repr(p[0]), repr(p[1]),
                                 repr(self.solver_residuals[k])])
            else:
                writer.writerow([k, repr(pt[0]), repr(pt[1]), "", "", ""])
        return buf.getvalue()


def orbit(oval: Oval, x0, n: int) -> OrbitRecord:
    """``n`` iterations of the map from ``x0``; stops early on solver failure."""
    if n < 1:
        raise ValueError("need at least one step")
    x = np.asarray(x0, dtype=float)
    record = OrbitRecord(points=[(float(x[0]), float(x[1]))])
    for _ in range(n):
        try:
            p = tangency_from_point(oval, x)
        except OuterBilliardError as exc:
            if not record.tangency_points:
                raise
            record.error = f"{type(exc).__name__}: {exc}"
            break
        record.tangency_points.append((float(p[0]), float(p[1])))
        record.solver_residuals.append(float(tangency_residual(oval, x, p)))
        x = 2 * p - x
        record.points.append((float(x[0]), float(x[1])))
    return record


def invariance_drift(F: Poly, record: OrbitRecord) -> float:
    fn = F.numeric()
    base = fn(*record.points[0])
    return max(abs(fn(*pt) - base) for pt in record.points)


def map_jacobian_det(step: Callable, x, h: float) -> float:
    """Determinant of the central-difference Jacobian of ``step`` at ``x``."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        cols.append((np.asarray(step(x + e)) - np.asarray(step(x - e))) / (2 * h))
    return float(cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1])


def jacobian_check(oval: Oval, x, h: float = 1e-5) -> float:
    """``|det DT(x) - 1|``: zero for an area-preserving map."""
    if not 1e-7 <= h <= 1e-4:
        raise ValueError("finite-difference step must lie in [1e-7, 1e-4]")
    return abs(map_jacobian_det(lambda p: outer_billiard_step(oval, p), x, h) - 1.0)


# -- conic pencils and the Desargues involution ----------------------------


@dataclass(frozen=True)
class ConicPencil:
    f1: Poly
    f2: Poly

    def __post_init__(self):
        if self.f1.degree != 2 or self.f2.degree != 2:
            raise ValueError("pencil generators must be conics (degree 2)")
        lt, c = self.f1.leading_term()
        ratio = Fraction(self.f2.coefficient(lt)) / Fraction(c)
        if ratio and (self.f2 - self.f1 * ratio).is_zero():
            raise ValueError("pencil generators are proportional")


@dataclass
class DesarguesResult:
    base: tuple
    direction: tuple
    pairs: list
    fitted_involution: tuple
    residual: float

    def to_json(self):
        return {
            "base": list(self.base),
            "direction": list(self.direction),
            "pairs": [list(p) for p in self.pairs],
            "fitted_involution": list(self.fitted_involution),
            "residual": self.residual,
        }


def fit_involution(pair1, pair2):
    """Coefficients ``(A, B, C)`` of ``A t t' + B (t + t') + C = 0`` through two pairs."""
    rows = [np.array([t * s, t + s, 1.0]) for t, s in (pair1, pair2)]
    coeffs = np.cross(rows[0], rows[1])
    norm = np.max(np.abs(coeffs))
    if norm == 0:
        raise InsufficientPairs("the two pairs do not determine an involution")
    coeffs = coeffs / norm
    # Fix the overall sign: the first entry of maximal size is +1.
    k = int(np.argmax(np.abs(coeffs) == 1.0))
    if coeffs[k] < 0:
        coeffs = -coeffs
    return tuple(float(c) + 0.0 for c in coeffs)


def apply_involution(coeffs, t):
    A, B, C = coeffs
    return -(B * t + C) / (A * t + B)


def involution_residual(pairs):
    """Fit the involution through the first two pairs; max misfit on the rest."""
    if len(pairs) < 3:
        raise InsufficientPairs("need at least three point pairs")
    coeffs = fit_involution(pairs[0], pairs[1])
    residual = 0.0
    for t, s in pairs[2:]:
        residual = max(residual, abs(apply_involution(coeffs, t) - s), abs(apply_involution(coeffs, s) - t))
    return coeffs, residual


def _quadratic_roots(c0, c1, c2):
    # Members nearly tangent to the line at infinity give ill-conditioned pairs.
    if abs(c2) <= 1e-6 * (abs(c0) + abs(c1) + abs(c2)):
        return None
    disc = c1 * c1 - 4 * c2 * c0
    if disc <= 1e-14 * (c1 * c1 + abs(4 * c2 * c0)):
        return None
    q = -0.5 * (c1 + math.copysign(math.sqrt(disc), c1))
    r1 = q / c2
    r2 = c0 / q if q != 0 else -r1
    return tuple(sorted((r1, r2)))


def tangent_line(f: Poly, base):
    """Unit direction ``(f_y, -f_x)`` of the tangent line to ``f = 0`` at ``base``."""
    fx, fy = (float(f.diff(i).evaluate([base[0], base[1]])) for i in range(2))
    norm = math.hypot(fx, fy)
    if norm == 0:
        raise DegenerateTangent("gradient vanishes at the base point")
    return fy / norm, -fx / norm


def line_pairs(members: Sequence[Poly], base, direction):
    """Intersection parameters ``(t, t')`` of each member conic with the line."""
    pairs = []
    for m in members:
        c = np.zeros(3)
        restricted = restrict_to_line(m, base, direction)
        c[: len(restricted)] = restricted
        roots = _quadratic_roots(*c)
        if roots is not None:
            pairs.append(roots)
    return pairs


def pencil_weights(count: int = 24):
    """Weights ``(cos phi, sin phi)`` for ``phi = pi*k/count``, ``k = 1..count-1``.

    ``k = 0`` is the first generator itself, tangent to the line at the base.
    """
    return [(math.cos(math.pi * k / count), math.sin(math.pi * k / count)) for k in range(1, count)]


def desargues_involution_check(pencil: ConicPencil, tangent_base, members: int = 24) -> DesarguesResult:
    """Pairs cut on the tangent line at ``tangent_base`` by pencil members.

    The line is parametrized by arc length from the base point.  Desargues'
    theorem says the pairs are swapped by one projective involution, so the
    residual of the two-pair fit on the remaining pairs should vanish.
    """
    base = (float(tangent_base[0]), float(tangent_base[1]))
    f1_scale = sum(abs(float(c)) for _, c in pencil.f1.items())
    if abs(float(pencil.f1.evaluate(list(base)))) > 1e-10 * max(1.0, f1_scale):
        raise ValueError("tangent base is not on the first generator")
    direction = tangent_line(pencil.f1, base)
    c1 = restrict_to_line(pencil.f1, base, direction)
    c2 = restrict_to_line(pencil.f2, base, direction)
    f2_scale = sum(abs(float(c)) for _, c in pencil.f2.items())
    if abs(c2[0]) < 1e-12 * f2_scale or abs(c1[2]) < 1e-12 * f1_scale:
        raise DegenerateTangent("tangent line passes through a base point of the pencil")
    pairs = []
    for lam, mu in pencil_weights(members):
        roots = _quadratic_roots(*(lam * c1[:3] + mu * c2[:3]))
        if roots is not None:
            pairs.append(roots)
    if len(pairs) < 3:
        raise InsufficientPairs("fewer than three pencil members meet the tangent line")
    coeffs, residual = involution_residual(pairs)
    return DesarguesResult(base, direction, pairs, coeffs, float(residual))
