"""Complex roots of univariate polynomials with multiplicities.

Simultaneous Aberth iteration finds all roots at once.  Approximations that
land within the clustering radius of each other are merged into a single
root whose multiplicity is the cluster size; the merged value is then
polished by Newton's method on the (m-1)-th derivative, where an m-fold
root is simple.

An m-fold root only resolves to about ``eps**(1/m)`` in floating point, so
exact rational input is first split into square-free parts (Yun's
algorithm).  Each part has simple roots, and its index in the decomposition
is the exact multiplicity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import ConvergenceFailure, ZeroPolynomial

CLUSTER_RADIUS = 1e-6
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class Root:
    value: complex
    multiplicity: int


@dataclass(frozen=True)
class UnivariateRoots:
    roots: tuple
    degree: int
    reliable: bool = True

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)

    def values(self):
        return [r.value for r in self.roots]

    def total_multiplicity(self):
        return sum(r.multiplicity for r in self.roots)


def _as_coeffs(u):
    coeffs = np.array([complex(c) for c in u], dtype=complex)
    nz = np.nonzero(coeffs)[0]
    if nz.size == 0:
        raise ZeroPolynomial("complex_roots of the zero polynomial")
    return coeffs[: nz[-1] + 1]


# -- exact univariate helpers (ascending Fraction lists) -------------------


def _trim(a):
    while a and a[-1] == 0:
        a = a[:-1]
    return a


def _deriv(a):
    return _trim([k * a[k] for k in range(1, len(a))])


def _divmod_exact(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for k, bc in enumerate(b):
            a[shift + k] -= c * bc
        a = _trim(a)
    return _trim(q), a


def _monic(a):
    return [c / a[-1] for c in a]


def _gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _divmod_exact(a, b)[1]
    return _monic(a)


def squarefree_parts(coeffs):
    """Yun's decomposition of an exact polynomial: ``[(part, multiplicity)]``.

    ``coeffs`` is ascending and rational; constant parts are dropped.
    """
    f = _trim([Fraction(c) for c in coeffs])
    if len(f) <= 1:
        return []
    fp = _deriv(f)
    a0 = _gcd(f, fp)
    b = _divmod_exact(f, a0)[0]
    c = _divmod_exact(fp, a0)[0]
    d = [x - y for x, y in _zip_pad(c, _deriv(b))]
    out = []
    i = 1
    while len(b) > 1:
        a = _gcd(b, _trim(d))
        if len(a) > 1:
            out.append((_monic(a), i))
        b = _divmod_exact(b, a)[0]
        c = _divmod_exact(_trim(d), a)[0] if _trim(d) else []
        d = [x - y for x, y in _zip_pad(c, _deriv(b))]
        i += 1
    return out


def _zip_pad(a, b):
    n = max(len(a), len(b))
    return zip(list(a) + [0] * (n - len(a)), list(b) + [0] * (n - len(b)))


def _is_exact(u):
    return all(isinstance(c, Rational) for c in u)


def _horner(desc, z):
    acc = np.zeros_like(z) + desc[0]
    for c in desc[1:]:
        acc = acc * z + c
    return acc


def residual(asc, z):
    """``|u(z)|`` relative to the size of the terms summed to get it."""
    desc = asc[::-1]
    value = abs(_horner(desc, np.asarray(z, dtype=complex)))
    scale = _horner(np.abs(desc), np.abs(np.asarray(z, dtype=complex)))
    return value / scale if scale > 0 else value


def _aberth(desc, max_iter):
    n = len(desc) - 1
    ddesc = desc[:-1] * np.arange(n, 0, -1)
    # Start on a circle sized by the geometric mean of the roots.
    radius = abs(desc[-1] / desc[0]) ** (1.0 / n)
    radius = radius if radius > 0 else 1.0
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles)
    eye = np.eye(n, dtype=bool)
    adesc = np.abs(desc)
    floor = 16 * n * np.finfo(float).eps
    for _ in range(max_iter):
        p = _horner(desc, z)
        dp = _horner(ddesc, z)
        dp = np.where(dp == 0, 1e-300, dp)
        ratio = p / dp
        diff = z[:, None] - z[None, :]
        diff[eye] = 1.0
        inv = 1.0 / diff
        inv[eye] = 0.0
        s = inv.sum(axis=1)
        denom = 1.0 - ratio * s
        denom = np.where(denom == 0, 1e-300, denom)
        w = ratio / denom
        w = np.where(np.isfinite(w), w, 0.0)
        small_step = np.abs(w) <= 1e-15 * np.maximum(np.abs(z), 1.0)
        # Near multiple roots the steps jitter forever; stop at the rounding floor.
        at_floor = np.abs(p) <= floor * _horner(adesc, np.abs(z))
        z = z - w
        if np.all(small_step | at_floor):
            return z, True
    return z, False


def _cluster(z, radius):
    n = len(z)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= radius * max(1.0, abs(z[i]), abs(z[j])):
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(z[i])
    return list(groups.values())


def _polish(asc, z0, m):
    """Newton on the (m-1)-th derivative, where an m-fold root is simple."""
    poly = np.polynomial.Polynomial(asc)
    target = poly.deriv(m - 1) if m > 1 else poly
    dtarget = target.deriv()
    best, best_res = z0, residual(target.coef, z0)
    z = z0
    for _ in range(30):
        d = dtarget(z)
        if d == 0:
            break
        step = target(z) / d
        z = z - step
        r = residual(target.coef, z)
        if r < best_res:
            best, best_res = z, r
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    if abs(best - z0) > CLUSTER_RADIUS * max(1.0, abs(z0)):
        return z0
    return best


def _solve(asc, cluster_radius, max_iter):
    zero_mult = int(np.argmax(asc != 0))
    core = asc[zero_mult:]
    roots = [Root(0j, zero_mult)] if zero_mult else []
    if len(core) == 1:
        return roots, True
    core = core / core[-1]
    if len(core) == 2:
        approx, converged = np.array([-core[0]]), True
    else:
        approx, converged = _aberth(core[::-1], max_iter)
    for group in _cluster(approx, cluster_radius):
        m = len(group)
        center = complex(np.mean(group))
        roots.append(Root(complex(_polish(core, center, m)), m))
    return roots, converged


def complex_roots(u, *, cluster_radius: float = CLUSTER_RADIUS, tol: float = RESIDUAL_TOL,
                  max_iter: int = 2000) -> UnivariateRoots:
    """All complex roots of ``u`` with multiplicities.

    ``u`` is an ascending coefficient sequence (``u[k]`` multiplies
    ``t**k``) or a :class:`~outerbilliard.polycore.Poly` in one variable.
    Rational coefficients get exact multiplicities; float or complex ones
    rely on clustering within ``cluster_radius``.
    Raises :class:`ConvergenceFailure` carrying the partial result when the
    iteration cap is hit or a residual exceeds ``tol``.
    """
    if hasattr(u, "univariate_coeffs"):
        u = u.univariate_coeffs()
    asc = _as_coeffs(u)
    degree = len(asc) - 1
    if _is_exact(u):
        pieces = [(np.array([complex(c) for c in part]), m) for part, m in squarefree_parts(u)]
    else:
        pieces = [(asc, 1)]
    roots = []
    converged = True
    for part, scale in pieces:
        found, ok = _solve(part, cluster_radius, max_iter)
        converged = converged and ok
        roots.extend(Root(r.value, r.multiplicity * scale) for r in found)
    roots.sort(key=lambda r: (round(r.value.real, 9), round(r.value.imag, 9)))
    bad = [r for r in roots if r.value != 0 and residual(asc, r.value) >= tol]
    result = UnivariateRoots(tuple(roots), degree, reliable=converged and not bad)
    if not result.reliable:
        worst = max((residual(asc, r.value) for r in roots), default=math.nan)
        raise ConvergenceFailure(
            f"root finder did not converge (worst residual {worst:.3g})", partial=result
        )
    return result
