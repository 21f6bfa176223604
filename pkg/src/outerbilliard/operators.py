"""Differential operators attached to an invariant function ``F(x, y)``.

``v = (F_y, -F_x)`` is the symplectic gradient, tangent to the level
curves of ``F``.  Moving along the tangent line, ``F(x + e*F_y, y - e*F_x)``
is a polynomial in ``e``; its coefficients are exposed by
:func:`epsilon_expansion`.  The cubic coefficient is ``W(F)/6`` and the
quadratic one is ``H(F)/2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

from .polycore import Poly, exact_divide

_X, _Y = 0, 1


@dataclass(frozen=True)
class VectorFieldPair:
    dx_component: Poly
    dy_component: Poly


@dataclass(frozen=True)
class EpsilonExpansion:
    coefficients: tuple
    order: int

    def __getitem__(self, k):
        return self.coefficients[k]

    def odd(self):
        return [(k, c) for k, c in enumerate(self.coefficients) if k % 2 == 1]


def symplectic_gradient(F: Poly) -> VectorFieldPair:
    return VectorFieldPair(F.diff(_Y), -F.diff(_X))


def apply_field(v: VectorFieldPair, p: Poly) -> Poly:
    """Derivative of ``p`` along the vector field ``v``."""
    return v.dx_component * p.diff(_X) + v.dy_component * p.diff(_Y)


def epsilon_expansion(F: Poly, K: int = 7) -> EpsilonExpansion:
    """Coefficients ``c_0..c_K`` of ``F(x + e*F_y, y - e*F_x)`` in powers of ``e``.

    The displacement ``(F_y, -F_x)`` is frozen at the base point, so
    ``c_k = (1/k!) * sum_i C(k, i) d^k F/dx^i dy^(k-i) * F_y^i * (-F_x)^(k-i)``.
    """
    if K < 3:
        raise ValueError("expansion order must be at least 3")
    a, b = F.diff(_Y), -F.diff(_X)
    pow_a, pow_b = [Poly.constant(1, F.nvars)], [Poly.constant(1, F.nvars)]
    for _ in range(K):
        pow_a.append(pow_a[-1] * a)
        pow_b.append(pow_b[-1] * b)
    coeffs = [F]
    for k in range(1, K + 1):
        total = Poly.zero(F.nvars)
        if k <= max(F.degree, 0):
            for i in range(k + 1):
                partial = F.diff(_X, i).diff(_Y, k - i)
                if partial:
                    total = total + partial * pow_a[i] * pow_b[k - i] * comb(k, i)
        coeffs.append(total / factorial(k))
    return EpsilonExpansion(tuple(coeffs), K)


def w_operator(F: Poly) -> Poly:
    """``F_xxx F_y^3 - 3 F_xxy F_y^2 F_x + 3 F_xyy F_y F_x^2 - F_yyy F_x^3``."""
    fx, fy = F.diff(_X), F.diff(_Y)
    fxxx = F.diff(_X, 3)
    fxxy = F.diff(_X, 2).diff(_Y)
    fxyy = F.diff(_X).diff(_Y, 2)
    fyyy = F.diff(_Y, 3)
    return (fxxx * fy ** 3 - fxxy * fy ** 2 * fx * 3
            + fxyy * fy * fx ** 2 * 3 - fyyy * fx ** 3)


def h_operator(F: Poly) -> Poly:
    """Determinant of ``[[F_y, -F_x], [F_yy F_x - F_xy F_y, F_xx F_y - F_xy F_x]]``."""
    fx, fy = F.diff(_X), F.diff(_Y)
    fxx, fxy, fyy = F.diff(_X, 2), F.diff(_X).diff(_Y), F.diff(_Y, 2)
    top_left, top_right = fy, -fx
    bottom_left = fyy * fx - fxy * fy
    bottom_right = fxx * fy - fxy * fx
    return top_left * bottom_right - top_right * bottom_left


def check_vh_equals_w(F: Poly) -> bool:
    """Exact check that the derivative of H(F) along v equals W(F)."""
    return (apply_field(symplectic_gradient(F), h_operator(F)) - w_operator(F)).is_zero()


def check_h_scaling(f: Poly, g: Poly) -> bool:
    """Exact check that ``H(g*f) - g^3 H(f)`` is a multiple of ``f``."""
    diff = h_operator(g * f) - g ** 3 * h_operator(f)
    return exact_divide(diff, f) is not None
