"""Exact sparse multivariate polynomials over the rationals.

A :class:`Poly` is an immutable map from exponent tuples to rational
coefficients.  Coefficients are Python ``int`` or ``fractions.Fraction``
(integral fractions are stored as ``int``, which keeps the common
integer-coefficient case fast).  Bivariate polynomials use the variables
``x, y``; homogenized ones add ``z``.

Term order everywhere is graded lexicographic with ``x > y > z``.
"""

from __future__ import annotations

import random
import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegenerateInput, DivisorZero, ParseError, ZeroPolynomial

VARIABLES = ("x", "y", "z")


def _coerce(c):
    if isinstance(c, bool):
        c = int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return _coerce(Fraction(c.numerator, c.denominator))
    raise TypeError(f"polynomial coefficients must be rational, got {type(c).__name__}")


def _grlex_key(exps):
    return (sum(exps), exps)


def _format_rational(c):
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


class Poly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, terms: Mapping[tuple, object] | Iterable = (), nvars: int = 2):
        self.nvars = nvars
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean = {}
        for exps, c in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or min(exps, default=0) < 0:
                raise ValueError(f"bad exponent tuple {exps} for {nvars} variables")
            c = _coerce(c)
            if c:
                c = clean.get(exps, 0) + c
                if c:
                    clean[exps] = _coerce(c)
                else:
                    clean.pop(exps, None)
        self._terms = clean
        self._hash = None

    # -- construction helpers -------------------------------------------

    @classmethod
    def _raw(cls, terms, nvars):
        # Trusted constructor: terms already canonical (no zeros, coerced).
        p = cls.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, c, nvars=2):
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def variable(cls, index, nvars=2):
        exps = [0] * nvars
        exps[index] = 1
        return cls({tuple(exps): 1}, nvars)

    @classmethod
    def zero(cls, nvars=2):
        return cls._raw({}, nvars)

    # -- basic queries ----------------------------------------------------

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self):
        return not self._terms

    @property
    def degree(self):
        """Total degree; the zero polynomial has degree -1."""
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def degree_in(self, var: int):
        if not self._terms:
            return -1
        return max(e[var] for e in self._terms)

    def coefficient(self, exps):
        return self._terms.get(tuple(exps), 0)

    def is_constant(self):
        return self.degree <= 0

    def constant_value(self):
        return self._terms.get((0,) * self.nvars, 0)

    def is_homogeneous(self):
        return len({sum(e) for e in self._terms}) <= 1

    def leading_term(self):
        exps = max(self._terms, key=_grlex_key)
        return exps, self._terms[exps]

    # -- comparisons ------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.constant(other, self.nvars)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- arithmetic -------------------------------------------------------

    def _lift(self, other):
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return Poly.constant(other, self.nvars)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = _coerce(s)
            else:
                out.pop(e, None)
        return Poly._raw(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({e: -c for e, c in self._terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = _coerce(other)
            if not c:
                return Poly.zero(self.nvars)
            return Poly._raw({e: _coerce(v * c) for e, v in self._terms.items()}, self.nvars)
        if other.nvars != self.nvars:
            raise ValueError("variable count mismatch")
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly._raw({e: _coerce(c) for e, c in out.items() if c}, self.nvars)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Poly):
            if not other.is_constant() or other.is_zero():
                raise TypeError("division only by nonzero constants; use exact_divide")
            other = other.constant_value()
        other = _coerce(other)
        if not other:
            raise DivisorZero("division by zero constant")
        return self * (Fraction(1) / other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = Poly.constant(1, self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- calculus and substitution ---------------------------------------

    def diff(self, var: int, times: int = 1):
        """Formal partial derivative with respect to variable index ``var``."""
        terms = self._terms
        for _ in range(times):
            out = {}
            for e, c in terms.items():
                k = e[var]
                if k:
                    ne = e[:var] + (k - 1,) + e[var + 1:]
                    out[ne] = c * k
            terms = out
        return Poly._raw(terms, self.nvars)

    def evaluate(self, point: Sequence):
        """Horner evaluation at ``point``; exact for rational inputs.

        Works for any coordinate type supporting ``+`` and ``*``
        (``Fraction``, ``complex``, numpy arrays).
        """
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates")
        return _horner(self._terms, list(point), 0, self.nvars)

    __call__ = evaluate

    def compose(self, subs: Sequence["Poly"]):
        """Substitute polynomials (all in the same ring) for each variable."""
        if len(subs) != self.nvars:
            raise ValueError("need one substitution per variable")
        nv = subs[0].nvars
        powers = [[Poly.constant(1, nv)] for _ in subs]
        result = Poly.zero(nv)
        for e, c in self._terms.items():
            term = Poly.constant(c, nv)
            for v, k in enumerate(e):
                pw = powers[v]
                while len(pw) <= k:
                    pw.append(pw[-1] * subs[v])
                if k:
                    term = term * pw[k]
            result = result + term
        return result

    def coefficients_in(self, var: int):
        """Coefficients (ascending) as polynomials free of ``var``."""
        deg = self.degree_in(var)
        out = [dict() for _ in range(max(deg, 0) + 1)]
        for e, c in self._terms.items():
            out[e[var]][e[:var] + (0,) + e[var + 1:]] = c
        return [Poly._raw(t, self.nvars) for t in out]

    def univariate_coeffs(self):
        """Ascending coefficient list of a polynomial in at most one variable."""
        used = {v for e in self._terms for v in range(self.nvars) if e[v]}
        if len(used) > 1:
            raise ValueError("polynomial involves more than one variable")
        var = used.pop() if used else 0
        coeffs = [0] * (max(self.degree, 0) + 1)
        for e, c in self._terms.items():
            coeffs[e[var]] = c
        return coeffs

    def drop_variable(self, var: int):
        """Remove a variable absent from every term."""
        if any(e[var] for e in self._terms):
            raise ValueError("variable still present")
        return Poly._raw({e[:var] + e[var + 1:]: c for e, c in self._terms.items()}, self.nvars - 1)

    def numeric(self):
        """Return a fast float/complex evaluator ``f(*coords)``."""
        if not self._terms:
            return lambda *pt: 0.0 * pt[0]
        exps = np.array(list(self._terms.keys()), dtype=int)
        coefs = np.array([float(c) for c in self._terms.values()])

        def evaluate(*pt):
            acc = 0.0
            for e, c in zip(exps, coefs):
                t = c
                for v, k in enumerate(e):
                    if k:
                        t = t * pt[v] ** int(k)
                acc = acc + t
            return acc

        return evaluate

    # -- printing ---------------------------------------------------------

    def to_string(self, names: Sequence[str] = VARIABLES):
        if not self._terms:
            return "0"
        parts = []
        for e in sorted(self._terms, key=_grlex_key, reverse=True):
            c = Fraction(self._terms[e])
            mono = "*".join(
                names[v] if k == 1 else f"{names[v]}^{k}" for v, k in enumerate(e) if k
            )
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = _format_rational(a)
            elif a == 1:
                body = mono
            else:
                body = f"{_format_rational(a)}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"Poly({self.to_string()!r}, nvars={self.nvars})"


def _horner(terms, point, var, nvars):
    if var == nvars - 1:
        if not terms:
            return 0
        deg = max(e[var] for e in terms)
        by_power = {e[var]: c for e, c in terms.items()}
        acc = by_power.get(deg, 0)
        x = point[var]
        for k in range(deg - 1, -1, -1):
            acc = acc * x + by_power.get(k, 0)
        return acc
    groups = {}
    for e, c in terms.items():
        groups.setdefault(e[var], {})[e] = c
    if not groups:
        return 0
    deg = max(groups)
    x = point[var]
    acc = 0
    for k in range(deg, -1, -1):
        inner = _horner(groups[k], point, var + 1, nvars) if k in groups else 0
        acc = acc * x + inner
    return acc


X = Poly.variable(0)
Y = Poly.variable(1)


# -- parsing --------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")


class _Parser:
    # expr := ['+'|'-'] term (('+'|'-') term)*
    # term := power (('*'|'/') power | power)*   (juxtaposition only as int followed by a name, "2x")
    # power := atom ['^' int]
    # atom := int | variable | '(' expr ')'

    def __init__(self, text, names):
        self.text = text
        self.names = list(names)
        self.nvars = len(names)
        self.tokens = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m or m.end() == pos:
                raise ParseError("unexpected character", text, pos)
            start = m.start(m.lastindex)
            kind = ("int", "name", "op")[m.lastindex - 1]
            value = m.group(m.lastindex)
            if value == "**":
                value = "^"
            self.tokens.append((kind, value, start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, message):
        raise ParseError(message, self.text, self.peek()[2])

    def parse(self):
        if not self.tokens:
            raise ParseError("empty polynomial", self.text, 0)
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail("unexpected token")
        return p

    def expr(self):
        sign = 1
        if self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        p = self.term() * sign
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.power()
        while self.peek()[1] in ("*", "/") or self._implicit_product():
            op = "*" if self.peek()[0] == "name" else self.take()[1]
            q = self.power()
            if op == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    raise ParseError("division only by a nonzero constant", self.text, self.tokens[self.i - 1][2])
                p = p * (Fraction(1) / Fraction(q.constant_value()))
        return p

    def _implicit_product(self):
        return self.peek()[0] == "name" and self.i > 0 and self.tokens[self.i - 1][0] == "int"

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, value, _ = self.peek()
            if kind != "int":
                self.fail("expected non-negative integer exponent")
            self.take()
            base = base ** int(value)
        return base

    def atom(self):
        kind, value, pos = self.peek()
        if kind == "int":
            self.take()
            return Poly.constant(int(value), self.nvars)
        if kind == "name":
            if value not in self.names:
                self.fail(f"unknown variable {value!r}")
            self.take()
            return Poly.variable(self.names.index(value), self.nvars)
        if value == "(":
            self.take()
            p = self.expr()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.take()
            return p
        self.fail("expected number, variable or '('")


def parse_poly(text: str, variables: Sequence[str] = ("x", "y")) -> Poly:
    """Parse a polynomial with exact rational coefficients.

    >>> str(parse_poly("x*y^3/2 - 3/4"))
    '1/2*x*y^3 - 3/4'
    """
    return _Parser(text, variables).parse()


# -- homogenization ---------------------------------------------------------


def homogenize(p: Poly) -> Poly:
    """Append a variable so that every monomial has degree ``p.degree``."""
    if p.is_zero():
        raise ZeroPolynomial("cannot homogenize the zero polynomial")
    d = p.degree
    return Poly._raw({e + (d - sum(e),): c for e, c in p.items()}, p.nvars + 1)


def dehomogenize(P: Poly) -> Poly:
    """Set the last variable to 1."""
    out = {}
    for e, c in P.items():
        k = e[:-1]
        out[k] = out.get(k, 0) + c
    return Poly({k: c for k, c in out.items()}, P.nvars - 1)


# -- division ---------------------------------------------------------------


def divmod_poly(p: Poly, f: Poly):
    """Graded-lex division of ``p`` by the single divisor ``f``.

    Returns ``(q, r)`` with ``p = q*f + r`` and no term of ``r`` divisible
    by the leading term of ``f``.  For one divisor the remainder is the
    unique normal form modulo the principal ideal ``(f)``.
    """
    if f.is_zero():
        raise DivisorZero("division by the zero polynomial")
    lt_e, lt_c = f.leading_term()
    inv = Fraction(1) / Fraction(lt_c)
    f_rest = [(e, c) for e, c in f.items() if e != lt_e]
    work = dict(p._terms)
    quot = {}
    rem = {}
    while work:
        e = max(work, key=_grlex_key)
        c = work.pop(e)
        shift = tuple(a - b for a, b in zip(e, lt_e))
        if min(shift) < 0:
            rem[e] = c
            continue
        qc = _coerce(c * inv)
        quot[shift] = qc
        for fe, fc in f_rest:
            ne = tuple(a + b for a, b in zip(shift, fe))
            v = work.get(ne, 0) - qc * fc
            if v:
                work[ne] = _coerce(v)
            else:
                work.pop(ne, None)
    return Poly._raw(quot, p.nvars), Poly._raw(rem, p.nvars)


def reduce_mod(p: Poly, f: Poly) -> Poly:
    """Normal form of ``p`` modulo ``f``."""
    return divmod_poly(p, f)[1]


def exact_divide(p: Poly, f: Poly):
    """Return ``q`` with ``p == q*f`` or ``None`` if ``f`` does not divide ``p``."""
    q, r = divmod_poly(p, f)
    return q if r.is_zero() else None


# -- resultants -------------------------------------------------------------


def sylvester_matrix(p: Poly, q: Poly, var: int):
    pc = p.coefficients_in(var)[::-1]
    qc = q.coefficients_in(var)[::-1]
    m, n = len(pc) - 1, len(qc) - 1
    zero = Poly.zero(p.nvars)
    size = m + n
    rows = []
    for i in range(n):
        rows.append([zero] * i + pc + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + qc + [zero] * (size - n - 1 - i))
    return rows


def _bareiss_det(matrix):
    a = [row[:] for row in matrix]
    n = len(a)
    if n == 0:
        return None
    nvars = a[0][0].nvars
    sign = 1
    prev = Poly.constant(1, nvars)
    for k in range(n - 1):
        if a[k][k].is_zero():
            for r in range(k + 1, n):
                if not a[r][k].is_zero():
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return Poly.zero(nvars)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                if prev.is_constant():
                    a[i][j] = num / prev.constant_value()
                else:
                    quotient = exact_divide(num, prev)
                    if quotient is None:
                        raise ArithmeticError("inexact Bareiss step")
                    a[i][j] = quotient
            a[i][k] = Poly.zero(nvars)
        prev = a[k][k]
    return a[n - 1][n - 1] * sign


def resultant(p: Poly, q: Poly, var: int = 1) -> Poly:
    """Sylvester resultant eliminating variable index ``var``.

    The result lives in the same ring with ``var`` absent.
    """
    if p.is_zero() or q.is_zero():
        raise DegenerateInput("resultant of the zero polynomial")
    if p.degree_in(var) < 1 or q.degree_in(var) < 1:
        raise DegenerateInput("both polynomials need positive degree in the eliminated variable")
    return _bareiss_det(sylvester_matrix(p, q, var))


# -- random polynomials -----------------------------------------------------


def random_poly(rng: random.Random, max_degree: int, nvars: int = 2, coeff_range: int = 5,
                density: float = 0.7, denominators: Sequence[int] = (1, 1, 1, 2, 3)) -> Poly:
    """Random polynomial of total degree <= ``max_degree`` with small rational coefficients."""
    terms = {}
    for d in range(max_degree + 1):
        for exps in _monomials(d, nvars):
            if rng.random() < density:
                num = rng.randint(-coeff_range, coeff_range)
                terms[exps] = Fraction(num, rng.choice(denominators))
    return Poly(terms, nvars)


def _monomials(d, nvars):
    if nvars == 1:
        yield (d,)
        return
    for k in range(d, -1, -1):
        for rest in _monomials(d - k, nvars - 1):
            yield (k,) + rest
