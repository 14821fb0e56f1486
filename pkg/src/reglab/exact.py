"""Exact arithmetic on the projective line.

Scalars are :class:`fractions.Fraction` (the exact rational type) or
:class:`QuadraticSurd` values ``p + q*sqrt(d)``. Polynomials and rational
functions accept either kind of coefficient, as long as a single
computation never mixes two different quadratic fields.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from sympy import factorint

__all__ = [
    "ExactScalar", "QuadraticSurd", "surd", "to_exact", "parse_rational",
    "format_exact", "Poly", "RationalFunction", "PointP1", "INF",
    "MoebiusMap", "AllPointsFixed", "QuadraticRoots", "moebius_apply",
    "moebius_fixed_points", "cross_ratio_quadratic", "quadratic_roots",
    "sqrt_exact",
]

ExactScalar = Fraction


def to_exact(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: the exact pipeline must never silently round.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact scalar")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"``. Decimal points are refused."""
    s = text.strip()
    if not s or "." in s or "e" in s.lower():
        raise ValueError(f"not a rational literal: {text!r}")
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not a rational literal: {text!r}") from None
    if q == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(p, q)


def format_exact(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return f"{x}/1"
    return str(x)


@lru_cache(maxsize=4096)
def _squarefree_split(n: int) -> tuple[int, int]:
    """Return (k, m) with n = k*k*m and m square-free (sign carried by m)."""
    if n == 0:
        return 0, 0
    k, m = 1, (1 if n > 0 else -1)
    for prime, e in factorint(abs(n)).items():
        k *= prime ** (e // 2)
        if e % 2:
            m *= prime
    return k, m


@dataclass(frozen=True)
class QuadraticSurd:
    """The number ``p + q*sqrt(d)`` with ``d`` square-free, ``d != 1``, ``q != 0``.

    Negative ``d`` gives a non-real number; those support field arithmetic
    but not ordering. Use :func:`surd` to construct, which collapses to a
    Fraction when ``q == 0``.
    """

    p: Fraction
    q: Fraction
    d: int

    # arithmetic -------------------------------------------------------

    def _lift(self, other):
        if isinstance(other, QuadraticSurd):
            if other.d != self.d:
                raise ValueError(f"mixing Q(sqrt({self.d})) and Q(sqrt({other.d}))")
            return other.p, other.q
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return surd(self.p + o[0], self.q + o[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.p, -self.q, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return surd(self.p - o[0], self.q - o[1], self.d)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return surd(o[0] - self.p, o[1] - self.q, self.d)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        a, b = o
        return surd(self.p * a + self.q * b * self.d, self.p * b + self.q * a, self.d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadraticSurd":
        """Galois conjugate ``p - q*sqrt(d)``."""
        return QuadraticSurd(self.p, -self.q, self.d)

    def norm(self) -> Fraction:
        return self.p * self.p - self.q * self.q * self.d

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero surd")
        return surd(self.p / n, -self.q / n, self.d)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if o[1] == 0:
            if o[0] == 0:
                raise ZeroDivisionError("division by zero")
            return surd(self.p / o[0], self.q / o[0], self.d)
        return self * surd(o[0], o[1], self.d).inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return surd(o[0], o[1], self.d) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = Fraction(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # ordering (real surds only) ----------------------------------------

    @property
    def is_real(self) -> bool:
        return self.d > 0

    def sign(self) -> int:
        if not self.is_real:
            raise ValueError("sign of a non-real surd")
        sp = (self.p > 0) - (self.p < 0)
        sq = (self.q > 0) - (self.q < 0)
        if sp == sq or sp == 0:
            return sq
        # p and q*sqrt(d) have opposite signs: compare magnitudes squared
        lhs, rhs = self.p * self.p, self.q * self.q * self.d
        if lhs == rhs:
            return 0
        return sp if lhs > rhs else sq

    def _cmp(self, other) -> int:
        diff = self - other
        if isinstance(diff, Fraction):
            return (diff > 0) - (diff < 0)
        return diff.sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # conversions -------------------------------------------------------

    def __float__(self) -> float:
        if not self.is_real:
            raise TypeError("non-real surd has no float value")
        return float(self.p) + float(self.q) * math.sqrt(self.d)

    def __complex__(self) -> complex:
        if self.is_real:
            return complex(float(self))
        return complex(float(self.p), float(self.q) * math.sqrt(-self.d))

    def to_interval(self, ctx):
        """Enclosure in an mpmath interval context (real surds only)."""
        if not self.is_real:
            raise ValueError("interval enclosure of a non-real surd")
        return ctx.mpf(self.p) + ctx.mpf(self.q) * ctx.sqrt(self.d)

    def __str__(self) -> str:
        root = "i" if self.d == -1 else f"sqrt({self.d})"
        q = self.q
        if self.p == 0:
            return f"{_fmt(q)}*{root}"
        op = "+" if q > 0 else "-"
        return f"{_fmt(self.p)} {op} {_fmt(abs(q))}*{root}"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def surd(p, q, d: int):
    """Canonical ``p + q*sqrt(d)``; returns a Fraction when it is rational."""
    p, q = Fraction(p), Fraction(q)
    if q == 0 or d == 0:
        return p
    k, m = _squarefree_split(d)
    q *= k
    if m == 1:
        return p + q
    return QuadraticSurd(p, q, m)


def sqrt_exact(x: Fraction):
    """Exact square root of a rational as a Fraction or surd."""
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    # sqrt(n/m) = sqrt(n*m)/m
    return surd(0, Fraction(1, x.denominator), x.numerator * x.denominator)


def _is_zero(c) -> bool:
    return c == 0


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

Coeff = Union[Fraction, QuadraticSurd]


class Poly:
    """Univariate polynomial, coefficients lowest degree first.

    Instances are immutable and hashable. Trailing zeros are stripped, so
    the zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [c if isinstance(c, QuadraticSurd) else Fraction(c) for c in coeffs]
        while cs and _is_zero(cs[-1]):
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def const(cls, c) -> "Poly":
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Iterable) -> "Poly":
        out = cls((1,))
        for r in roots:
            out = out * cls((-r, 1))
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def is_rational(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction, QuadraticSurd)):
            return self.coeffs == Poly((other,)).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if _is_zero(c):
                continue
            cs = f"({c})" if isinstance(c, QuadraticSurd) else _fmt(c)
            mono = "" if k == 0 else ("y" if k == 1 else f"y^{k}")
            if mono and cs == "1":
                parts.append(mono)
            elif mono and cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(cs + ("*" + mono if mono else ""))
        return " + ".join(parts).replace("+ -", "- ")

    @staticmethod
    def _coerce(other) -> "Poly | None":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction, QuadraticSurd)) and not isinstance(other, bool):
            return Poly((other,))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly(self.coeff(k) + o.coeff(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.coeffs or not o.coeffs:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if _is_zero(a):
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = Poly((1,)), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = o.degree
        lead_inv = 1 / o.lead
        quo = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k]
            if _is_zero(c):
                continue
            t = c * lead_inv
            quo[k - dq] = t
            for j, b in enumerate(o.coeffs):
                rem[k - dq + j] = rem[k - dq + j] - t * b
        return Poly(quo), Poly(rem[:dq] if dq > 0 else ())

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x):
        """Horner evaluation at a scalar (exact or floating)."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_float(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + (complex(c) if isinstance(c, QuadraticSurd) and not c.is_real else float(c))
        return acc

    def derivative(self) -> "Poly":
        return Poly(k * c for k, c in enumerate(self.coeffs) if k)

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        inv = 1 / self.lead
        return Poly(c * inv for c in self.coeffs)

    def conjugate(self) -> "Poly":
        """Apply the Galois conjugation coefficient-wise."""
        return Poly(c.conjugate() if isinstance(c, QuadraticSurd) else c for c in self.coeffs)

    def compose_moebius(self, m: "MoebiusMap") -> tuple["Poly", int]:
        """Homogenised substitution: returns (P, n) with
        ``self((a y + b)/(c y + d)) = P(y) / (c y + d)**n``, ``n = deg self``."""
        n = self.degree
        num = Poly((m.b, m.a))
        den = Poly((m.d, m.c))
        out = Poly()
        for k, c in enumerate(self.coeffs):
            out = out + c * (num ** k) * (den ** (n - k))
        return out, n


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over the coefficient field."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def resultant(f: Poly, g: Poly) -> Coeff:
    """Sylvester resultant over a field, by the Euclidean recursion."""
    if f.is_zero() or g.is_zero():
        return Fraction(0)
    m, n = f.degree, g.degree
    if n == 0:
        return g.lead ** m
    if m == 0:
        return f.lead ** n
    if m < n:
        sign = -1 if (m * n) % 2 else 1
        return sign * resultant(g, f)
    r = f % g
    if r.is_zero():
        return Fraction(0)
    # Res(f, g) = (-1)^(mn) lc(g)^(m - deg r) Res(g, r)
    sign = -1 if (m * n) % 2 else 1
    return sign * (g.lead ** (m - r.degree)) * resultant(g, r)


def interpolate(xs: Sequence, ys: Sequence) -> Poly:
    """Lagrange interpolation through exact nodes."""
    out = Poly()
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        basis = Poly((1,))
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j != i:
                basis = basis * Poly((-xj, 1))
                denom = denom * (xi - xj)
        out = out + basis * (yi / denom)
    return out


# ---------------------------------------------------------------------------
# Points and Moebius maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointP1:
    """A point of the projective line as a normalised pair ``[x0 : x1]``.

    Finite points are stored as ``(value, 1)``, the point at infinity as
    ``(1, 0)``. Values may be exact (Fraction / QuadraticSurd) or
    approximate (float, complex, mpmath numbers), never both in one path.
    """

    x0: object
    x1: object

    def __post_init__(self):
        if _is_zero(self.x0) and _is_zero(self.x1):
            raise ValueError("[0 : 0] is not a point")
        if _is_zero(self.x1):
            object.__setattr__(self, "x0", 1)
            object.__setattr__(self, "x1", 0)
        elif not (self.x1 == 1):
            object.__setattr__(self, "x0", self.x0 / self.x1)
            object.__setattr__(self, "x1", 1)
        if isinstance(self.x0, int) and not _is_zero(self.x1):
            object.__setattr__(self, "x0", Fraction(self.x0))

    @classmethod
    def finite(cls, value) -> "PointP1":
        if isinstance(value, int) and not isinstance(value, bool):
            value = Fraction(value)
        return cls(value, 1)

    @classmethod
    def infinity(cls) -> "PointP1":
        return cls(1, 0)

    @property
    def is_infinite(self) -> bool:
        return _is_zero(self.x1)

    @property
    def value(self):
        if self.is_infinite:
            raise ValueError("point at infinity has no affine value")
        return self.x0

    @property
    def is_exact(self) -> bool:
        return self.is_infinite or isinstance(self.x0, (Fraction, QuadraticSurd))

    def __str__(self):
        return "oo" if self.is_infinite else str(self.x0)

    def __repr__(self):
        return f"PointP1({self})"

    def sort_key(self):
        if self.is_infinite:
            return (2, 0.0, 0.0)
        v = complex(self.x0) if not isinstance(self.x0, (Fraction, int)) else complex(float(self.x0))
        return (1, v.real, v.imag)


INF = PointP1.infinity()


def _as_point(p) -> PointP1:
    return p if isinstance(p, PointP1) else PointP1.finite(p)


class AllPointsFixed(ValueError):
    """Raised when asking for the fixed points of the identity map."""


@dataclass(frozen=True)
class MoebiusMap:
    """``y -> (a y + b) / (c y + d)`` with ``ad - bc != 0``."""

    a: object
    b: object
    c: object
    d: object

    def __post_init__(self):
        for name in "abcd":
            v = getattr(self, name)
            if isinstance(v, int) and not isinstance(v, bool):
                object.__setattr__(self, name, Fraction(v))
        if _is_zero(self.det):
            raise ValueError("degenerate Moebius map (ad - bc = 0)")

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def translation(cls, shift) -> "MoebiusMap":
        return cls(1, shift, 0, 1)

    @classmethod
    def scaling(cls, factor) -> "MoebiusMap":
        return cls(factor, 0, 0, 1)

    @classmethod
    def inversion(cls) -> "MoebiusMap":
        return cls(0, 1, 1, 0)

    @classmethod
    def ratio(cls, zero, pole) -> "MoebiusMap":
        """``y -> (y - zero) / (y - pole)``, the shape of the g-functions."""
        return cls(1, -zero, 1, -pole)

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        """Composition ``self o other``."""
        return MoebiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __pow__(self, n: int) -> "MoebiusMap":
        base = self if n >= 0 else self.inverse()
        out = MoebiusMap.identity()
        for _ in range(abs(n)):
            out = base @ out
        return out

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def is_identity(self) -> bool:
        return _is_zero(self.b) and _is_zero(self.c) and self.a == self.d

    def __call__(self, p):
        return moebius_apply(self, _as_point(p))

    def as_rational_function(self) -> "RationalFunction":
        return RationalFunction(Poly((self.b, self.a)), Poly((self.d, self.c)))


def moebius_apply(m: MoebiusMap, p: PointP1) -> PointP1:
    """Projective action on ``[x0 : x1]``; total on the projective line."""
    p = _as_point(p)
    map_exact = all(isinstance(v, (Fraction, QuadraticSurd)) for v in (m.a, m.b, m.c, m.d))
    if not p.is_infinite and p.is_exact != map_exact:
        raise TypeError("exact and approximate values mixed in one computation")
    x0, x1 = p.x0, p.x1
    return PointP1(m.a * x0 + m.b * x1, m.c * x0 + m.d * x1)


def moebius_fixed_points(m: MoebiusMap) -> frozenset:
    """Fixed points of a non-identity map: one (parabolic) or two."""
    if m.is_identity():
        raise AllPointsFixed("identity map fixes every point")
    # c y^2 + (d - a) y - b = 0, projectively
    if _is_zero(m.c):
        pts = {INF}
        if not _is_zero(m.d - m.a):
            pts.add(PointP1.finite(m.b / (m.d - m.a)))
        return frozenset(pts)
    roots = quadratic_roots(Poly((-m.b, m.d - m.a, m.c)))
    return frozenset({PointP1.finite(roots.root_low), PointP1.finite(roots.root_high)})


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------

class RationalFunction:
    """Reduced quotient ``num / den`` with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = num if isinstance(num, Poly) else Poly((num,))
        den = Poly((1,)) if den is None else (den if isinstance(den, Poly) else Poly((den,)))
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = Poly(), Poly((1,))
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
            lc = den.lead
            if not (lc == 1):
                inv = 1 / lc
                num, den = num * inv, den * inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @classmethod
    def y(cls) -> "RationalFunction":
        return cls(Poly.x())

    @classmethod
    def const(cls, c) -> "RationalFunction":
        return cls(Poly((c,)))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant function")
        return self.num.coeff(0)

    def is_unit(self) -> bool:
        return self.is_constant() and self.num.coeff(0) == 1

    @property
    def degree(self) -> int:
        return max(self.num.degree, self.den.degree)

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, QuadraticSurd)):
            return self == RationalFunction.const(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalFunction(({self.num}) / ({self.den}))"

    def __str__(self):
        if self.den == Poly((1,)):
            return str(self.num)
        return f"({self.num})/({self.den})"

    @staticmethod
    def _coerce(other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Poly):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction, QuadraticSurd)) and not isinstance(other, bool):
            return RationalFunction.const(other)
        return None

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_constant() and o.is_constant():
            return RationalFunction.const(self.num.coeff(0) * o.num.coeff(0))
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __pow__(self, n: int):
        if self.is_constant() and not self.is_zero():
            return RationalFunction.const(self.num.coeff(0) ** n)
        if n >= 0:
            return RationalFunction(self.num ** n, self.den ** n)
        if self.is_zero():
            raise ZeroDivisionError("negative power of the zero function")
        return RationalFunction(self.den ** (-n), self.num ** (-n))

    def value_at(self, p) -> PointP1:
        """Value at a point of the projective line, ``oo`` at poles."""
        p = _as_point(p)
        if p.is_infinite:
            dn, dd = self.num.degree, self.den.degree
            if dn > dd:
                return INF
            if dn < dd:
                return PointP1.finite(Fraction(0))
            return PointP1.finite(self.num.lead / self.den.lead)
        v = p.value
        den = self.den(v)
        if _is_zero(den):
            return INF
        return PointP1.finite(self.num(v) / den)

    def __call__(self, y):
        """Affine value; raises at poles. ``y`` may be ``INF``."""
        out = self.value_at(y)
        if out.is_infinite:
            raise ZeroDivisionError(f"pole at {y}")
        return out.value

    def compose_moebius(self, m: MoebiusMap) -> "RationalFunction":
        pn, n = self.num.compose_moebius(m)
        pd, k = self.den.compose_moebius(m)
        lin = Poly((m.d, m.c))
        if n >= k:
            return RationalFunction(pn, pd * lin ** (n - k))
        return RationalFunction(pn * lin ** (k - n), pd)


# ---------------------------------------------------------------------------
# Quadratics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticRoots:
    """Exact roots of a rational quadratic.

    Real roots are ordered ``root_low <= root_high``; a complex-conjugate
    pair is stored with ``root_low`` having negative imaginary part and
    ``is_complex`` set.
    """

    root_low: object
    root_high: object
    is_complex: bool = False

    @property
    def is_double(self) -> bool:
        return self.root_low == self.root_high

    def swapped(self) -> "QuadraticRoots":
        return QuadraticRoots(self.root_high, self.root_low, self.is_complex)

    def as_tuple(self) -> tuple:
        return (self.root_low, self.root_high)

    def expand(self) -> Poly:
        """The monic quadratic with these roots."""
        return Poly.from_roots(self.as_tuple())


def cross_ratio_quadratic(a, b, c) -> Poly:
    """Cleared form of ``(y-a-1)/(y-a) = (y-b-1)(y-c-1)/((y-b)(y-c))``.

    The cubic terms cancel, leaving a monic quadratic.
    """
    a, b, c = (to_exact(t) if not isinstance(t, QuadraticSurd) else t for t in (a, b, c))

    def lin(r):
        return Poly((-r, 1))

    lhs = lin(a + 1) * lin(b) * lin(c)
    rhs = lin(a) * lin(b + 1) * lin(c + 1)
    q = lhs - rhs
    assert q.degree == 2 and q.lead == 1, q
    return q


def quadratic_roots(q: Poly) -> QuadraticRoots:
    """Roots of a degree-2 polynomial with rational coefficients, exactly."""
    if q.degree != 2:
        raise ValueError(f"expected a quadratic, got degree {q.degree}")
    if not q.is_rational():
        raise ValueError("quadratic_roots needs rational coefficients")
    c0, c1, c2 = q.coeffs
    disc = c1 * c1 - 4 * c2 * c0
    centre = -c1 / (2 * c2)
    half = Fraction(1) / (2 * abs(c2))
    if disc == 0:
        return QuadraticRoots(centre, centre)
    root = sqrt_exact(disc) if disc > 0 else sqrt_exact(-disc)
    if disc > 0:
        lo, hi = centre - half * root, centre + half * root
        if lo > hi:
            lo, hi = hi, lo
        return QuadraticRoots(lo, hi)
    # sqrt(disc) = i * sqrt(-disc) = sqrt(-1) * root
    if isinstance(root, Fraction):
        im = surd(0, root * half, -1)
    else:
        im = surd(0, root.q * half, -root.d)
    return QuadraticRoots(centre - im, centre + im, is_complex=True)
