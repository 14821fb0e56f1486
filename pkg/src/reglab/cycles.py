"""Divisors and K1-type precycles ``sum_j (f_j, D_j)`` on unions of rational curves.

Every component is a copy of the projective line with its own affine
coordinate. Points shared between components (intersection points of the
ambient surface) are recorded as named *markers*; a divisor place sitting on
a marker is identified across components by the marker name.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

import numpy as np
import sympy

from .exact import (
    INF, Poly, PointP1, QuadraticSurd, RationalFunction, format_exact,
    interpolate, poly_gcd, quadratic_roots, resultant, surd,
)

__all__ = [
    "Place", "Divisor", "CurveComponent", "Term", "ChowPrecycle", "FiniteMapP1",
    "UnsupportedFactorization", "PushforwardError", "poly_roots", "rf_divisor",
    "validate_closure", "mark_closed", "group_law_merge", "norm_pushforward",
    "project_prestable", "product_cycle", "component_constants",
    "precycle_to_json", "precycle_from_json", "divisor_to_json",
]

COMPONENT_KINDS = ("rational-line", "section-C", "fiber", "exceptional")


class UnsupportedFactorization(ValueError):
    """The roots of a polynomial leave the quadratic-surd world."""


class PushforwardError(ValueError):
    pass


class Place(NamedTuple):
    component: str
    point: Union[PointP1, str]


class Divisor:
    """Finite formal sum of places with nonzero integer multiplicities."""

    __slots__ = ("_support",)

    def __init__(self, support: Mapping[Place, int] | Iterable[tuple[Place, int]] = ()):
        items = support.items() if isinstance(support, Mapping) else support
        acc: Counter = Counter()
        for place, mult in items:
            acc[Place(*place)] += int(mult)
        object.__setattr__(self, "_support", {p: m for p, m in acc.items() if m})

    def __setattr__(self, name, value):
        raise AttributeError("Divisor is immutable")

    @property
    def support(self) -> dict:
        return dict(self._support)

    def __iter__(self):
        return iter(self._support.items())

    def __len__(self):
        return len(self._support)

    def __bool__(self):
        return bool(self._support)

    def is_zero(self) -> bool:
        return not self._support

    def degree(self) -> int:
        return sum(self._support.values())

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor(list(self._support.items()) + list(other._support.items()))

    def __neg__(self) -> "Divisor":
        return Divisor({p: -m for p, m in self._support.items()})

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __mul__(self, n: int) -> "Divisor":
        return Divisor({p: n * m for p, m in self._support.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Divisor):
            return NotImplemented
        return self._support == other._support

    def __hash__(self):
        return hash(frozenset(self._support.items()))

    def relabel(self, component: str) -> "Divisor":
        return Divisor({Place(component, p.point): m for p, m in self._support.items()})

    def __repr__(self):
        parts = [f"{m:+d}*({p.component}:{p.point})" for p, m in
                 sorted(self._support.items(), key=lambda kv: _place_key(kv[0]))]
        return "Divisor(" + " ".join(parts) + ")"


def _place_key(place: Place):
    pt = place.point
    if isinstance(pt, str):
        return (place.component, 0, pt, (0, 0.0, 0.0))
    return (place.component, 1, "", pt.sort_key())


@dataclass(frozen=True)
class CurveComponent:
    id: str
    kind: str = "rational-line"
    markers: tuple = ()

    def __post_init__(self):
        if self.kind not in COMPONENT_KINDS:
            raise ValueError(f"unknown component kind {self.kind!r}")
        markers = tuple((name, p if isinstance(p, PointP1) else PointP1.finite(p))
                        for name, p in (self.markers.items() if isinstance(self.markers, dict)
                                        else self.markers))
        names = [n for n, _ in markers]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate marker names on {self.id}")
        object.__setattr__(self, "markers", markers)

    def marker(self, name: str) -> PointP1:
        for n, p in self.markers:
            if n == name:
                return p
        raise KeyError(name)

    def marker_at(self, point: PointP1):
        for n, p in self.markers:
            if p == point:
                return n
        return None


@dataclass(frozen=True)
class FiniteMapP1:
    """Finite map between rational components, ``x = map(y)``."""

    map: RationalFunction
    degree: int = field(default=0)

    def __post_init__(self):
        d = self.map.degree
        if d < 1:
            raise ValueError("a constant map is not finite")
        if self.degree and self.degree != d:
            raise ValueError(f"declared degree {self.degree} but the map has degree {d}")
        object.__setattr__(self, "degree", d)

    @classmethod
    def identity(cls) -> "FiniteMapP1":
        return cls(RationalFunction.y())

    def image(self, p: PointP1) -> PointP1:
        return self.map.value_at(p)


@dataclass(frozen=True)
class Term:
    """``coeff * (function, D)`` where ``D`` is the sum of ``components``."""

    function: RationalFunction
    components: tuple
    coeff: int = 1

    def __post_init__(self):
        if not isinstance(self.function, RationalFunction):
            object.__setattr__(self, "function", RationalFunction.const(self.function))
        if self.function.is_zero():
            raise ValueError("a precycle term cannot carry the zero function")
        comps = self.components
        if isinstance(comps, CurveComponent):
            comps = (comps,)
        object.__setattr__(self, "components", tuple(comps))


@dataclass(frozen=True)
class ChowPrecycle:
    terms: tuple = ()
    closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def __add__(self, other: "ChowPrecycle") -> "ChowPrecycle":
        return ChowPrecycle(self.terms + other.terms)

    def __neg__(self) -> "ChowPrecycle":
        return ChowPrecycle(tuple(Term(t.function, t.components, -t.coeff) for t in self.terms))

    def components(self) -> dict:
        out = {}
        for t in self.terms:
            for c in t.components:
                if c.id in out and out[c.id] != c:
                    raise ValueError(f"two different components labelled {c.id!r}")
                out[c.id] = c
        return out


# ---------------------------------------------------------------------------
# Root finding and divisors
# ---------------------------------------------------------------------------

def _sqrt_in_field(x, d: int | None = None):
    """Square root of ``x`` inside Q or Q(sqrt d), else None."""
    if isinstance(x, Fraction):
        if x < 0 and (d is None or d > 0):
            return None
        r = surd(0, Fraction(1, x.denominator), x.numerator * x.denominator) if x else x
        if isinstance(r, Fraction) or (d is not None and r.d == d):
            return r
        return None
    # (u + v sqrt d)^2 = u^2 + d v^2 + 2 u v sqrt d
    s, t, d = x.p, x.q, x.d
    rn = _sqrt_in_field(s * s - d * t * t)
    if rn is None:
        return None
    for u2 in ((s + rn) / 2, (s - rn) / 2):
        u = _sqrt_in_field(u2)
        if u is not None and u != 0:
            cand = surd(u, t / (2 * u), d)
            if cand * cand == x:
                return cand
    return None


def _linear_root(p: Poly):
    return -p.coeff(0) / p.coeff(1)


def _roots_rational(p: Poly) -> list:
    if p.degree <= 0:
        return []
    if p.degree == 1:
        return [(_linear_root(p), 1)]
    if p.degree == 2:
        r = quadratic_roots(p)
        if r.is_double:
            return [(r.root_low, 2)]
        return [(r.root_low, 1), (r.root_high, 1)]
    expr = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(p.coeffs)],
                      sympy.Symbol("t"), domain="QQ")
    out = []
    for factor, mult in expr.factor_list()[1]:
        if factor.degree() > 2:
            raise UnsupportedFactorization(f"irreducible factor of degree {factor.degree()}")
        fp = Poly(Fraction(int(c.p), int(c.q)) for c in reversed(factor.all_coeffs()))
        out.extend((r, m * mult) for r, m in _roots_rational(fp))
    return out


def poly_roots(p: Poly) -> list:
    """Exact roots with multiplicity of a polynomial over Q or Q(sqrt d)."""
    if p.is_zero():
        raise ValueError("roots of the zero polynomial")
    if p.is_rational():
        return _roots_rational(p)
    if p.degree == 1:
        return [(_linear_root(p), 1)]
    g = poly_gcd(p, p.conjugate())
    if g.degree > 0:
        rest = p // g
        g_rat = Poly(c for c in g.coeffs)
        if not g_rat.is_rational():
            raise UnsupportedFactorization("conjugate-stable factor is not rational")
        # roots of g appear in p with at least the multiplicity found here
        return _merge_roots(_roots_rational(g_rat) + poly_roots(rest))
    if p.degree == 2:
        c0, c1, c2 = p.coeffs
        disc = c1 * c1 - 4 * c2 * c0
        field_d = next(c.d for c in p.coeffs if isinstance(c, QuadraticSurd))
        root = _sqrt_in_field(disc, field_d)
        if root is None:
            raise UnsupportedFactorization("discriminant is not a square in the coefficient field")
        if root == 0:
            return [(-c1 / (2 * c2), 2)]
        return [((-c1 - root) / (2 * c2), 1), ((-c1 + root) / (2 * c2), 1)]
    raise UnsupportedFactorization(f"degree {p.degree} over a quadratic field")


def _merge_roots(pairs):
    acc: dict = {}
    order = []
    for r, m in pairs:
        if r not in acc:
            order.append(r)
            acc[r] = 0
        acc[r] += m
    return [(r, acc[r]) for r in order]


def rf_divisor(f: RationalFunction, component: CurveComponent | None = None) -> Divisor:
    """Zeros minus poles of ``f`` on a copy of the projective line, with oo."""
    if f.is_zero():
        raise ValueError("the zero function has no divisor")
    cid = component.id if component is not None else ""
    acc: Counter = Counter()
    for r, m in poly_roots(f.num) if f.num.degree > 0 else []:
        acc[PointP1.finite(r)] += m
    for r, m in poly_roots(f.den) if f.den.degree > 0 else []:
        acc[PointP1.finite(r)] -= m
    at_inf = f.den.degree - f.num.degree
    if at_inf:
        acc[INF] += at_inf
    return Divisor({_place(cid, pt, component): m for pt, m in acc.items()})


def _place(cid: str, pt: PointP1, component: CurveComponent | None) -> Place:
    if component is not None:
        name = component.marker_at(pt)
        if name is not None:
            return Place("*", name)
    return Place(cid, pt)


# ---------------------------------------------------------------------------
# Norm pushforward
# ---------------------------------------------------------------------------

def _norm_numerator(P: Poly, Q: Poly, d: int, A: Poly) -> Poly:
    """``Res_y(P(y) - x Q(y), A(y))`` as a polynomial in x (degree <= deg A)."""
    lead = Poly((P.coeff(d), -Q.coeff(d)))
    need = max(A.degree, 0) + 1
    xs, ys = [], []
    k = 0
    while len(xs) < need:
        x0 = Fraction((k + 1) // 2 * (1 if k % 2 else -1))
        k += 1
        if lead(x0) == 0:
            continue
        F = P - Q * x0
        xs.append(x0)
        ys.append(resultant(F, A))
    return interpolate(xs, ys)


def norm_pushforward(f: RationalFunction, m: FiniteMapP1) -> RationalFunction:
    """Field norm of ``f`` along ``x = m(y)``: ``x -> prod_{m(y)=x} f(y)``.

    Computed by resultant elimination of the fibre variable. With
    ``F = P - xQ`` of formal degree ``d`` and leading coefficient ``L(x)``,
    ``prod A(y_i) = Res(F, A) / L**deg A``.
    """
    if f.is_zero():
        raise ValueError("norm of the zero function")
    if f.is_constant():
        return RationalFunction.const(f.constant_value() ** m.degree)
    if m.map == RationalFunction.y():
        return f
    P, Q, d = m.map.num, m.map.den, m.degree
    A, B = f.num, f.den
    lead = Poly((P.coeff(d), -Q.coeff(d)))
    ra = _norm_numerator(P, Q, d, A)
    rb = _norm_numerator(P, Q, d, B)
    shift = B.degree - A.degree
    if shift >= 0:
        return RationalFunction(ra * lead ** shift, rb)
    return RationalFunction(ra, rb * lead ** (-shift))


def norm_pointwise(f: RationalFunction, m: FiniteMapP1, x, dps: int = 80):
    """Numeric norm at ``x`` by solving the fibre; independent cross-check."""
    import mpmath

    with mpmath.workdps(dps):
        F = m.map.num - m.map.den * x
        coeffs = [_to_mp(c) for c in reversed(F.coeffs)]
        roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=4 * dps)
        out = mpmath.mpc(1)
        for r in roots:
            out *= _eval_mp(f.num, r) / _eval_mp(f.den, r)
        # fibre points lost to infinity contribute f(oo)
        for _ in range(m.degree - F.degree):
            out *= _to_mp(f.value_at(INF).value)
        return out


def _to_mp(c):
    import mpmath

    if isinstance(c, QuadraticSurd):
        if c.is_real:
            return mpmath.mpf(c.p.numerator) / c.p.denominator + \
                (mpmath.mpf(c.q.numerator) / c.q.denominator) * mpmath.sqrt(c.d)
        return mpmath.mpc(mpmath.mpf(c.p.numerator) / c.p.denominator,
                          (mpmath.mpf(c.q.numerator) / c.q.denominator) * mpmath.sqrt(-c.d))
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    return mpmath.mpmathify(c)


def _eval_mp(p: Poly, z):
    acc = 0
    for c in reversed(p.coeffs):
        acc = acc * z + _to_mp(c)
    return acc


# ---------------------------------------------------------------------------
# Cycle-level operations
# ---------------------------------------------------------------------------

def _push_divisor(div: Divisor, m: FiniteMapP1 | None, image: CurveComponent) -> Divisor:
    out = []
    for place, mult in div:
        if isinstance(place.point, str):
            # named ambient point: keep the name; it is the same point downstairs
            out.append((place, mult))
            continue
        pt = place.point if m is None else m.image(place.point)
        out.append((_place(image.id, pt, image), mult))
    return Divisor(out)


def _term_divisor(t: Term) -> Divisor:
    total = Divisor()
    if t.function.is_constant():
        return total
    for comp in t.components:
        total = total + rf_divisor(t.function, comp)
    return total * t.coeff


def validate_closure(c: ChowPrecycle, maps: Mapping | None = None) -> tuple[bool, Divisor]:
    """Total divisor of ``c`` (after pushforward when ``maps`` is given).

    ``maps`` sends a component id to ``(FiniteMapP1, image component)`` or to
    ``None`` for a contracted component, which contributes nothing.
    """
    residual = Divisor()
    for t in c.terms:
        if maps is None:
            residual = residual + _term_divisor(t)
            continue
        for comp in t.components:
            if comp.id not in maps:
                raise PushforwardError(f"no pushforward declared for component {comp.id!r}")
            target = maps[comp.id]
            if target is None:
                continue
            fmap, image = target
            if t.function.is_constant():
                continue
            residual = residual + _push_divisor(rf_divisor(t.function, comp), fmap, image) * t.coeff
    return residual.is_zero(), residual


def mark_closed(c: ChowPrecycle, maps: Mapping | None = None) -> ChowPrecycle:
    """Return ``c`` with its closure flag set; raises if it is not closed."""
    closed, residual = validate_closure(c, maps)
    if not closed:
        raise ValueError(f"precycle is not closed; residual {residual!r}")
    return ChowPrecycle(c.terms, closed=True)


def _sum_key(components: tuple) -> tuple:
    return tuple(sorted(c.id for c in components))


def group_law_merge(c: ChowPrecycle) -> ChowPrecycle:
    """Normal form under ``(f,D1)+(f,D2) = (f,D1+D2)`` and ``n(f,D) = (f^n,D)``.

    Terms over the same component sum are multiplied together, equal
    functions have their component sums concatenated, and unit terms are
    dropped. The real regulator is unchanged by each step.
    """
    by_support: dict = {}
    comps_for: dict = {}
    for t in c.terms:
        key = _sum_key(t.components)
        f = t.function ** t.coeff
        by_support[key] = by_support[key] * f if key in by_support else f
        comps_for.setdefault(key, tuple(sorted(t.components, key=lambda x: x.id)))
    by_function: dict = {}
    order = []
    for key, f in by_support.items():
        if f.is_unit():
            continue
        if f not in by_function:
            by_function[f] = ()
            order.append(f)
        by_function[f] = by_function[f] + comps_for[key]
    terms = tuple(Term(f, tuple(sorted(by_function[f], key=lambda x: x.id))) for f in order)
    return ChowPrecycle(terms, closed=c.closed)


def component_constants(c: ChowPrecycle) -> dict:
    """Per-component product of constant values (each component counted
    with its multiplicity in every term). Non-constant terms are refused."""
    out: dict = {}
    for t in c.terms:
        if not t.function.is_constant():
            raise ValueError("component_constants needs constant functions only")
        k = t.function.constant_value() ** t.coeff
        for comp in t.components:
            out[comp.id] = out.get(comp.id, Fraction(1)) * k
    return out


def project_prestable(c: ChowPrecycle, maps: Mapping) -> ChowPrecycle:
    """Push every term forward along its component's finite map."""
    images: dict = {}
    terms = []
    for t in c.terms:
        for comp in t.components:
            if comp.id not in maps:
                raise PushforwardError(f"no pushforward declared for component {comp.id!r}")
            target = maps[comp.id]
            if target is None:
                continue
            fmap, image = target
            if image.id in images and images[image.id] != image:
                raise PushforwardError(f"inconsistent image labels for {image.id!r}")
            images[image.id] = image
            f = t.function if fmap is None else norm_pushforward(t.function, fmap)
            terms.append(Term(f, (image,), t.coeff))
    return ChowPrecycle(tuple(terms))


def product_cycle(factors: Sequence) -> np.ndarray:
    """Kronecker product of the factors' regulator coefficient arrays."""
    if not factors:
        raise ValueError("product of no factors")
    arrs = []
    for f in factors:
        a = np.asarray(f, dtype=object)
        if a.size == 0:
            raise ValueError("empty factor")
        arrs.append(a)
    return reduce(np.kron, arrs)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def _scalar_json(c):
    if isinstance(c, QuadraticSurd):
        return {"p": format_exact(c.p), "q": format_exact(c.q), "d": c.d}
    return format_exact(Fraction(c))


def _scalar_from_json(obj):
    from .exact import parse_rational

    if isinstance(obj, dict):
        return surd(parse_rational(obj["p"]), parse_rational(obj["q"]), int(obj["d"]))
    return parse_rational(obj)


def _point_json(p):
    if isinstance(p, str):
        return {"marker": p}
    return "oo" if p.is_infinite else _scalar_json(p.value)


def _point_from_json(obj):
    if obj == "oo":
        return INF
    return PointP1.finite(_scalar_from_json(obj))


def divisor_to_json(div: Divisor) -> list:
    items = sorted(div, key=lambda kv: _place_key(kv[0]))
    return [{"component": p.component, "point": _point_json(p.point), "multiplicity": m}
            for p, m in items]


def _component_json(c: CurveComponent) -> dict:
    return {"id": c.id, "kind": c.kind,
            "markers": {n: _point_json(p) for n, p in c.markers}}


def precycle_to_json(c: ChowPrecycle) -> str:
    terms = []
    for t in c.terms:
        terms.append({
            "coeff": t.coeff,
            "components": [_component_json(x) for x in t.components],
            "function": {"num": [_scalar_json(x) for x in t.function.num.coeffs],
                         "den": [_scalar_json(x) for x in t.function.den.coeffs]},
        })
    return json.dumps({"terms": terms, "closed": c.closed}, indent=2)


def precycle_from_json(text: str) -> ChowPrecycle:
    doc = json.loads(text)
    terms = []
    for t in doc["terms"]:
        comps = tuple(
            CurveComponent(x["id"], x["kind"],
                           tuple((n, _point_from_json(p)) for n, p in x["markers"].items()))
            for x in t["components"])
        f = RationalFunction(Poly(_scalar_from_json(v) for v in t["function"]["num"]),
                             Poly(_scalar_from_json(v) for v in t["function"]["den"]))
        terms.append(Term(f, comps, int(t["coeff"])))
    return ChowPrecycle(tuple(terms), closed=bool(doc.get("closed", False)))
