"""Limit cycles on the twisted ruled surface and their 3x3 regulator matrix.

Coordinates on ``R_0 = E_0 x Q_0``: ``x`` along ``E_0``, ``y`` along ``Q_0``,
with ``E_0 = {y = oo}``, ``Q_0 = {x = 0}``, ``Q_1 = {x = oo}`` and
``q = (1, oo)``. The gluing twist is ``y -> y + lam``; ``lam`` is normalised
to 1 by rescaling ``y`` before any regulator computation.

A configuration ``perm`` picks which orbit sits on the (1,1) curve
``N_Gamma``; the other two orbits sit on the (1,2) curve ``N_Sigma``.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from mpmath import fadd, fsub, iv, ldexp, mp, mpf, nstr

from .cycles import (
    ChowPrecycle, CurveComponent, FiniteMapP1, Term, component_constants,
    group_law_merge, project_prestable, validate_closure,
)
from .exact import (
    INF, MoebiusMap, Poly, PointP1, QuadraticRoots, QuadraticSurd,
    RationalFunction, cross_ratio_quadratic, format_exact, quadratic_roots,
    to_exact,
)

log = logging.getLogger(__name__)

BASIS = ("c1(E0)", "c1(E1+E2+E3)", "c1(E1)")
BASIS_R4 = ("c1(E0)", "c1(E1+E2+E3)", "c1(E3)")
DEFAULT_MAX_BITS = 4096

# (orbit index, k, l): chain sum_{j=k}^{l-1} r_i^(j) r_i^(j+1)
CHAINS = {
    0: {"gamma": ((0, -3, 0),), "sigma": ((1, 0, 3), (2, -1, 2))},
    1: {"gamma": ((1, 0, 3),), "sigma": ((0, -3, 0), (2, -1, 2))},
    2: {"gamma": ((2, -1, 2),), "sigma": ((0, -3, 0), (1, 0, 3))},
}
# Q_1 representative k_i of each orbit, i + k_i = 1 (mod 4)
Q1_INDEX = {0: -3, 1: 0, 2: -1, 3: -2}


@contextmanager
def _ivprec(bits: int):
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


class DegenerateSeeds(ValueError):
    """The seed triple violates a genericity condition of the construction."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class GlueData:
    seeds: tuple
    lam: Fraction = Fraction(1)
    variant: str = "r2"

    def __post_init__(self):
        seeds = tuple(to_exact(s) for s in self.seeds)
        if len(seeds) != 3:
            raise ValueError("need exactly three seeds")
        object.__setattr__(self, "seeds", seeds)
        object.__setattr__(self, "lam", to_exact(self.lam))
        if self.lam == 0:
            raise ValueError("lambda must be nonzero")
        if self.variant not in ("r2", "r4"):
            raise ValueError(f"unknown variant {self.variant!r}")

    @property
    def q_position(self) -> tuple:
        return (PointP1.finite(1), INF)

    def normalized(self) -> "GlueData":
        """Rescale ``y`` so that the twist is ``y -> y + 1``."""
        if self.lam == 1:
            return self
        return GlueData(tuple(s / self.lam for s in self.seeds), Fraction(1), self.variant)

    def degeneracy(self) -> str | None:
        """Reason the triple is structurally degenerate, or None."""
        s = self.seeds
        for a in range(3):
            for b in range(a + 1, 3):
                if s[a] == s[b]:
                    return f"repeated seeds y{a} = y{b}"
                if abs(s[a] - s[b]) == abs(self.lam):
                    return f"seeds y{a}, y{b} differ by the twist"
        return None

    def check(self) -> None:
        reason = self.degeneracy()
        if reason:
            raise DegenerateSeeds(reason)

    @property
    def basis(self) -> tuple:
        return BASIS_R4 if self.variant == "r4" else BASIS


def r4_variant(y0, y1, y4, lam=1) -> GlueData:
    """The construction with ``r_2`` replaced by ``r_4``.

    Same algebra as the ``r_2`` case; only the orbit label of the third
    seed and the last basis label change.
    """
    return GlueData((y0, y1, y4), lam, variant="r4")


def arrangement(perm: int) -> tuple[int, int, int]:
    """Seed indices ``(head; b, c)`` of the cross-ratio equation."""
    if perm not in (0, 1, 2):
        raise ValueError(f"perm must be 0, 1 or 2, got {perm}")
    return perm, (perm + 1) % 3, (perm + 2) % 3


# ---------------------------------------------------------------------------
# Orbits and curves
# ---------------------------------------------------------------------------

def gluing_steps(lam) -> tuple:
    """Moebius maps ``Q_i -> Q_{i+1}`` in chart coordinates (index i = 0..3).

    All steps are the identity except ``Q_3 -> Q_0``, which carries the
    twist, so the composite around the cycle is ``y -> y + lam``.
    """
    ident = MoebiusMap.identity()
    return (ident, ident, ident, MoebiusMap.translation(lam))


@dataclass(frozen=True)
class OrbitPoint:
    orbit: int
    k: int
    chart: int
    y: PointP1

    @property
    def x(self) -> PointP1 | None:
        """Position along E_0 for points on Q_0 (x = 0) or Q_1 (x = oo)."""
        if self.chart == 0:
            return PointP1.finite(0)
        if self.chart == 1:
            return INF
        return None


def orbit_points(g: GlueData, i: int, k: int) -> OrbitPoint:
    """``r_i^(k) = phi^k(r_i)``, walking chart by chart from the seed on Q_1."""
    if i not in (0, 1, 2):
        raise ValueError("only orbits 0, 1, 2 carry seeds")
    steps = gluing_steps(g.lam)
    chart, j = 1, Q1_INDEX[i]
    y = PointP1.finite(g.seeds[i])
    while j < k:
        y = steps[chart](y)
        chart, j = (chart + 1) % 4, j + 1
    while j > k:
        chart, j = (chart - 1) % 4, j - 1
        y = steps[chart].inverse()(y)
    assert chart == (i + k) % 4
    return OrbitPoint(i, k, chart, y)


@dataclass(frozen=True)
class CurveOnR:
    """``x * x_coeff(y) - const(y) = 0`` on ``R_0`` plus its attached chains."""

    x_coeff: Poly
    const: Poly
    chains: tuple = ()

    @property
    def bidegree(self) -> tuple:
        return (1, max(self.x_coeff.degree, self.const.degree))

    def __call__(self, x, y):
        return x * self.x_coeff(y) - self.const(y)

    def contains(self, x: PointP1, y: PointP1) -> bool:
        n = self.bidegree[1]
        if y.is_infinite:
            # top y-coefficient of x*A(y) - B(y)
            a, b = self.x_coeff.coeff(n), self.const.coeff(n)
            return a == 0 if x.is_infinite else x.value * a - b == 0
        if x.is_infinite:
            return self.x_coeff(y.value) == 0
        return x.value * self.x_coeff(y.value) - self.const(y.value) == 0

    def as_map(self) -> FiniteMapP1:
        """Projection to ``E_0``: ``x = const(y) / x_coeff(y)``."""
        return FiniteMapP1(RationalFunction(self.const, self.x_coeff))

    def fiber_over_x(self, x0) -> list:
        """y-coordinates over ``x = x0`` with multiplicity (oo when the degree drops)."""
        x0 = to_exact(x0)
        F = self.x_coeff * x0 - self.const
        n = self.bidegree[1]
        from .cycles import poly_roots

        pts = []
        if F.degree > 0:
            for r, m in poly_roots(F):
                pts.extend([PointP1.finite(r)] * m)
        pts.extend([INF] * (n - max(F.degree, 0)))
        return pts

    def equation(self) -> str:
        return f"x*({self.x_coeff}) - ({self.const})"


def _n_curve(seeds: Sequence, lam=Fraction(1), chains=()) -> CurveOnR:
    a, b = Poly((1,)), Poly((1,))
    for s in seeds:
        a = a * Poly((-s, 1))
        b = b * Poly((-s - lam, 1))
    return CurveOnR(a, b, tuple(chains))


def build_n_gamma(seed, lam=1) -> CurveOnR:
    """The (1,1) curve through (oo, s), (0, s + lam) and q = (1, oo)."""
    return _n_curve((to_exact(seed),), to_exact(lam))


def build_n_sigma(s1, s2, lam=1) -> CurveOnR:
    """The (1,2) curve through (oo, s1), (oo, s2), (0, s1+lam), (0, s2+lam), q."""
    s1, s2 = to_exact(s1), to_exact(s2)
    if s1 == s2:
        raise DegenerateSeeds("N_Sigma needs two distinct seeds")
    return _n_curve((s1, s2), to_exact(lam))


def curves_for(g: GlueData, perm: int) -> tuple[CurveOnR, CurveOnR]:
    head, b, c = arrangement(perm)
    s = g.seeds
    gamma = _n_curve((s[head],), g.lam, CHAINS[perm]["gamma"])
    sigma = _n_curve((s[b], s[c]), g.lam, CHAINS[perm]["sigma"])
    for curve in (gamma, sigma):
        for i, k, l in curve.chains:
            start, end = orbit_points(g, i, k), orbit_points(g, i, l)
            assert k <= 0 <= l and start.chart == 1 and end.chart == 0
            assert curve.contains(start.x, start.y) and curve.contains(end.x, end.y)
    return gamma, sigma


def intersection_uv(g: GlueData, perm: int) -> QuadraticRoots:
    """y-coordinates of the two points ``u, v`` where N_Gamma meets N_Sigma off q."""
    head, b, c = arrangement(perm)
    s = g.normalized().seeds
    roots = quadratic_roots(cross_ratio_quadratic(s[head], s[b], s[c]))
    if roots.is_double:
        raise DegenerateSeeds(f"tangential intersection (double root) for perm {perm}")
    return roots


# ---------------------------------------------------------------------------
# The limit cycle
# ---------------------------------------------------------------------------

def g_function(roots: QuadraticRoots, swap: bool = False) -> RationalFunction:
    alpha, beta = roots.as_tuple() if not swap else roots.swapped().as_tuple()
    return RationalFunction(Poly((-alpha, 1)), Poly((-beta, 1)))


def _components():
    e = {i: CurveComponent(f"E{i}", "fiber") for i in range(4)}
    e[0] = CurveComponent("E0", "fiber", (("q", PointP1.finite(1)),))
    c = CurveComponent("C", "section-C", (("q", INF),))
    return e, c


@dataclass(frozen=True)
class Contribution:
    """``sign * (g(point), components)`` coming from one broken chain."""

    sign: int
    point: Fraction
    components: tuple


def chain_contributions(g: GlueData, perm: int) -> list:
    """Constants picked up on the fibre chains, per the chain-breaking rule.

    A chain from ``r_i^(k)`` (on Q_1) to ``r_i^(l)`` (on Q_0) breaks into the
    segments ``j < 0``, attached at ``r_i^(k)``, and ``j >= 0``, attached at
    ``r_i^(l)``. Segment ``j`` lies over ``E_{(i+j) mod 4}``. The Gamma side
    carries ``g`` and the Sigma side ``1/g``.
    """
    out = []
    for side, sign in (("gamma", 1), ("sigma", -1)):
        for i, k, l in CHAINS[perm][side]:
            lower = [(i + j) % 4 for j in range(k, 0)]
            upper = [(i + j) % 4 for j in range(0, l)]
            assert 0 not in lower + upper
            if lower:
                out.append(Contribution(sign, orbit_points(g, i, k).y.value, tuple(lower)))
            if upper:
                out.append(Contribution(sign, orbit_points(g, i, l).y.value, tuple(upper)))
    return out


def prestable_epsilon0(g: GlueData, perm: int, swap: bool = False):
    """The limit cycle on the stable-map side, with its pushforward maps.

    Returns ``(precycle, maps)``; ``maps`` is suitable for
    :func:`~reglab.cycles.project_prestable` and
    :func:`~reglab.cycles.validate_closure`.
    """
    g = g.normalized()
    g.check()
    roots = intersection_uv(g, perm)
    gf = g_function(roots, swap)
    gamma, sigma = curves_for(g, perm)
    e, c = _components()
    n_gamma = CurveComponent("N_Gamma", "exceptional", (("q", INF),))
    n_sigma = CurveComponent("N_Sigma", "exceptional", (("q", INF),))
    # chain copies upstairs are labelled by family; each maps isomorphically to E_i
    terms = [Term(gf, (n_gamma,)), Term(1 / gf, (n_sigma,))]
    maps = {
        "N_Gamma": (gamma.as_map(), e[0]),
        "N_Sigma": (sigma.as_map(), e[0]),
        "C_Y": (FiniteMapP1.identity(), c),
        "C_Z": (FiniteMapP1.identity(), c),
    }
    for n, contrib in enumerate(chain_contributions(g, perm)):
        comps = []
        for idx in contrib.components:
            up = CurveComponent(f"E{idx}~{n}", "fiber")
            maps[up.id] = (FiniteMapP1.identity(), e[idx])
            comps.append(up)
        terms.append(Term(RationalFunction.const(gf(contrib.point)), tuple(comps), contrib.sign))
    # N meets C at q, where g = 1
    terms.append(Term(RationalFunction.const(gf.value_at(INF).value), (CurveComponent("C_Y", "section-C"),)))
    terms.append(Term(RationalFunction.const(1), (CurveComponent("C_Z", "section-C"),)))
    return ChowPrecycle(tuple(terms)), maps


def row_forms(g: GlueData, perm: int) -> tuple:
    """Each basis coefficient as ``{t: n}``, meaning ``sum_t n * log|g(t)|``."""
    g = g.normalized()
    gamma, sigma = curves_for(g, perm)
    per_comp = {i: Counter() for i in range(4)}
    # E_0: pushforwards compared at q (x = 1); g(oo) = 1 drops out
    for pt in gamma.fiber_over_x(1):
        if not pt.is_infinite:
            per_comp[0][pt.value] += 1
    for pt in sigma.fiber_over_x(1):
        if not pt.is_infinite:
            per_comp[0][pt.value] -= 1
    for contrib in chain_contributions(g, perm):
        for idx in contrib.components:
            per_comp[idx][contrib.point] += contrib.sign
    def clean(c):
        return {t: n for t, n in c.items() if n}

    if clean(per_comp[2]) != clean(per_comp[3]):
        raise AssertionError("E2 and E3 coefficients differ; basis does not apply")
    e1_minus_e2 = Counter(per_comp[1])
    e1_minus_e2.subtract(per_comp[2])
    forms = (per_comp[0], per_comp[2], e1_minus_e2)
    return tuple({t: n for t, n in sorted(f.items()) if n} for f in forms)


def _form_value(form: dict, gf: RationalFunction):
    out = Fraction(1)
    for t, n in form.items():
        out = out * gf(t) ** n
    return out


def assemble_epsilon0(g: GlueData, perm: int, swap: bool = False) -> ChowPrecycle:
    """The pushed-forward limit cycle in the shape

    ``-(g(mid), E0) + (K, E1+E2+E3) + (K', E1) + (1, C)``.

    The projection is carried out with exact norm pushforwards; the result
    is checked for closure and against the symbolic row forms before it is
    returned.
    """
    gn = g.normalized()
    pre, maps = prestable_epsilon0(gn, perm, swap)
    closed, residual = validate_closure(pre, maps)
    if not closed:
        raise AssertionError(f"prestable cycle not closed: {residual!r}")
    projected = project_prestable(pre, maps)
    closed, residual = validate_closure(projected)
    if not closed:
        raise AssertionError(f"projected cycle not closed: {residual!r}")
    merged = group_law_merge(projected)
    consts = component_constants(merged)
    e, c = _components()
    gf = g_function(intersection_uv(gn, perm), swap)
    forms = row_forms(gn, perm)
    k_e0 = consts.get("E0", Fraction(1))
    k_sum = consts.get("E2", Fraction(1))
    if consts.get("E3", Fraction(1)) != k_sum:
        raise AssertionError("E2 and E3 constants differ")
    k_e1 = consts.get("E1", Fraction(1)) / k_sum
    for form, value in zip(forms, (k_e0, k_sum, k_e1)):
        if _form_value(form, gf) != value:
            raise AssertionError("cycle constants disagree with the row forms")
    (mid, n_mid), = forms[0].items()
    assert n_mid == -1 and gf(mid) ** -1 == k_e0
    terms = (
        Term(RationalFunction.const(gf(mid)), (e[0],), -1),
        Term(RationalFunction.const(k_sum), (e[1], e[2], e[3])),
        Term(RationalFunction.const(k_e1), (e[1],)),
        Term(RationalFunction.const(1), (c,)),
    )
    out = ChowPrecycle(terms)
    closed, _ = validate_closure(out)
    return ChowPrecycle(terms, closed=closed)


# ---------------------------------------------------------------------------
# Certified regulator rows and matrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegulatorRow:
    entries: tuple
    perm: int
    roots: QuadraticRoots
    swapped: bool
    precision: int
    degenerate: bool = False
    forms: tuple = ()
    basis: tuple = BASIS

    @property
    def g(self) -> MoebiusMap:
        a, b = self.roots.as_tuple() if not self.swapped else self.roots.swapped().as_tuple()
        return MoebiusMap.ratio(a, b)

    @property
    def error_bounds(self) -> tuple:
        return tuple(e.delta / 2 for e in self.entries)

    def midpoints(self) -> tuple:
        return tuple(float(e.mid) for e in self.entries)


def _log_abs_diff(t: Fraction, root) -> object:
    """Enclosure of ``log|t - root|`` in the current interval context."""
    if isinstance(root, QuadraticSurd):
        diff = (iv.mpf(t.numerator) / t.denominator - iv.mpf(root.p.numerator) / root.p.denominator) \
            - (iv.mpf(root.q.numerator) / root.q.denominator) * iv.sqrt(root.d)
    else:
        diff = iv.mpf((t - root).numerator) / (t - root).denominator
    return iv.log(abs(diff))


def regulator_row(g: GlueData, perm: int, precision: int = 128, swap: bool = False) -> RegulatorRow:
    """Interval enclosures of one row of log-coefficients at ``precision`` bits."""
    gn = g.normalized()
    gn.check()
    roots = intersection_uv(gn, perm)
    forms = row_forms(gn, perm)
    if roots.is_complex:
        zero = iv.mpf(0)
        return RegulatorRow((zero, zero, zero), perm, roots, swap, precision, True, forms, g.basis)
    alpha, beta = roots.as_tuple() if not swap else roots.swapped().as_tuple()
    for form in forms:
        for t in form:
            if t == alpha or t == beta:
                raise DegenerateSeeds(f"log argument vanishes or blows up at y = {t} (perm {perm})")
    entries = []
    with _ivprec(precision):
        for form in forms:
            acc = iv.mpf(0)
            for t, n in form.items():
                acc = acc + n * (_log_abs_diff(t, alpha) - _log_abs_diff(t, beta))
            entries.append(acc)
    return RegulatorRow(tuple(entries), perm, roots, swap, precision, False, forms, g.basis)


@dataclass(frozen=True)
class PrecisionPolicy:
    initial_bits: int = 64
    max_bits: int = DEFAULT_MAX_BITS
    det_tolerance_mode: str = "exclude-zero"

    def __post_init__(self):
        if self.det_tolerance_mode not in ("exclude-zero", "radius-margin"):
            raise ValueError(f"unknown det_tolerance_mode {self.det_tolerance_mode!r}")
        if not 2 <= self.initial_bits <= self.max_bits:
            raise ValueError("need 2 <= initial_bits <= max_bits")

    @classmethod
    def from_env(cls, **kw) -> "PrecisionPolicy":
        if "REGLAB_MAX_BITS" in os.environ:
            kw["max_bits"] = int(os.environ["REGLAB_MAX_BITS"])
            kw.setdefault("initial_bits", min(64, kw["max_bits"]))
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> "PrecisionPolicy":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        unknown = set(doc) - {"initial_bits", "max_bits", "det_tolerance_mode"}
        if unknown:
            raise ValueError(f"unknown precision policy keys: {sorted(unknown)}")
        return cls.from_env(**doc)

    def certifies(self, det) -> bool:
        if self.det_tolerance_mode == "radius-margin":
            return abs(det.mid) > 2 * det.delta
        return not (det.a <= 0 <= det.b)


@dataclass(frozen=True)
class RegulatorMatrix:
    rows: tuple
    determinant: object
    invertible: str  # "yes" | "no" | "undecided-at-precision"
    precision: int
    degenerate: bool = False

    @property
    def det_mid(self) -> mpf:
        return interval_mid(self.determinant)

    @property
    def det_radius(self) -> mpf:
        return interval_radius(self.determinant)


def _endpoints(x) -> tuple[mpf, mpf]:
    lo, hi = x._mpi_
    return mp.make_mpf(lo), mp.make_mpf(hi)


def interval_mid(x) -> mpf:
    """Exact midpoint, independent of the ambient precision."""
    lo, hi = _endpoints(x)
    return ldexp(fadd(lo, hi, exact=True), -1)


def interval_radius(x) -> mpf:
    """Exact half-width."""
    lo, hi = _endpoints(x)
    return ldexp(fsub(hi, lo, exact=True), -1)


def _det3(m):
    (a, b, c), (d, e, f), (gg, h, i) = m
    return a * (e * i - f * h) - b * (d * i - f * gg) + c * (d * h - e * gg)


def regulator_matrix(g: GlueData, precision: int | PrecisionPolicy | None = None,
                     swaps: Sequence[bool] = (False, False, False)) -> RegulatorMatrix:
    """Stack the three rows and certify the sign of the determinant.

    Precision doubles from ``initial_bits`` until ``0`` is excluded from
    the determinant enclosure or ``max_bits`` is reached.
    """
    if isinstance(precision, PrecisionPolicy):
        policy = precision
    elif precision is None:
        policy = PrecisionPolicy.from_env()
    else:
        cap = max(precision, PrecisionPolicy.from_env().max_bits)
        policy = PrecisionPolicy(initial_bits=precision, max_bits=cap)
    bits = policy.initial_bits
    while True:
        rows = tuple(regulator_row(g, p, bits, swaps[p]) for p in range(3))
        if any(r.degenerate for r in rows):
            with _ivprec(bits):
                det = _det3([r.entries for r in rows])
            return RegulatorMatrix(rows, det, "no", bits, degenerate=True)
        with _ivprec(bits):
            det = _det3([r.entries for r in rows])
        if policy.certifies(det):
            return RegulatorMatrix(rows, det, "yes", bits)
        if bits >= policy.max_bits:
            return RegulatorMatrix(rows, det, "undecided-at-precision", bits)
        log.debug("determinant straddles 0 at %d bits; doubling", bits)
        bits = min(2 * bits, policy.max_bits)


# ---------------------------------------------------------------------------
# Parameter scans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanEntry:
    seeds: tuple
    verdict: str  # "invertible" | "degenerate" | "undecided"
    det_mid: str = ""
    det_radius: str = ""
    bits: int = 0
    reason: str = ""


@dataclass
class ScanReport:
    entries: list
    policy: PrecisionPolicy
    spec: dict = field(default_factory=dict)

    @property
    def counts(self) -> dict:
        c = Counter(e.verdict for e in self.entries)
        return {k: c.get(k, 0) for k in ("invertible", "degenerate", "undecided")}

    @property
    def invertible_fraction(self) -> float:
        return self.counts["invertible"] / len(self.entries)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["y0", "y1", "y2", "det_mid", "det_radius", "verdict", "bits", "reason"])
        for e in self.entries:
            w.writerow([format_exact(s) for s in e.seeds] +
                       [e.det_mid, e.det_radius, e.verdict, e.bits, e.reason])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "spec": self.spec,
            "policy": {"initial_bits": self.policy.initial_bits, "max_bits": self.policy.max_bits,
                       "det_tolerance_mode": self.policy.det_tolerance_mode},
            "counts": self.counts,
            "total": len(self.entries),
            "invertible_fraction": self.invertible_fraction,
            "entries": [{"seeds": [format_exact(s) for s in e.seeds], "verdict": e.verdict,
                         "det_mid": e.det_mid, "det_radius": e.det_radius, "bits": e.bits,
                         "reason": e.reason} for e in self.entries],
        }


def farey_values(max_den: int) -> list:
    """Reduced fractions in (0, 1) with denominator at most ``max_den``."""
    return sorted({Fraction(p, q) for q in range(2, max_den + 1) for p in range(1, q)})


def sample_triples(n: int, max_den: int = 64, seed: int = 0) -> list:
    """``n`` triples drawn uniformly from the Farey set, pairwise distinct."""
    rng = random.Random(seed)
    values = farey_values(max_den)
    out = []
    while len(out) < n:
        t = tuple(rng.choice(values) for _ in range(3))
        if len(set(t)) == 3:
            out.append(t)
    return out


def evaluate_triple(seeds: tuple, policy: PrecisionPolicy) -> ScanEntry:
    try:
        m = regulator_matrix(GlueData(seeds), policy)
    except DegenerateSeeds as exc:
        return ScanEntry(tuple(seeds), "degenerate", reason=exc.reason)
    mid, rad = nstr(m.det_mid, 17), nstr(m.det_radius, 5)
    if m.degenerate:
        return ScanEntry(tuple(seeds), "degenerate", mid, rad, m.precision, "complex-conjugate roots")
    verdict = "invertible" if m.invertible == "yes" else "undecided"
    return ScanEntry(tuple(seeds), verdict, mid, rad, m.precision)


def _evaluate_packed(args):
    return evaluate_triple(*args)


def scan_parameters(triples: Iterable, policy: PrecisionPolicy | None = None,
                    workers: int = 1, spec: dict | None = None) -> ScanReport:
    """Verdict per triple; output order follows input order."""
    triples = [tuple(to_exact(s) for s in t) for t in triples]
    if not triples:
        raise ValueError("empty parameter grid")
    policy = policy or PrecisionPolicy.from_env()
    jobs = [(t, policy) for t in triples]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(_evaluate_packed, jobs, chunksize=16))
    else:
        entries = [_evaluate_packed(j) for j in jobs]
    return ScanReport(entries, policy, spec or {})
