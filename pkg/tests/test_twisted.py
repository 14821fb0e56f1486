import itertools
import random
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from oracles import row_from_printed_formulas
from reglab.cycles import norm_pointwise, norm_pushforward, rf_divisor
from reglab.exact import (
    INF, PointP1, Poly, RationalFunction, cross_ratio_quadratic, quadratic_roots, surd,
)
from reglab.twisted import (
    BASIS, DegenerateSeeds, GlueData, PrecisionPolicy, assemble_epsilon0, build_n_gamma,
    build_n_sigma, curves_for, g_function, interval_mid, intersection_uv, orbit_points,
    r4_variant, regulator_matrix, regulator_row, row_forms, sample_triples, scan_parameters,
)

REF = (F(0), F(1, 8), F(1, 2))
seeds_st = st.tuples(*[st.fractions(min_value=F(1, 32), max_value=F(31, 32), max_denominator=32)] * 3)


def usable(seeds):
    g = GlueData(seeds)
    if g.degeneracy():
        return None
    try:
        for p in range(3):
            if intersection_uv(g, p).is_complex:
                return None
            regulator_row(g, p, 64)
    except DegenerateSeeds:
        return None
    return g


# -- curves and orbits -------------------------------------------------------------


def test_n_gamma_seed_zero():
    c = build_n_gamma(0)
    assert c.x_coeff == Poly((0, 1)) and c.const == Poly((-1, 1))
    assert c.bidegree == (1, 1)
    assert c.contains(PointP1.finite(1), INF)
    assert c.fiber_over_x(1) == [INF]
    assert c.contains(PointP1.finite(0), PointP1.finite(1))
    assert c.contains(INF, PointP1.finite(0))


def test_n_sigma_reference():
    c = build_n_sigma(F(1, 8), F(1, 2))
    # x(y - 1/8)(y - 1/2) - (y - 9/8)(y - 3/2)
    assert c.x_coeff == Poly.from_roots([F(1, 8), F(1, 2)])
    assert c.const == Poly.from_roots([F(9, 8), F(3, 2)])
    assert sorted(c.fiber_over_x(1), key=lambda p: p.sort_key()) == \
        sorted([INF, PointP1.finite(F(13, 16))], key=lambda p: p.sort_key())
    for y in (F(9, 8), F(3, 2)):
        assert c.contains(PointP1.finite(0), PointP1.finite(y))
    for y in (F(1, 8), F(1, 2)):
        assert c.contains(INF, PointP1.finite(y))
    with pytest.raises(DegenerateSeeds):
        build_n_sigma(F(1, 3), F(1, 3))


@given(seeds_st)
def test_sigma_fiber_over_q_is_midpoint(s):
    assume(s[1] != s[2])
    c = build_n_sigma(s[1], s[2])
    mid = (s[1] + s[2] + 1) / 2
    assert PointP1.finite(mid) in c.fiber_over_x(1) and INF in c.fiber_over_x(1)


def test_orbit_points():
    g = GlueData(REF)
    r = orbit_points(g, 1, 3)
    assert (r.chart, r.y) == (0, PointP1.finite(F(9, 8))) and r.x == PointP1.finite(0)
    r = orbit_points(g, 2, 2)
    assert (r.chart, r.y) == (0, PointP1.finite(F(3, 2)))
    r = orbit_points(g, 1, 0)
    assert (r.chart, r.y, r.x) == (1, PointP1.finite(F(1, 8)), INF)
    for i in range(3):
        for k in range(-6, 6):
            assert orbit_points(g, i, k + 4).y.value == orbit_points(g, i, k).y.value + 1


def test_chain_conditions_hold_for_all_perms():
    for p in range(3):
        curves_for(GlueData(REF), p)


# -- intersection points -------------------------------------------------------------


def test_intersection_uv_reference():
    r = intersection_uv(GlueData(REF), 0)
    assert r.as_tuple() == (surd(F(1, 2), F(-1, 4), 5), surd(F(1, 2), F(1, 4), 5))


@given(seeds_st)
def test_intersection_uv_perm_arrangement(s):
    g = GlueData(s)
    assume(not g.degeneracy())
    heads = {0: (s[0], s[1], s[2]), 1: (s[1], s[2], s[0]), 2: (s[2], s[0], s[1])}
    for p, (a, b, c) in heads.items():
        try:
            r = intersection_uv(g, p)
        except DegenerateSeeds:
            continue
        assert r == quadratic_roots(cross_ratio_quadratic(a, b, c))
        assert r == quadratic_roots(cross_ratio_quadratic(a, c, b))


# -- assembled cycle ---------------------------------------------------------------------


def test_assemble_reference_cycle():
    g = GlueData(REF)
    c = assemble_epsilon0(g, 0)
    assert c.closed
    gf = g_function(intersection_uv(g, 0))
    t0 = c.terms[0]
    assert [x.id for x in t0.components] == ["E0"] and t0.coeff == -1
    assert t0.function == RationalFunction.const(gf(F(13, 16)))
    assert [x.id for x in c.terms[1].components] == ["E1", "E2", "E3"]
    unit = c.terms[-1]
    assert unit.function.is_unit() and [x.id for x in unit.components] == ["C"]


def test_assemble_all_perms_and_swaps_close():
    g = GlueData(REF)
    for p, sw in itertools.product(range(3), (False, True)):
        assert assemble_epsilon0(g, p, sw).closed


def test_assemble_refuses_degenerate_seeds():
    with pytest.raises(DegenerateSeeds):
        assemble_epsilon0(GlueData((0, 0, F(1, 2))), 0)


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(seeds_st)
def test_assemble_closes_for_random_seeds(s):
    g = usable(s)
    assume(g is not None)
    for p in range(3):
        assert assemble_epsilon0(g, p).closed


# -- pushforward identity -------------------------------------------------------------


def _push_pair(g, perm=0):
    gamma, sigma = curves_for(g, perm)
    gf = g_function(intersection_uv(g, perm))
    return gf, norm_pushforward(gf, gamma.as_map()), norm_pushforward(gf, sigma.as_map())


def test_pushforward_ratio_reference():
    g = GlueData(REF)
    gf, ny, nz = _push_pair(g)
    ratio = ny / nz
    assert ratio.is_constant()
    assert ratio.constant_value() == 1 / gf(F(13, 16))
    assert ratio.constant_value() == surd(F(-21, 11), F(8, 11), 5)
    assert rf_divisor(ny) == rf_divisor(nz)


def test_e0_entry_is_minus_log_of_norm_ratio():
    rng = random.Random(1)
    done = 0
    while done < 10:
        s = tuple(F(rng.randint(1, 63), 64) for _ in range(3))
        g = usable(s)
        if g is None:
            continue
        done += 1
        for p in range(3):
            gf, ny, nz = _push_pair(g, p)
            k = (nz / ny).constant_value()
            row = regulator_row(g, p, 128)
            with mpmath.workdps(40):
                kp = mpmath.mpf(k.p.numerator) / k.p.denominator
                kq = mpmath.mpf(k.q.numerator) / k.q.denominator
                expect = -mpmath.log(abs(kp + kq * mpmath.sqrt(k.d)))
                assert abs(interval_mid(row.entries[0]) - expect) < mpmath.mpf(10) ** -30


def test_pointwise_oracle_on_sigma_norm():
    g = GlueData(REF)
    gf, ny, nz = _push_pair(g)
    sigma = curves_for(g, 0)[1]
    for x in (F(2), F(-3, 7), F(5, 11)):
        exact = nz(x)
        approx = norm_pointwise(gf, sigma.as_map(), x, dps=80)
        with mpmath.workdps(80):
            ex = mpmath.mpf(exact.p.numerator) / exact.p.denominator + \
                mpmath.mpf(exact.q.numerator) / exact.q.denominator * mpmath.sqrt(exact.d)
            assert abs(approx - ex) < mpmath.mpf(10) ** -60 * abs(ex)


# -- regulator rows and matrix ----------------------------------------------------------


def test_rows_match_printed_formulas_reference():
    g = GlueData(REF)
    for p in range(3):
        row = regulator_row(g, p, 192)
        oracle = row_from_printed_formulas(REF, p)
        with mpmath.workdps(60):
            for e, o in zip(row.entries, oracle):
                assert abs(interval_mid(e) - o) < mpmath.mpf(10) ** -50


@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(seeds_st)
def test_rows_match_printed_formulas_random(s):
    g = usable(s)
    assume(g is not None)
    for p in range(3):
        row = regulator_row(g, p, 128)
        with mpmath.workdps(60):
            for e, o in zip(row.entries, row_from_printed_formulas(s, p)):
                assert abs(interval_mid(e) - o) < mpmath.mpf(10) ** -30 * (1 + abs(o))


def test_first_entries_follow_cyclic_substitution():
    # E0 entries are cyclic images of one another; the other two entries are not
    g = GlueData(REF)
    forms = [row_forms(g, p) for p in range(3)]
    s = REF
    mids = [(s[1] + s[2] + 1) / 2, (s[2] + s[0] + 1) / 2, (s[0] + s[1] + 1) / 2]
    for p in range(3):
        assert forms[p][0] == {mids[p]: -1}


def test_row_swap_negates():
    g = GlueData(REF)
    for p in range(3):
        a, b = regulator_row(g, p, 128), regulator_row(g, p, 128, swap=True)
        for x, y in zip(a.entries, b.entries):
            (xl, xh), (yl, yh) = x._mpi_, y._mpi_
            assert mpmath.mp.make_mpf(xl) == mpmath.fneg(mpmath.mp.make_mpf(yh), exact=True)
            assert mpmath.mp.make_mpf(xh) == mpmath.fneg(mpmath.mp.make_mpf(yl), exact=True)


def test_complex_roots_give_zero_degenerate_row():
    g = GlueData((F(0), F(-3, 4), F(3, 4)))
    row = regulator_row(g, 0, 64)
    assert row.degenerate and all(e == 0 for e in row.entries)
    m = regulator_matrix(g, 64)
    assert m.degenerate and m.invertible == "no"


def test_reference_matrix_invertible():
    m = regulator_matrix(GlueData(REF), PrecisionPolicy(64, 512))
    assert m.invertible == "yes" and not m.degenerate
    assert not (m.determinant.a <= 0 <= m.determinant.b)
    assert m.rows[0].basis == BASIS


def test_det_invariant_under_swaps():
    g = GlueData(REF)
    ref = abs(regulator_matrix(g, 128).det_mid)
    for sw in itertools.product((False, True), repeat=3):
        assert abs(regulator_matrix(g, 128, swaps=sw).det_mid) == ref


def test_verdict_stable_under_precision_increase():
    rng = random.Random(4)
    for _ in range(10):
        s = tuple(F(rng.randint(1, 63), 64) for _ in range(3))
        g = usable(s)
        if g is None:
            continue
        base = regulator_matrix(g, PrecisionPolicy(64, 64)).invertible
        if base == "undecided-at-precision":
            continue
        for bits in (128, 256, 1024):
            assert regulator_matrix(g, PrecisionPolicy(bits, bits)).invertible == base


def test_precision_cap_reports_undecided():
    # 2 bits cannot separate the determinant from 0; the cap must stop the doubling
    m = regulator_matrix(GlueData(REF), PrecisionPolicy(2, 2))
    assert m.invertible == "undecided-at-precision" and m.precision == 2
    assert regulator_matrix(GlueData(REF), PrecisionPolicy(2, 64)).invertible == "yes"


def test_policy_from_env(monkeypatch):
    monkeypatch.setenv("REGLAB_MAX_BITS", "256")
    assert PrecisionPolicy.from_env().max_bits == 256
    with pytest.raises(ValueError):
        PrecisionPolicy(det_tolerance_mode="bogus")


def test_lambda_rescaling():
    a = regulator_matrix(GlueData(REF), 128)
    b = regulator_matrix(GlueData(tuple(2 * s for s in REF), lam=2), 128)
    assert a.det_mid == b.det_mid


def test_r4_variant_is_an_alias():
    g = r4_variant(*REF)
    m = regulator_matrix(g, 128)
    assert m.det_mid == regulator_matrix(GlueData(REF), 128).det_mid
    assert m.rows[0].basis[-1] == "c1(E3)"


# -- scans ----------------------------------------------------------------------------------


def test_scan_singleton_and_degenerate_entries():
    rep = scan_parameters([REF])
    assert rep.invertible_fraction == 1.0
    rep = scan_parameters([REF, (F(0), F(1), F(1, 2)), (F(0), F(-3, 4), F(3, 4))])
    assert [e.verdict for e in rep.entries] == ["invertible", "degenerate", "degenerate"]
    assert rep.counts == {"invertible": 1, "degenerate": 2, "undecided": 0}
    with pytest.raises(ValueError):
        scan_parameters([])


def test_sampler_deterministic_and_distinct():
    a, b = sample_triples(50, 64, seed=9), sample_triples(50, 64, seed=9)
    assert a == b
    assert all(len(set(t)) == 3 and all(0 < x < 1 and x.denominator <= 64 for x in t) for t in a)
    assert sample_triples(50, 64, seed=10) != a


def test_scan_csv_deterministic_with_workers():
    tr = sample_triples(12, 64, seed=3)
    assert scan_parameters(tr).to_csv() == scan_parameters(tr, workers=2).to_csv()
