import cmath
import math

import mpmath
import pytest
from hypothesis import assume, given, settings, strategies as st

from reglab.elliptic import (
    CLAIM1_ROWS, EllipticCurve, QuadratureConfig, QuadratureError, RealForm,
    RegulatorIntegrand, degenerate_integral, det2x2_claim, integrate_many, integrate_regulator,
    kernel_omega, singular_points, verify_w_substitution,
)

E = EllipticCurve.parse("x^3 - x")
FAST = QuadratureConfig(levels=2, angular_panels=8, radial_panels=4, layers=6)
ANN = (0.1, 10.0)


# -- curves and kernels -----------------------------------------------------------------


def test_curve_parse_and_refusals():
    assert E.coeffs == (0, -1, 0, 1)
    assert sorted(z.real for z in E.branch_points()) == pytest.approx([-1, 0, 1])
    with pytest.raises(ValueError):
        EllipticCurve.parse("x^3 - 3*x + 2")  # double root at 1
    with pytest.raises(ValueError):
        EllipticCurve.parse("x^2 + 1")
    with pytest.raises(ValueError):
        RegulatorIntegrand("0")


def _on_curve(x):
    return x, cmath.sqrt(E.h(x))


def test_kernel_vanishing_examples():
    # omega1 density is Im(1/(x conj y)), which vanishes when conj(x) y is real
    x, y = _on_curve(2.0 + 0j)
    assert kernel_omega(E, "omega1", x, y) == 0.0
    # h(1/2) < 0, so y is imaginary and conj(x) y has no real part
    x, y = _on_curve(0.5 + 0j)
    assert abs((x.conjugate() * y).real) == 0.0
    assert kernel_omega(E, "omega2", x, y) == 0.0
    assert kernel_omega(E, "omega1", x, y) != 0.0
    with pytest.raises(QuadratureError):
        kernel_omega(E, "omega1", 1.0, 0.0)


@given(st.complex_numbers(min_magnitude=0.2, max_magnitude=5, allow_nan=False, allow_infinity=False),
       st.sampled_from(list(RealForm)))
def test_kernel_odd_under_sheet_swap(x, form):
    y = cmath.sqrt(E.h(x))
    assume(abs(y) > 1e-3)
    a = kernel_omega(E, form, x, y)
    b = kernel_omega(E, form, x, -y)
    assert a == pytest.approx(-b, rel=1e-12, abs=1e-15)


def test_kernel_matches_mpmath_density():
    x = 0.7 + 1.3j
    y = cmath.sqrt(E.h(x))
    with mpmath.workdps(30):
        A = 1 / (mpmath.mpc(x) * mpmath.conj(mpmath.mpc(y)))
    assert kernel_omega(E, "omega1", x, y) == pytest.approx(float(A.imag), rel=1e-12)
    assert kernel_omega(E, "omega2", x, y) == pytest.approx(-float(A.real), rel=1e-12)


def test_singular_points_include_zeros_of_f():
    pts = singular_points(E, [RegulatorIntegrand("y + x")])
    # y = -x on the curve: x^2 = x^3 - x, so x = 0 or x = (1 +- sqrt 5)/2
    for r in (0.0, (1 + 5 ** 0.5) / 2, (1 - 5 ** 0.5) / 2):
        assert min(abs(p - r) for p in pts) < 1e-12


# -- elliptic integrals -------------------------------------------------------------------


def test_constant_f_gives_zero():
    res = integrate_regulator(E, RegulatorIntegrand("1"))
    assert res.value == 0.0 and res.converged


def test_f_depending_on_x_only_cancels_between_sheets():
    vals = integrate_many(E, [RegulatorIntegrand("x + 2", "x", f) for f in RealForm], FAST)
    for v in vals:
        assert abs(v.value) < 1e-12


def test_sheet_swap_of_f_negates():
    a, b = integrate_many(E, [RegulatorIntegrand("y + x"), RegulatorIntegrand("-y + x")], FAST)
    assert a.value == pytest.approx(-b.value, rel=1e-9)


def test_stokes_constant_f():
    # log|c| times the integral of an exact form: zero up to quadrature error
    res = integrate_regulator(E, RegulatorIntegrand("2", "y - x + 2"), FAST)
    assert abs(res.value) < 1e-4


def test_power_of_f_scales_value():
    a, b = integrate_many(E, [RegulatorIntegrand("y + x"), RegulatorIntegrand("(y + x)^3")], FAST)
    assert b.value == pytest.approx(3 * a.value, rel=1e-9)


def test_refinement_levels_agree():
    res = integrate_regulator(E, RegulatorIntegrand("y + x", "x", "omega2"), QuadratureConfig(levels=3))
    vals = [v for _, v in res.refinement_trace]
    assert len(vals) == 4 and res.converged
    assert abs(vals[-1] - vals[-2]) <= 1e-4 * abs(vals[-1])


def test_two_by_two_det_nonzero_and_row_swap_negates():
    c = det2x2_claim(E)
    assert c.verdict == "nonzero" and abs(c.det) > c.det_error
    swapped = det2x2_claim(E, rows=tuple(reversed(CLAIM1_ROWS)))
    assert swapped.det == pytest.approx(-c.det, rel=1e-12)


def test_config_validation():
    with pytest.raises(QuadratureError):
        QuadratureConfig(inner_radius=2.0, outer_radius=1.0)
    with pytest.raises(QuadratureError):
        QuadratureConfig(exclusion_radius=0.0)


# -- cuspidal limit ------------------------------------------------------------------------


def test_reflection_zeros():
    ref = degenerate_integral(("f1", "omega1"), ANN).value
    for pair in (("f1", "omega2"), ("f2", "omega1")):
        assert abs(degenerate_integral(pair, ANN).value) < 1e-6 * ref


def test_f1_omega1_positive_and_growing():
    vals = [degenerate_integral("f1,omega1", (eps, 10.0)).value for eps in (0.2, 0.1, 0.05, 0.025)]
    assert vals[0] > 0 and all(b > a for a, b in zip(vals, vals[1:]))
    # halving eps adds pi log 2: the inner region sees log|z + i| ~ Im(z) near 0
    for a, b in zip(vals, vals[1:]):
        assert b - a == pytest.approx(math.pi * math.log(2), rel=2e-3)


def test_f2_omega2_is_minus_f1_omega1():
    chk = verify_w_substitution(ANN)
    assert chk.passed
    assert chk.value_f2_omega2 == pytest.approx(-chk.value_f1_omega1, rel=1e-6)
    with pytest.raises(QuadratureError):
        verify_w_substitution(ANN, annulus_w=(0.2, 10.0))


def test_degenerate_refusals_and_empty_annulus():
    with pytest.raises(QuadratureError):
        degenerate_integral("f1,omega1", (0.0, 10.0))
    with pytest.raises(QuadratureError):
        degenerate_integral("f3,omega1", ANN)
    with pytest.raises(QuadratureError):
        degenerate_integral("f1,omega1", (2.0, 1.0))
    assert degenerate_integral("f2,omega2", (3.0, 3.0)).value == 0.0


@settings(max_examples=5, deadline=None)
@given(st.floats(0.05, 0.5), st.floats(1.5, 20.0))
def test_degenerate_zero_pairs_any_annulus(eps, R):
    cfg = QuadratureConfig(inner_radius=0.1, outer_radius=10.0, angular_panels=8, radial_panels=8,
                           order=8, layers=6, levels=1)
    ref = abs(degenerate_integral("f1,omega1", (eps, R), cfg).value)
    for pair in ("f1,omega2", "f2,omega1"):
        assert abs(degenerate_integral(pair, (eps, R), cfg).value) <= 1e-9 * max(ref, 1.0)
