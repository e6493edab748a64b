import io
import json
import math

import numpy as np
import pytest

from blowup_lab.families import power_log_phi
from blowup_lab.radial_verify import (
    RadialCandidate,
    fit_power_exponent,
    log_required_coefficient,
    lphi_radial,
    required_coefficient,
    verify_example2,
)

from helpers import power

LINEAR = power(1.0, "phi")


# -- radial operator ---------------------------------------------------------------------------

def test_constant_profile():
    cand = RadialCandidate.custom(lambda r: np.full_like(r, 3.0), lambda r: np.zeros_like(r))
    np.testing.assert_array_equal(lphi_radial(cand, LINEAR, 3, [1.0, 5.0]), 0.0)


def test_quadratic_profile_in_three_dimensions():
    r0 = 1.0
    cand = RadialCandidate.custom(lambda r: r ** 2 - r0 ** 2, lambda r: 2 * r, r0)
    np.testing.assert_allclose(lphi_radial(cand, LINEAR, 3, [1.5, 4.0, 40.0]), 6.0, rtol=1e-8)


def test_logarithm_is_harmonic_in_the_plane():
    cand = RadialCandidate.custom(lambda r: np.log(r / 2.0), lambda r: 1.0 / r, 2.0)
    np.testing.assert_allclose(lphi_radial(cand, LINEAR, 2, [3.0, 30.0]), 0.0, atol=1e-9)


def test_p_laplacian_of_a_power():
    # phi = t^(p-1), U = r^m: L U = m^(p-1) (m-1)(p-1) + n - 1) r^((m-1)(p-1) - 1)
    p, m, n = 3.0, 2.0, 3
    phi = power(p - 1.0)
    cand = RadialCandidate.custom(lambda r: r ** m, lambda r: m * r ** (m - 1))
    r = np.array([0.5, 2.0, 7.0])
    want = m ** (p - 1) * ((m - 1) * (p - 1) + n - 1) * r ** ((m - 1) * (p - 1) - 1)
    np.testing.assert_allclose(lphi_radial(cand, phi, n, r), want, rtol=1e-8)


def test_finite_difference_derivative_default():
    cand = RadialCandidate.custom(lambda r: r ** 2 - 1.0, r0=1.0)
    np.testing.assert_allclose(lphi_radial(cand, LINEAR, 3, [2.0, 5.0]), 6.0, rtol=1e-6)


def test_radius_inside_r0_rejected():
    cand = RadialCandidate.custom(lambda r: r ** 2 - 1.0, lambda r: 2 * r, 1.0)
    with pytest.raises(ValueError):
        lphi_radial(cand, LINEAR, 3, [0.5])


def test_decreasing_profile_rejected():
    cand = RadialCandidate.custom(lambda r: 1.0 / r, lambda r: -1.0 / r ** 2)
    with pytest.raises(ValueError, match="negative"):
        lphi_radial(cand, LINEAR, 3, [2.0])


# -- required coefficient ---------------------------------------------------------------------------

def test_required_coefficient_zero_for_harmonic_profile():
    cand = RadialCandidate.custom(lambda r: np.log(r / 2.0), lambda r: 1.0 / r, 2.0)
    np.testing.assert_allclose(required_coefficient(cand, power(1.0), LINEAR, 2, [5.0, 9.0]), 0.0, atol=1e-9)


def test_required_coefficient_needs_positive_profile():
    cand = RadialCandidate.custom(lambda r: r ** 2 - 1.0, lambda r: 2 * r, 0.0)
    with pytest.raises(ValueError):
        required_coefficient(cand, power(1.0), LINEAR, 3, [0.5])


def test_stretched_coefficient_against_direct_evaluation():
    """Log-form assembly against plain float arithmetic where nothing overflows."""
    p, nu, s, n, r0 = 2.0, -3.0, -2.5, 3, 100.0
    phi = power_log_phi(p, nu)
    cand = RadialCandidate.stretched_exponential(p, nu, s, r0)
    k = (s + p) / (p + nu)
    U = lambda r: np.exp(r ** k) - math.exp(r0 ** k)
    dU = lambda r: k * r ** (k - 1) * np.exp(r ** k)
    Q = lambda r: r ** (n - 1) * phi(dU(r))
    r = np.array([300.0, 1000.0, 3000.0])
    h = 1e-3 * r
    dQ = (Q(r - 2 * h) - 8 * Q(r - h) + 8 * Q(r + h) - Q(r + 2 * h)) / (12 * h)
    want = dQ / r ** (n - 1) / U(r) ** (p - 1)
    got = np.exp(log_required_coefficient(cand, power(p - 1.0), phi, n, r))
    np.testing.assert_allclose(got, want, rtol=1e-6)
    np.testing.assert_allclose(required_coefficient(cand, power(p - 1.0), phi, n, r), want, rtol=1e-6)


def test_custom_and_family_paths_agree():
    p, nu, s, n, r0 = 3.0, -4.0, -3.5, 3, 50.0
    phi = power_log_phi(p, nu)
    fam = RadialCandidate.stretched_exponential(p, nu, s, r0)
    k = (s + p) / (p + nu)
    cus = RadialCandidate.custom(lambda r: np.exp(r ** k) - math.exp(r0 ** k),
                                 lambda r: k * r ** (k - 1) * np.exp(r ** k), r0)
    r = np.array([120.0, 800.0])
    g = power(p - 1.0)
    np.testing.assert_allclose(log_required_coefficient(fam, g, phi, n, r),
                               log_required_coefficient(cus, g, phi, n, r), atol=1e-6)


def test_doubly_exponential_evaluates_without_overflow():
    cand = RadialCandidate.doubly_exponential(2.0, 1.0, r0=10.0)
    r = np.array([20.0, 1e3, 1e4])
    lc = log_required_coefficient(cand, power(1.0), LINEAR, 3, r)
    assert np.all(np.isfinite(lc))
    # U = exp(exp(r^1.5)) is far beyond floats at r = 1e4, yet log(U'/U) stays finite
    assert np.all(np.isfinite(cand.log_ratio(r)))


def test_doubly_exponential_coefficient_outgrows_every_power():
    """For phi = g = t the required coefficient is about exp(2 r^k) times a power of r."""
    cand = RadialCandidate.doubly_exponential(2.0, 0.0, r0=10.0)
    r = np.geomspace(20.0, 1e4, 40)
    lc = log_required_coefficient(cand, power(1.0), LINEAR, 3, r)
    k = 1.0
    np.testing.assert_allclose((lc - 2 * r ** k) / np.log(r), (lc[-1] - 2 * r[-1] ** k) / np.log(r[-1]),
                               atol=0.6)
    assert np.all(np.diff(lc) > 0)


def test_family_validity():
    with pytest.raises(ValueError):
        RadialCandidate.stretched_exponential(2.0, -3.0, -1.0)    # k < 0


# -- exponent fit -----------------------------------------------------------------------------------

def test_fit_exact_power():
    r = np.geomspace(1.0, 1e3, 30)
    slope, resid = fit_power_exponent(r, r ** 3)
    assert slope == pytest.approx(3.0, abs=1e-10) and resid < 1e-10


def test_fit_perturbed_power():
    r = np.geomspace(1e2, 1e6, 40)
    slope, resid = fit_power_exponent(r, r ** 2 * (1 + 1 / np.log(r)))
    assert slope == pytest.approx(2.0, abs=0.05)
    assert resid > 1e-4


def test_fit_constant():
    r = np.geomspace(1.0, 10.0, 20)
    assert fit_power_exponent(r, np.full(20, 7.0))[0] == pytest.approx(0.0, abs=1e-12)


def test_fit_log_values_beyond_float_range():
    r = np.geomspace(1.0, 1e3, 25)
    slope, _ = fit_power_exponent(r, log_values=1e4 + 1.5 * np.log(r))
    assert slope == pytest.approx(1.5)


def test_fit_errors():
    r = np.geomspace(1.0, 10.0, 20)
    with pytest.raises(ValueError, match="positive"):
        fit_power_exponent(r, np.linspace(-1, 1, 20))
    with pytest.raises(ValueError, match="samples"):
        fit_power_exponent(r[:10], r[:10])


# -- witnesses -------------------------------------------------------------------------------------------

def test_stretched_witness_recovers_s():
    rep = verify_example2("stretched_exponential", 2.0, -3.0, -2.5)
    assert rep.passed and rep.positive
    assert rep.fitted_s == pytest.approx(-2.5, abs=0.05 * 3.5)
    assert rep.criteria_verdict == "Inconclusive"


def test_doubly_witness_at_nu_equal_minus_p_recovers_s():
    # at nu = -p the growth of phi' cancels the doubly exponential factor
    rep = verify_example2("doubly_exponential", 2.0, -2.0, 1.0)
    assert rep.passed
    assert rep.fitted_s == pytest.approx(1.0, abs=0.1)


@pytest.mark.parametrize("family,p,nu,s", [
    ("stretched_exponential", 2.0, -3.0, -1.0),     # s >= -p
    ("stretched_exponential", 2.0, -1.0, -3.0),     # nu >= -p
    ("doubly_exponential", 2.0, -3.0, 0.0),         # nu < -p
    ("doubly_exponential", 1.0, 0.0, 0.0),          # p <= 1
    ("other", 2.0, 0.0, 0.0),
])
def test_witness_preconditions(family, p, nu, s):
    with pytest.raises(ValueError):
        verify_example2(family, p, nu, s)


def test_report_exports():
    rep = verify_example2("stretched_exponential", 3.0, -4.0, -3.5, points=25)
    d = json.loads(json.dumps(rep.to_dict(), allow_nan=False))
    assert d["pass"] is True and d["target_s"] == -3.5
    buf = io.StringIO()
    rep.write_csv(buf)
    rows = buf.getvalue().splitlines()
    assert rows[0] == "r,log_c_req,log_fit" and len(rows) == 26


def test_explicit_r0_respected():
    rep = verify_example2("stretched_exponential", 2.0, -3.0, -2.5, r0=5000.0, points=20)
    assert rep.r0 == 5000.0
    assert rep.radii[0] == pytest.approx(1e4) and rep.radii[-1] == pytest.approx(5e6)
