import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.optimize import brentq

from blowup_lab.barrier import (
    barrier_grid,
    build_barrier,
    check_lower_bound,
    observed_order,
    verify_cauchy,
)

from helpers import expr_fn, power

LINEAR = power(1.0, "phi")
SQUARE = power(2.0, "phi")
GUARDED = expr_fn("t^3 * log(e+t)", "phi")


def test_one_dimensional_closed_form():
    tab = build_barrier(1.0, 3.0, 1.0, LINEAR, 1)
    np.testing.assert_allclose(tab.w, (tab.grid - 1.0) ** 2 / 2, rtol=1e-12, atol=1e-15)
    assert tab.w[-1] == pytest.approx(2.0, rel=1e-13)


def test_two_dimensional_closed_form():
    tab = build_barrier(1.0, math.e, 1.0, LINEAR, 2)
    r = tab.grid
    np.testing.assert_allclose(tab.w, (r ** 2 - 1) / 4 - np.log(r) / 2, rtol=1e-10, atol=1e-14)
    assert tab.w[-1] == pytest.approx((math.e ** 2 - 1) / 4 - 0.5, rel=1e-12)


def test_small_F_gives_small_barrier():
    w1 = build_barrier(1.0, 2.0, 1e-3, LINEAR, 2).w
    w2 = build_barrier(1.0, 2.0, 1e-9, LINEAR, 2).w
    np.testing.assert_allclose(w2, w1 * 1e-6, rtol=1e-9, atol=1e-300)
    assert np.max(w2) < 1e-9


def test_against_quadrature_oracle():
    r1, r2, F, n = 1.5, 2.5, 3.0, 3

    def phi_inv(y):
        if y == 0:
            return 0.0
        return brentq(lambda s: s ** 3 * math.log(math.e + s) - y, 0.0, 10.0, xtol=1e-15, rtol=1e-15)

    def integrand(tau):
        return phi_inv((tau ** n - r1 ** n) / (n * tau ** (n - 1)) * F)

    ref, _ = quad(integrand, r1, r2, epsabs=0, epsrel=1e-12, limit=200)
    tab = build_barrier(r1, r2, F, GUARDED, n)
    assert tab.w[-1] == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("phi", [LINEAR, SQUARE, GUARDED], ids=["t", "t^2", "t^3 log"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_table_invariants(phi, n):
    tab = build_barrier(0.7, 1.9, 2.0, phi, n)
    assert tab.w[0] == 0.0 and tab.w_prime[0] == 0.0
    assert np.all(np.diff(tab.w) > 0)
    assert np.all(np.diff(tab.w_prime) > 0)  # w' increasing: w convex on the grid
    slopes = np.diff(tab.w) / np.diff(tab.grid)
    assert np.all(np.diff(slopes) > 0)


def test_cauchy_residuals():
    assert verify_cauchy(build_barrier(1.0, 3.0, 1.0, LINEAR, 1)) <= 1e-10
    assert verify_cauchy(build_barrier(1.0, 3.0, 1.0, LINEAR, 2)) <= 1e-8
    assert verify_cauchy(build_barrier(1.0, 2.0, 2.0, SQUARE, 3)) <= 1e-6


@pytest.mark.parametrize("phi", [LINEAR, SQUARE, GUARDED], ids=["t", "t^2", "t^3 log"])
def test_residual_is_the_difference_truncation_error(phi):
    # r^(n-1) phi(w') = F (r^3 - r1^3)/3 for n = 3 whatever phi is, and the
    # three-point derivative of a cubic errs by h^2 q'''/6 = h^2 F/3 on a uniform grid
    r1, r2, nodes = 1.0, 3.0, 1000
    tab = build_barrier(r1, r2, 2.0, phi, 3, nodes)
    uniform = np.isclose(np.diff(tab.grid)[:-1], np.diff(tab.grid)[1:], rtol=1e-6, atol=0)
    r = tab.grid[1:-1][uniform]
    h = (r2 - r1) / (nodes - 1 - max(8, nodes // 20))
    np.testing.assert_allclose(tab.residuals[1:-1][uniform] / 2.0, h ** 2 / (3 * r ** 2), rtol=1e-3)


def test_verify_cauchy_with_explicit_phi():
    tab = build_barrier(1.0, 2.0, 1.0, SQUARE, 3)
    assert verify_cauchy(tab, SQUARE) == pytest.approx(verify_cauchy(tab))
    # the wrong phi is detected
    assert verify_cauchy(tab, LINEAR) > 0.1


def test_second_order_convergence():
    assert observed_order(1.0, 2.0, 1.0, GUARDED, 3) >= 1.9
    assert observed_order(1.0, 2.0, 1.0, LINEAR, 2) == math.inf


def test_grid_shape():
    g = barrier_grid(1.0, 2.0, 1000)
    assert g.size == 1000 and g[0] == 1.0 and g[-1] == 2.0
    assert np.all(np.diff(g) > 0)
    assert g[1] - g[0] < 1e-8  # geometric refinement at the degenerate start
    with pytest.raises(ValueError):
        barrier_grid(1.0, 2.0, 10)


@pytest.mark.parametrize("args", [(2.0, 1.0, 1.0), (1.0, 2.0, 0.0), (0.0, 1.0, 1.0)])
def test_build_rejects_bad_input(args):
    with pytest.raises(ValueError):
        build_barrier(*args, LINEAR, 2)


def test_lower_bound_examples():
    tab = build_barrier(1.0, 2.0, 1.0, LINEAR, 1)
    assert tab.w[-1] == pytest.approx(0.5)
    assert check_lower_bound(tab, 2.0)
    tab = build_barrier(1.0, 2.0, 1.0, LINEAR, 2)
    assert tab.w[-1] == pytest.approx(0.75 - math.log(2) / 2)
    assert check_lower_bound(tab, 2.0)


def test_lower_bound_precondition():
    tab = build_barrier(1.0, 3.0, 1.0, LINEAR, 2)
    with pytest.raises(ValueError, match="sigma"):
        check_lower_bound(tab, 2.0)
    with pytest.raises(ValueError):
        check_lower_bound(tab, 1.0)


@settings(max_examples=20, deadline=None)
@given(r1=st.floats(0.5, 10.0), frac=st.floats(0.05, 1.0), F=st.floats(-3.0, 3.0),
       n=st.integers(1, 3), k=st.integers(0, 2))
def test_doubling_F_never_decreases_w(r1, frac, F, n, k):
    phi = (LINEAR, SQUARE, GUARDED)[k]
    r2 = r1 * (1 + frac)
    a = build_barrier(r1, r2, 10 ** F, phi, n, nodes=128)
    b = build_barrier(r1, r2, 2 * 10 ** F, phi, n, nodes=128)
    assert np.all(b.w >= a.w)


def test_csv_export():
    buf = io.StringIO()
    tab = build_barrier(1.0, 2.0, 1.0, LINEAR, 2, nodes=64)
    tab.write_csv(buf)
    rows = buf.getvalue().splitlines()
    assert rows[0] == "r,w,w_prime,residual"
    assert len(rows) == 65
    assert rows[1].split(",")[:3] == ["1.0", "0.0", "0.0"]
