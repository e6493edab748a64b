import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blowup_lab.asymptotics import (
    IDENTITY,
    ONE,
    AsymptoticAtom,
    AsymptoticProfile,
    Convergence,
    UnsupportedAsymptotics,
    atom_combine,
    atom_power,
    infer_profile,
    integral_converges_at_infinity,
    profile_compose,
    profile_invert,
)
from blowup_lab.families import PowerLogPhi, power_log_phi, power_log_profile
from blowup_lab.funcdsl import parse_expression

A = AsymptoticAtom
P = AsymptoticProfile

exps = st.floats(-5.0, 5.0, allow_nan=False)
atoms = st.builds(A, exps, exps, exps)


def test_combine_examples():
    assert atom_combine(A(1, 0, 0), A(2, -1, 0)) == A(3, -1, 0)
    assert atom_combine(ONE, A(2.5, -1, 3)) == A(2.5, -1, 3)
    assert atom_combine(A(1, 1, 0), A(1, 1, 0), "divide") == ONE
    with pytest.raises(ValueError):
        atom_combine(ONE, ONE, "add")


def test_power_examples():
    assert atom_power(A(2, -1, 0), 0.5) == A(1, -0.5, 0)
    assert atom_power(A(2, -1, 7), 0) == ONE


@pytest.mark.parametrize("p,nu", [(1.5, -4), (2, 1), (3, 2), (2.5, -0.3)])
def test_power_of_eta_atom(p, nu):
    eta = A(p / (p - 1), -nu / (p - 1), 0)
    assert atom_power(eta, (p - 1) / p) == A(1, -nu / p, 0)


def test_atoms_reject_non_finite():
    with pytest.raises(ValueError):
        A(math.inf, 0, 0)


def test_exponent_noise_snapped():
    assert A(-1.0000000000002, 0, 0).alpha == -1.0
    assert A(1 / 3 + 1e-13, 0, 0).alpha == 1 / 3
    assert A(-1.001, 0, 0).alpha == -1.001


@settings(max_examples=200)
@given(a=atoms, b=atoms, c=atoms)
def test_dominance_is_a_strict_total_order(a, b, c):
    assert not (a.dominates(b) and b.dominates(a))
    if a != b:
        assert a.dominates(b) or b.dominates(a)
    if a.dominates(b) and b.dominates(c):
        assert a.dominates(c)


@settings(max_examples=200)
@given(a=atoms, b=atoms)
def test_combine_round_trip(a, b):
    back = atom_combine(atom_combine(a, b), b, "divide")
    np.testing.assert_allclose(back.to_list(), a.to_list(), atol=1e-12)


# -- inversion of profiles ------------------------------------------------------------------

def test_invert_power_log_infinity_end():
    inv = profile_invert(power_log_profile(3.0, 2.0))
    assert inv.at_infinity == A(0.5, -1, 0)
    assert inv.at_zero == A(0.5, 1, 0)


def test_invert_square():
    assert profile_invert(P.power(2.0)) == P.power(0.5)


@pytest.mark.parametrize("p,nu", [(1.5, -4), (2, 0), (3, 3)])
def test_invert_eta_profile(p, nu):
    eta = P(A(p / (p - 1), nu / (p - 1), 0), A(p / (p - 1), -nu / (p - 1), 0))
    assert profile_invert(eta).at_infinity == A((p - 1) / p, nu / p, 0)


def test_invert_unsupported():
    with pytest.raises(UnsupportedAsymptotics):
        profile_invert(P(A(1, 0, 0), A(0, 1, 0)))


pos = st.floats(0.1, 5.0)
# exponents met in practice are rationals with small denominators
rat = st.fractions(-5, 5, max_denominator=24).map(float)
rat_pos = st.fractions(Fraction(1, 10), 5, max_denominator=24).map(float)


@settings(max_examples=200)
@given(a1=rat_pos, b1=rat, c1=rat, a2=rat_pos, b2=rat, c2=rat)
def test_invert_is_an_involution(a1, b1, c1, a2, b2, c2):
    pr = P(A(a1, b1, c1), A(a2, b2, c2))
    assert profile_invert(profile_invert(pr)) == pr


# -- composition ------------------------------------------------------------------------------

def test_compose_critical_chain():
    phi_inv = profile_invert(power_log_profile(3.0, 2.0))
    inner = profile_compose(phi_inv, A(2, 0, 0))
    assert inner == A(1, -1, 0)
    assert IDENTITY / inner == A(0, 1, 0)


@pytest.mark.parametrize("p,nu", [(2, 1.0), (3, 2.0), (1.5, 0.4)])
def test_compose_pure_log_argument(p, nu):
    eta_inv = P(A((p - 1) / p, -nu / p, 0), A((p - 1) / p, nu / p, 0))
    assert profile_compose(eta_inv, A(0, nu / (p - 1), 0)) == A(0, nu / p, nu / p)


@settings(max_examples=100)
@given(a=pos, b=exps, c=exps)
def test_compose_with_identity(a, b, c):
    outer = P(A(1, 0, 0), A(a, b, c))
    assert profile_compose(outer, IDENTITY) == outer.at_infinity


def test_compose_routes_decaying_argument_to_zero_end():
    outer = P(A(2, -1, 0), A(3, 1, 0))
    # outer(1/t) with outer ~ s^2 log^-1(1/s) near 0 gives t^-2 log^-1 t
    assert profile_compose(outer, A(-1, 0, 0)) == A(-2, -1, 0)


def test_compose_constant_argument():
    assert profile_compose(P(A(1, 0, 0), A(2, 5, 0)), ONE) == ONE


def test_compose_fourth_level_unsupported():
    outer = P(A(1, 0, 0), A(1, 0, 1))
    with pytest.raises(UnsupportedAsymptotics):
        profile_compose(outer, A(0, 2, 0))
    with pytest.raises(UnsupportedAsymptotics):
        profile_compose(P(A(1, 0, 0), A(1, 1, 0)), A(0, 0, 1))


def test_compose_at_zero_end():
    # outer = t^2 at both ends, inner ~ t near 0: composite ~ t^2 near 0
    assert profile_compose(P.power(2.0), A(1, 0, 0), "zero") == A(2, 0, 0)
    with pytest.raises(ValueError):
        profile_compose(P.power(2.0), A(1, 0, 0), "middle")


# -- convergence at infinity ----------------------------------------------------------------------

@pytest.mark.parametrize("atom,want", [
    ((-2, 0, 0), Convergence.CONVERGES),
    ((-1, -1, 0), Convergence.DIVERGES),
    ((-1, -1, -1.5), Convergence.CONVERGES),
    ((-1, -1, -1), Convergence.DIVERGES),
    ((-1, -1.01, 5), Convergence.CONVERGES),
    ((-0.99, -50, -50), Convergence.DIVERGES),
    ((0, 0, 0), Convergence.DIVERGES),
])
def test_convergence_table(atom, want):
    assert integral_converges_at_infinity(A(*atom)) is want


# -- profile inference --------------------------------------------------------------------------------

@pytest.mark.parametrize("text,zero,inf", [
    ("t^3 * log(e+t)", (3, 0, 0), (3, 1, 0)),
    ("t^2 * log(2+t)^1.5", (2, 0, 0), (2, 1.5, 0)),
    ("t + t^2", (1, 0, 0), (2, 0, 0)),
    ("t / log(e + 1/t)", (1, -1, 0), (1, 0, 0)),
    ("t * log(e + log(e + t))^(-2)", (1, 0, 0), (1, 0, -2)),
    ("1/(t^-1 + t^-2)", (2, 0, 0), (1, 0, 0)),
    ("min(t, t^2)", (2, 0, 0), (1, 0, 0)),
    ("3*t^2 + t - t^2", (1, 0, 0), (2, 0, 0)),
])
def test_infer_profile(text, zero, inf):
    pr = infer_profile(parse_expression(text))
    assert pr.at_zero == A(*zero)
    assert pr.at_infinity == A(*inf)


@pytest.mark.parametrize("text", ["exp(t)", "t^2 - t^2", "2^t", "log(t)"])
def test_infer_profile_unsupported(text):
    with pytest.raises(UnsupportedAsymptotics):
        infer_profile(parse_expression(text))


def test_profile_json_shape():
    pr = power_log_profile(2.0, -1.0)
    assert pr.to_dict() == {"at_zero": [1.0, 1.0, 0.0], "at_infinity": [1.0, -1.0, 0.0]}
    assert P.from_dict(pr.to_dict()) == pr


# -- the standard power-log representative ---------------------------------------------------------

P_VALUES = (1.5, 2.0, 3.0)
NU_VALUES = (-4.0, 0.0, 3.0)


@pytest.mark.parametrize("p", P_VALUES)
@pytest.mark.parametrize("nu", NU_VALUES)
def test_representative_log_ratio_at_large_t(p, nu):
    phi = power_log_phi(p, nu)
    x = math.log(1e8)
    recon = (p - 1) * x + nu * math.log(x)
    assert abs(float(phi.log(x)) / recon - 1.0) <= 0.02


@pytest.mark.parametrize("p", P_VALUES)
@pytest.mark.parametrize("nu", NU_VALUES + (-1.0, 1.0))
def test_representative_is_increasing_and_continuous(p, nu):
    rep = PowerLogPhi(p, nu)
    x = np.linspace(-60, 60, 20001)
    y = rep.log_value(x)
    assert np.all(np.diff(y) > 0)
    x_lo, y_lo, x_hi, y_hi = rep.junctions()
    assert float(rep.log_value(x_lo)) == pytest.approx(y_lo, abs=1e-9)
    assert float(rep.log_value(x_hi)) == pytest.approx(y_hi, abs=1e-9)


@pytest.mark.parametrize("p,nu", [(2.0, 1.0), (3.0, -2.0), (1.5, 0.5)])
def test_representative_inverse_exact_near_zero(p, nu):
    rep = PowerLogPhi(p, nu)
    a = p - 1
    s = np.array([1e-40, 1e-80])
    # phi^-1(s) = s^(1/a) log^(nu/a)(1/s) exactly in this region
    t = s ** (1 / a) * np.log(1 / s) ** (nu / a)
    np.testing.assert_allclose(rep(t), s, rtol=1e-12)


def test_representative_rejects_p_at_most_one():
    with pytest.raises(ValueError):
        PowerLogPhi(1.0, 0.0)
