"""Radial phi-Laplacian of explicit profiles and the coefficient they require.

For a radial ``u(x) = U(|x|)`` with ``U' > 0``,

    L_phi u = r^(1-n) (r^(n-1) phi(U'))',

and ``c_req(r) = L_phi u / g(U(r))`` is the smallest coefficient for which
``u`` solves ``L_phi u >= c g(u)``.  The two exponential families below
are glued to zero at ``r0``:

* ``doubly_exponential``: ``U = exp(exp(r^k)) - exp(exp(r0^k))``,
  ``k = (p + |s|)/p``;
* ``stretched_exponential``: ``U = exp(r^k) - exp(r0^k)``,
  ``k = (s + p)/(p + nu)``.

Both are written ``U = exp(V) - exp(V(r0))``.  Everything is evaluated in
log form; for the first family even ``log U`` overflows once ``r^k > 709``,
so the coefficient is assembled from ``log(U'/U)`` and ``log log U'``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .criteria import ProblemSpec, decide_theorem
from .families import power_log_phi
from .funcdsl import MonotoneFunction

__all__ = [
    "FAMILIES",
    "ExampleReport",
    "RadialCandidate",
    "fit_power_exponent",
    "lphi_radial",
    "log_required_coefficient",
    "required_coefficient",
    "verify_example2",
]

FAMILIES = ("doubly_exponential", "stretched_exponential", "custom")
FD_STEP = 1e-4
DIRECT_PSI_LIMIT = 1e6  # beyond this log U' the profile of phi replaces phi itself
MIN_SAMPLES = 20
ASYMPTOTIC_CORRECTION = 0.1


@dataclass(frozen=True)
class RadialCandidate:
    """Radial profile ``U`` with ``U = 0`` on ``[0, r0]``.

    ``log_value`` and ``log_derivative`` map ``r > r0`` to ``log U`` and
    ``log U'``.  The exponential families also carry ``log_ratio``
    (``log(U'/U)``) and ``loglog_derivative`` (``log log U'``), which stay
    finite where ``log U`` itself does not, and ``correction``, the relative
    size ``|log V'| / V`` of the sub-leading term in ``log U' = V + log V'``.
    """

    log_value: Callable
    log_derivative: Callable
    family: str = "custom"
    params: dict = field(default_factory=dict)
    r0: float = 0.0
    log_ratio: Optional[Callable] = None
    loglog_derivative: Optional[Callable] = None
    correction: Optional[Callable] = None

    def value(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(over="ignore"):
            return np.where(r > self.r0, np.exp(self.log_value(np.maximum(r, self.r0 * (1 + 1e-15)))), 0.0)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(over="ignore"):
            return np.where(r > self.r0, np.exp(self.log_derivative(np.maximum(r, self.r0 * (1 + 1e-15)))), 0.0)

    @classmethod
    def custom(cls, U: Callable, dU: Optional[Callable] = None, r0: float = 0.0) -> "RadialCandidate":
        """Wrap plain callables; ``U'`` defaults to a central difference."""
        if dU is None:
            def dU(r):
                r = np.asarray(r, dtype=float)
                h = FD_STEP * r
                return (U(r + h) - U(r - h)) / (2 * h)

        def log_of(fn):
            def lf(r):
                with np.errstate(divide="ignore", invalid="ignore"):
                    v = np.asarray(fn(np.asarray(r, dtype=float)), dtype=float)
                    return np.where(v > 0, np.log(np.abs(v)), np.where(v == 0, -np.inf, np.nan))
            return lf

        return cls(log_of(U), log_of(dU), "custom", {}, float(r0))

    @classmethod
    def _exponential(cls, family, k, log_V, V, log_dV, params, r0):
        log_V0 = float(log_V(np.asarray(r0, dtype=float)))

        def tail(r):
            # log(1 - exp(V0 - V)) with V - V0 = V (1 - exp(log V0 - log V)), safe for huge V
            lv = log_V(r)
            with np.errstate(over="ignore", divide="ignore"):
                gap = np.exp(lv + np.log(-np.expm1(log_V0 - lv)))
                return np.log1p(-np.exp(-gap))

        def log_value(r):
            return V(r) + tail(r)

        def log_derivative(r):
            return V(r) + log_dV(r)

        def log_ratio(r):
            return log_dV(r) - tail(r)

        def loglog_derivative(r):
            v = V(r)
            with np.errstate(invalid="ignore", divide="ignore"):
                return log_V(r) + np.log1p(np.where(np.isinf(v), 0.0, log_dV(r) / v))

        def correction(r):
            v = V(r)
            with np.errstate(invalid="ignore", divide="ignore"):
                return np.where(np.isinf(v), 0.0, np.abs(log_dV(r)) / v)

        return cls(log_value, log_derivative, family, dict(params, k=k), float(r0), log_ratio,
                   loglog_derivative, correction)

    @classmethod
    def doubly_exponential(cls, p: float, s: float, r0: float = 10.0, nu: float = 0.0) -> "RadialCandidate":
        k = (p + abs(s)) / p

        def log_V(r):
            return np.asarray(r, dtype=float) ** k

        def V(r):
            with np.errstate(over="ignore"):
                return np.exp(log_V(r))

        def log_dV(r):
            r = np.asarray(r, dtype=float)
            return r ** k + math.log(k) + (k - 1) * np.log(r)

        return cls._exponential("doubly_exponential", k, log_V, V, log_dV,
                                {"p": p, "nu": nu, "s": s}, r0)

    @classmethod
    def stretched_exponential(cls, p: float, nu: float, s: float, r0: float = 10.0) -> "RadialCandidate":
        k = (s + p) / (p + nu)
        if not k > 0:
            raise ValueError("the stretched exponent (s + p)/(p + nu) must be positive")

        def V(r):
            return np.asarray(r, dtype=float) ** k

        def log_V(r):
            return k * np.log(np.asarray(r, dtype=float))

        def log_dV(r):
            r = np.asarray(r, dtype=float)
            return math.log(k) + (k - 1) * np.log(r)

        return cls._exponential("stretched_exponential", k, log_V, V, log_dV,
                                {"p": p, "nu": nu, "s": s}, r0)


def _richardson(fn, r):
    r = np.asarray(r, dtype=float)
    h = FD_STEP * r

    def d(step):
        return (fn(r + step) - fn(r - step)) / (2 * step)

    return (4.0 * d(h / 2) - d(h)) / 3.0


def lphi_radial(candidate: RadialCandidate, phi: MonotoneFunction, n: int, r):
    """``r^(1-n) (r^(n-1) phi(U'))'`` by a Richardson-extrapolated central
    difference (step ``1e-4 r``) of ``log(r^(n-1) phi(U'))``."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= candidate.r0):
        raise ValueError("evaluation radius must exceed r0")
    h = FD_STEP * r
    stencil = np.concatenate([r - h, r - h / 2, r, r + h / 2, r + h])
    ld = candidate.log_derivative(stencil)
    if np.any(np.isnan(ld)):
        raise ValueError("U' is negative on the evaluation stencil")
    flat = np.isneginf(ld).reshape(5, -1)
    if np.any(flat.any(axis=0) & ~flat.all(axis=0)):
        raise ValueError("U' vanishes on part of the evaluation stencil")
    out = np.zeros_like(r)
    live = ~flat.any(axis=0)
    if np.any(live):
        rl = r[live]

        def Q(x):
            return (n - 1) * np.log(x) + phi.log(candidate.log_derivative(x))

        dQ = _richardson(Q, rl)
        with np.errstate(over="ignore"):
            out[live] = np.exp(Q(rl) - (n - 1) * np.log(rl)) * dQ
    return out


def _power_exponent(g: MonotoneFunction) -> Optional[float]:
    """The exponent ``a`` when ``g(t) = t^a`` exactly, else ``None``."""
    xs = np.array([-2.0, -1.0, 0.0, 1.0, 3.0])
    lg = g.log(xs)
    if not np.all(np.isfinite(lg)) or abs(lg[2]) > 1e-12:
        return None
    a = lg[3]
    if np.allclose(lg, a * xs, rtol=1e-12, atol=1e-12):
        return float(a)
    return None


def _log_psi(phi: MonotoneFunction, a: float, x, log_x):
    """``log(phi(T) / T^a)`` at ``log T = x``, from the profile of phi for huge ``x``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    direct = np.isfinite(x) & (x <= DIRECT_PSI_LIMIT)
    if np.any(direct):
        out[direct] = phi.log(x[direct]) - a * x[direct]
    if np.any(~direct):
        if phi.profile is None:
            raise ValueError("phi needs an asymptotic profile to be evaluated this far out")
        atom = phi.profile.at_infinity
        if abs(atom.alpha - a) > 1e-12:
            raise ValueError("the power of phi at infinity does not match g")
        lx = np.asarray(log_x, dtype=float)[~direct]
        out[~direct] = atom.beta * lx + atom.gamma * np.log(lx)
    return out


def log_required_coefficient(candidate: RadialCandidate, g: MonotoneFunction, phi: MonotoneFunction,
                             n: int, r):
    """``log c_req(r)``; ``nan`` where ``c_req <= 0``.

    For the exponential families with ``g(t) = t^a`` this uses

        c_req = r^(1-n) e^R (R' + a U'/U),
        R = (n-1) log r + a log(U'/U) + log(phi(U') / U'^a),

    which never forms ``U`` itself.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    a = _power_exponent(g)
    if candidate.log_ratio is None or a is None:
        lu = candidate.log_value(r)
        gl = g.log(lu)
        val = lphi_radial(candidate, phi, n, r)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(val > 0, np.log(np.where(val > 0, val, 1.0)) - gl, np.nan)

    def R(x):
        return ((n - 1) * np.log(x) + a * candidate.log_ratio(x)
                + _log_psi(phi, a, candidate.log_derivative(x), candidate.loglog_derivative(x)))

    dR = _richardson(R, r)
    D = candidate.log_ratio(r)
    with np.errstate(under="ignore"):
        inner = a + dR * np.exp(-D)
    with np.errstate(invalid="ignore"):
        out = R(r) - (n - 1) * np.log(r) + D + np.log(inner)
    return np.where(inner > 0, out, np.nan)


def required_coefficient(candidate: RadialCandidate, g: MonotoneFunction, phi: MonotoneFunction, n: int, r):
    """``L_phi U / g(U)`` at ``r`` (may overflow to ``inf``)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(~(candidate.value(r) > 0)):
        raise ValueError("U must be positive at the evaluation radius")
    lv = log_required_coefficient(candidate, g, phi, n, r)
    if candidate.log_ratio is None or _power_exponent(g) is None:
        val = lphi_radial(candidate, phi, n, r)
        gu = g(candidate.value(r))
        if np.any(gu <= 0):
            raise ValueError("g(U) must be positive")
        return val / gu
    with np.errstate(over="ignore"):
        return np.where(np.isnan(lv), -1.0, np.exp(lv))


def fit_power_exponent(r, values=None, log_values=None):
    """Least-squares slope of ``log value`` against ``log r``.

    Returns ``(exponent, residual)`` where ``residual`` is the largest
    relative deviation ``|value / fit - 1|``.  Pass ``log_values`` instead
    of ``values`` for data beyond the float range.

    >>> fit_power_exponent(np.geomspace(1, 10, 20), np.geomspace(1, 10, 20) ** 3)[0]
    3.0000000000000004
    """
    r = np.asarray(r, dtype=float)
    if log_values is None:
        values = np.asarray(values, dtype=float)
        if np.any(~(values > 0)):
            raise ValueError("all samples must be positive")
        log_values = np.log(values)
    log_values = np.asarray(log_values, dtype=float)
    if r.size < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples")
    if np.any(~np.isfinite(log_values)):
        raise ValueError("all samples must be positive and finite")
    x = np.log(r)
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, log_values, rcond=None)
    dev = log_values - A @ coef
    with np.errstate(over="ignore"):
        residual = float(np.max(np.abs(np.expm1(dev))))
    return float(coef[0]), residual


@dataclass(frozen=True)
class ExampleReport:
    family: str
    p: float
    nu: float
    n: int
    r0: float
    target_s: float
    fitted_s: float
    fit_residual: float
    positive: bool
    log_min_ratio: float
    passed: bool
    criteria_verdict: str
    radii: np.ndarray = field(repr=False, compare=False)
    log_c_req: np.ndarray = field(repr=False, compare=False)

    @property
    def log_ratio_drift(self) -> float:
        """Change of ``log(c_req / r^s)`` from the first to the last radius."""
        ratio = self.log_c_req - self.target_s * np.log(self.radii)
        return float(ratio[-1] - ratio[0]) if self.positive else float("nan")

    def to_dict(self):
        return {
            "family": self.family,
            "p": self.p,
            "nu": self.nu,
            "n": self.n,
            "r0": self.r0,
            "target_s": self.target_s,
            "fitted_s": self.fitted_s,
            "fit_residual": self.fit_residual,
            "positive": self.positive,
            "log_ratio_drift": self.log_ratio_drift,
            "log_min_ratio": self.log_min_ratio,
            "pass": self.passed,
            "criteria_verdict": self.criteria_verdict,
        }

    def write_csv(self, stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["r", "log_c_req", "log_fit"])
        slope = self.fitted_s
        x = np.log(self.radii)
        intercept = float(np.mean(self.log_c_req - slope * x)) if self.positive else float("nan")
        for r, lc, xi in zip(self.radii, self.log_c_req, x):
            writer.writerow([repr(float(r)), repr(float(lc)), repr(float(intercept + slope * xi))])


def _candidate(family, p, nu, s, r0):
    if family == "doubly_exponential":
        return RadialCandidate.doubly_exponential(p, s, r0, nu)
    return RadialCandidate.stretched_exponential(p, nu, s, r0)


def verify_example2(family: str, p: float, nu: float, s: float, n: int = 3,
                    phi: Optional[MonotoneFunction] = None, r0: Optional[float] = None,
                    points: int = 40, max_r0: float = 1e6) -> ExampleReport:
    """Sample ``c_req`` on ``[2 r0, 1000 r0]`` and fit its power of ``r``.

    The witness passes when ``c_req > 0`` throughout and the fitted exponent
    is within ``0.05 (1 + |s|)`` of ``s``.  Without ``r0`` the search starts
    at 10 and doubles until ``c_req > 0`` on ``[2 r0, 4 r0]`` and the profile
    is in its asymptotic regime there: ``log V'`` is at most
    ``ASYMPTOTIC_CORRECTION`` times ``V`` at ``2 r0``.
    """
    if family not in ("doubly_exponential", "stretched_exponential"):
        raise ValueError(f"unknown family {family!r}")
    if not p > 1:
        raise ValueError("p must exceed 1")
    if family == "doubly_exponential" and not nu >= -p:
        raise ValueError("the doubly exponential family needs nu >= -p")
    if family == "stretched_exponential" and not (nu < -p and s < -p):
        raise ValueError("the stretched exponential family needs nu < -p and s < -p")
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    n = int(n)
    phi = power_log_phi(p, nu) if phi is None else phi
    g = MonotoneFunction.power(p - 1.0, "g")

    if r0 is None:
        r0 = 10.0
        while True:
            probe = np.geomspace(2 * r0, 4 * r0, 8)
            cand = _candidate(family, p, nu, s, r0)
            lc = log_required_coefficient(cand, g, phi, n, probe)
            if np.all(np.isfinite(lc)) and cand.correction(2 * r0) <= ASYMPTOTIC_CORRECTION:
                break
            r0 *= 2.0
            if r0 > max_r0:
                raise ValueError(f"no r0 up to {max_r0:g} makes the required coefficient positive "
                                 "in the asymptotic regime")
    cand = _candidate(family, p, nu, s, float(r0))
    radii = np.geomspace(2 * r0, 1000 * r0, max(points, MIN_SAMPLES))
    lc = log_required_coefficient(cand, g, phi, n, radii)
    positive = bool(np.all(np.isfinite(lc)))
    if positive:
        fitted, resid = fit_power_exponent(radii, log_values=lc)
        log_min_ratio = float(np.min(lc - s * np.log(radii)))
    else:
        fitted, resid, log_min_ratio = float("nan"), float("nan"), float("nan")
    passed = positive and abs(fitted - s) <= 0.05 * (1 + abs(s))

    spec = ProblemSpec(max(n, 2), phi, g, MonotoneFunction.power(s, "f"), r0=float(r0))
    verdict = decide_theorem(spec, "2.2", engine="symbolic")
    return ExampleReport(family, float(p), float(nu), n, float(r0), float(s), fitted, resid, positive,
                         log_min_ratio, bool(passed), verdict.result.value, radii, lc)
