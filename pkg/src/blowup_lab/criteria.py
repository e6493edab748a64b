"""Blow-up criteria: the four improper integrals and the two verdicts.

For ``phi``, ``g`` and ``f`` the four integrands are

    A(t) = eta^-1( t / phi^-1(g(t)) ) / t                          from 1
    B(r) = eta( r / eta^-1(phi^-1(1/f(r))) ) / r                   from r0
    C(t) = 1 / phi^-1(g(t))                                        from 1
    D(r) = min{ eta(r) / (r phi^-1(1/f(r))), 1 / eta^-1(phi^-1(1/f(r))) }

Verdict "2.1" is BlowUp when A converges, B diverges and eta is convex;
verdict "2.2" is BlowUp when A and C converge and D diverges.  With
``f`` identically zero the B and D integrands vanish.

Two engines decide convergence.  The symbolic engine pushes power-log
profiles through the compositions and is exact on that scale.  The numeric
engine integrates over dyadic blocks and reads the decay rate of the block
sums; it answers Inconclusive inside a band around the critical rate.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .asymptotics import (
    IDENTITY,
    ONE,
    AsymptoticAtom,
    AsymptoticProfile,
    Convergence,
    UnsupportedAsymptotics,
    infer_profile,
    integral_converges_at_infinity,
    profile_compose,
)
from .eta import EtaBundle, build_eta, check_convexity, eta_profiles
from .funcdsl import (
    InversionError,
    MonotoneFunction,
    geometric_grid,
    is_almost_semimultiplicative,
)
from .quadrature import integrate_log

__all__ = [
    "INTEGRALS",
    "THEOREMS",
    "ConvergenceReport",
    "ProblemSpec",
    "SpecError",
    "Verdict",
    "VerdictResult",
    "classify_integral",
    "criterion_atom",
    "decide_theorem",
    "integrand",
    "integrand_A",
    "integrand_B",
    "integrand_C",
    "integrand_D",
    "log_integrand",
    "numeric_classify",
]

INTEGRALS = ("A", "B", "C", "D")
THEOREMS = {"2.1": ("A", "B"), "2.2": ("A", "C", "D")}
ENGINES = ("symbolic", "numeric", "both")

# numeric engine
BLOCKS = 41
FIT_BLOCKS = 20
BLOCK_RTOL = 1e-8
SLOPE_BAND = 0.05
LOG_SLOPE_BAND = (-1.05, -0.95)


class SpecError(ValueError):
    """A problem specification violates a standing hypothesis."""


class VerdictResult(str, enum.Enum):
    BLOWUP = "BlowUp"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ProblemSpec:
    """Data of one problem.

    ``f`` is ``None`` for the zero coefficient.  ``sigma`` is recorded and
    validated but enters no verdict.
    """

    n: int
    phi: MonotoneFunction
    g: MonotoneFunction
    f: Optional[MonotoneFunction]
    r0: float = 1.0
    sigma: float = 2.0
    name: str = ""

    @cached_property
    def bundle(self) -> EtaBundle:
        return build_eta(self.phi)

    def profile_of(self, which: str) -> Optional[AsymptoticProfile]:
        fn = getattr(self, which)
        if fn is None:
            return None
        if fn.profile is not None:
            return fn.profile
        if fn.expression is not None:
            try:
                return infer_profile(fn.expression)
            except UnsupportedAsymptotics:
                return None
        return None

    def validate(self, hypotheses: bool = True) -> None:
        """Raise :class:`SpecError` unless the spec is admissible.

        Always checks the scalar parameters and positivity of ``g`` on
        [1e-3, 1e3].  With ``hypotheses`` also checks that ``g`` and
        ``phi^-1`` are almost semi-multiplicative on [1e-4, 1e4].
        """
        if int(self.n) != self.n or self.n < 2:
            raise SpecError(f"dimension n must be an integer >= 2, got {self.n}")
        if not self.r0 > 0:
            raise SpecError(f"r0 must be positive, got {self.r0}")
        if not self.sigma > 1:
            raise SpecError(f"sigma must exceed 1, got {self.sigma}")
        if self.phi.direction != "increasing":
            raise SpecError("phi must be increasing")
        grid = geometric_grid(1e-3, 1e3, 121)
        lg = self.g.log(np.log(grid))
        if not np.all(np.isfinite(lg)):
            k = int(np.argmax(~np.isfinite(lg)))
            raise SpecError(f"g is not positive on compacts: fails at t={grid[k]:g}")
        if not hypotheses:
            return
        if not is_almost_semimultiplicative(self.g):
            raise SpecError("g is not almost semi-multiplicative on [1e-4, 1e4]")
        try:
            ok = is_almost_semimultiplicative(self.bundle.phi_inverse)
        except InversionError as exc:
            raise SpecError(f"phi cannot be inverted on [1e-4, 1e4]: {exc}") from exc
        if not ok:
            raise SpecError("the inverse of phi is not almost semi-multiplicative on [1e-4, 1e4]")

    def lower_limit(self, integral: str) -> float:
        return 1.0 if integral in ("A", "C") else max(self.r0, 1.0)


@dataclass(frozen=True)
class ConvergenceReport:
    integral: str
    classification: Convergence
    engine: str
    evidence: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "integral": self.integral,
            "classification": self.classification.value,
            "engine": self.engine,
            "evidence": self.evidence,
        }


@dataclass(frozen=True)
class Verdict:
    theorem: str
    reports: tuple
    result: VerdictResult
    notes: tuple = ()
    convexity: Optional[dict] = None

    @property
    def blowup(self) -> bool:
        return self.result is VerdictResult.BLOWUP

    def report(self, integral: str) -> ConvergenceReport:
        for r in self.reports:
            if r.integral == integral:
                return r
        raise KeyError(integral)

    def to_dict(self):
        out = {
            "theorem": self.theorem,
            "result": self.result.value,
            "reports": {r.integral: r.to_dict() for r in self.reports},
            "notes": list(self.notes),
        }
        if self.convexity is not None:
            out["convexity"] = self.convexity
        return out


# ---------------------------------------------------------------------------
# integrands


def _check_id(integral: str) -> str:
    if integral not in INTEGRALS:
        raise ValueError(f"unknown integral {integral!r}; expected one of {INTEGRALS}")
    return integral


def log_integrand(spec: ProblemSpec, integral: str, x):
    """``log`` of the integrand at ``exp(x)``; ``-inf`` when ``f`` is zero."""
    _check_id(integral)
    x = np.asarray(x, dtype=float)
    b = spec.bundle
    if integral in ("A", "C"):
        l_inner = b.phi_inverse.log(spec.g.log(x))
        if integral == "C":
            return -l_inner
        return b.eta_inverse.log(x - l_inner) - x
    if spec.f is None:
        return np.full(x.shape, -np.inf)
    l_pf = b.phi_inverse.log(-spec.f.log(x))
    if integral == "B":
        return b.eta.log(x - b.eta_inverse.log(l_pf)) - x
    branch1 = b.eta.log(x) - x - l_pf
    branch2 = -b.eta_inverse.log(l_pf)
    return np.minimum(branch1, branch2)


def integrand(spec: ProblemSpec, integral: str, t):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("integrands are evaluated at positive arguments")
    with np.errstate(under="ignore", over="ignore"):
        return np.exp(log_integrand(spec, integral, np.log(t)))


def integrand_A(spec: ProblemSpec, t):
    return integrand(spec, "A", t)


def integrand_B(spec: ProblemSpec, r):
    return integrand(spec, "B", r)


def integrand_C(spec: ProblemSpec, t):
    return integrand(spec, "C", t)


def integrand_D(spec: ProblemSpec, r):
    return integrand(spec, "D", r)


# ---------------------------------------------------------------------------
# symbolic engine


def criterion_atom(spec: ProblemSpec, integral: str) -> Optional[AsymptoticAtom]:
    """Leading atom at infinity of the integrand (``None`` when it vanishes).

    Raises :class:`UnsupportedAsymptotics` when a profile is missing or a
    composition leaves the three-level scale.
    """
    _check_id(integral)
    phi_prof = spec.profile_of("phi")
    if phi_prof is None:
        raise UnsupportedAsymptotics("no asymptotic profile for phi")
    prof = eta_profiles(phi_prof)
    phi_inv, eta, eta_inv = prof["phi_inverse"], prof["eta"], prof["eta_inverse"]
    if integral in ("A", "C"):
        g_prof = spec.profile_of("g")
        if g_prof is None:
            raise UnsupportedAsymptotics("no asymptotic profile for g")
        inner = profile_compose(phi_inv, g_prof.at_infinity)
        if integral == "C":
            return ONE / inner
        return profile_compose(eta_inv, IDENTITY / inner) / IDENTITY
    if spec.f is None:
        return None
    f_prof = spec.profile_of("f")
    if f_prof is None:
        raise UnsupportedAsymptotics("no asymptotic profile for f")
    pf = profile_compose(phi_inv, ONE / f_prof.at_infinity)
    ei = profile_compose(eta_inv, pf)
    if integral == "B":
        return profile_compose(eta, IDENTITY / ei) / IDENTITY
    branch1 = eta.at_infinity / (IDENTITY * pf)
    branch2 = ONE / ei
    return min(branch1, branch2)


def _symbolic(spec: ProblemSpec, integral: str) -> ConvergenceReport:
    try:
        atom = criterion_atom(spec, integral)
    except UnsupportedAsymptotics as exc:
        return ConvergenceReport(integral, Convergence.INCONCLUSIVE, "symbolic", {"reason": str(exc)})
    if atom is None:
        return ConvergenceReport(integral, Convergence.CONVERGES, "symbolic",
                                 {"reason": "integrand identically zero"})
    return ConvergenceReport(integral, integral_converges_at_infinity(atom), "symbolic",
                             {"atom": atom.to_list()})


# ---------------------------------------------------------------------------
# numeric engine


def _lstsq_slope(x, y):
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return float(coef[0]), float(np.max(np.abs(resid)))


def numeric_classify(log_block_sums, integral: str = "?", engine: str = "numeric") -> ConvergenceReport:
    """Classify from ``log S_k``, the natural logs of the dyadic block integrals."""
    ls = np.asarray(log_block_sums, dtype=float)
    k = np.arange(ls.size, dtype=float)
    tail_k, tail = k[-FIT_BLOCKS:], ls[-FIT_BLOCKS:]
    evidence = {"log_block_sums": [float(v) for v in ls]}
    if np.all(np.isneginf(tail)):
        evidence["reason"] = "integrand vanishes on the tail blocks"
        return ConvergenceReport(integral, Convergence.CONVERGES, engine, evidence)
    if not np.all(np.isfinite(tail)):
        evidence["reason"] = "non-finite block sum"
        return ConvergenceReport(integral, Convergence.INCONCLUSIVE, engine, evidence)
    m, res = _lstsq_slope(tail_k, tail / math.log(2.0))
    evidence.update(slope=m, fit_residual=res)
    m2, res2 = _lstsq_slope(np.log(tail_k), tail)
    evidence.update(log_slope=m2, log_fit_residual=res2)
    lo, hi = LOG_SLOPE_BAND
    by_log = (Convergence.CONVERGES if m2 < lo else
              Convergence.DIVERGES if m2 > hi else Convergence.INCONCLUSIVE)
    if abs(m) < SLOPE_BAND:
        return ConvergenceReport(integral, by_log, engine, evidence)
    by_power = Convergence.CONVERGES if m < 0 else Convergence.DIVERGES
    if by_log is not by_power:
        # 1/(t log t) has m close to -0.048, so an extra loglog factor can push
        # a divergent integrand past the band; the log fit catches it
        evidence["reason"] = "power and log fits disagree"
        return ConvergenceReport(integral, Convergence.INCONCLUSIVE, engine, evidence)
    return ConvergenceReport(integral, by_power, engine, evidence)


def _block_sums(logf, lower: float):
    """Natural logs of ``int exp(logf(log t)) dt`` over ``[L 2^k, L 2^(k+1)]``."""
    x0 = math.log(max(lower, 1.0))
    ln2 = math.log(2.0)
    a = x0 + ln2 * np.arange(BLOCKS)
    res = integrate_log(lambda x: logf(x) + x, a, a + ln2, BLOCK_RTOL)
    return res.log_value, res.ok


def _numeric(spec: ProblemSpec, integral: str) -> ConvergenceReport:
    if integral in ("B", "D") and spec.f is None:
        return ConvergenceReport(integral, Convergence.CONVERGES, "numeric",
                                 {"reason": "integrand identically zero"})

    def logf(x):
        return log_integrand(spec, integral, x)

    lower = spec.lower_limit(integral)
    try:
        ls, ok = _block_sums(logf, lower)
    except InversionError:
        # locate the offending block
        ls = np.full(BLOCKS, np.nan)
        ok = np.zeros(BLOCKS, dtype=bool)
        x0 = math.log(max(lower, 1.0))
        for k in range(BLOCKS):
            a = x0 + k * math.log(2.0)
            try:
                r = integrate_log(lambda x: logf(x) + x, [a], [a + math.log(2.0)], BLOCK_RTOL)
            except InversionError as exc:
                return ConvergenceReport(integral, Convergence.INCONCLUSIVE, "numeric",
                                         {"reason": f"inversion failed: {exc}", "failed_block": k})
            ls[k], ok[k] = r.log_value[0], r.ok[0]
    if not np.all(ok):
        k = int(np.argmax(~ok))
        return ConvergenceReport(integral, Convergence.INCONCLUSIVE, "numeric",
                                 {"reason": "quadrature did not converge", "failed_block": k})
    return numeric_classify(ls, integral)


def classify_integral(spec: ProblemSpec, integral: str, engine: str = "both") -> ConvergenceReport:
    """Decide convergence of one criterion integral.

    ``engine="both"`` trusts the symbolic answer and falls back to the
    numeric one when the symbolic engine cannot decide.
    """
    _check_id(integral)
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}")
    if engine == "numeric":
        return _numeric(spec, integral)
    rep = _symbolic(spec, integral)
    if engine == "symbolic" or rep.classification is not Convergence.INCONCLUSIVE:
        return rep
    num = _numeric(spec, integral)
    evidence = dict(num.evidence)
    evidence["symbolic"] = rep.evidence
    return ConvergenceReport(integral, num.classification, "numeric", evidence)


# ---------------------------------------------------------------------------
# verdicts

_WANT = {
    "2.1": {"A": Convergence.CONVERGES, "B": Convergence.DIVERGES},
    "2.2": {"A": Convergence.CONVERGES, "C": Convergence.CONVERGES, "D": Convergence.DIVERGES},
}

CONVEXITY_RANGE = (1e-8, 1e8)
CONVEXITY_POINTS = 1000


def decide_theorem(spec: ProblemSpec, theorem: str, engine: str = "both") -> Verdict:
    """BlowUp or Inconclusive for ``theorem`` in ``{"2.1", "2.2"}``."""
    theorem = str(theorem)
    if theorem not in _WANT:
        raise ValueError(f"theorem must be one of {tuple(_WANT)}")
    reports = tuple(classify_integral(spec, i, engine) for i in THEOREMS[theorem])
    notes = []
    if spec.f is None:
        notes.append("coefficient f is identically zero")
    ok = True
    for rep in reports:
        want = _WANT[theorem][rep.integral]
        if rep.classification is Convergence.INCONCLUSIVE:
            ok = False
            notes.append(f"{rep.integral}: undecided ({rep.evidence.get('reason', 'rate in the critical band')})")
        elif rep.classification is not want:
            ok = False
            notes.append(f"{rep.integral}: {rep.classification.value.lower()}, needs {want.value.lower()}")
    convexity = None
    if theorem == "2.1":
        try:
            convex, worst = check_convexity(spec.bundle.eta,
                                            geometric_grid(*CONVEXITY_RANGE, CONVEXITY_POINTS))
        except InversionError as exc:
            convex, worst = False, float("nan")
            notes.append(f"convexity of eta could not be sampled: {exc}")
        convexity = {"convex": bool(convex), "worst": worst if math.isfinite(worst) else None,
                     "range": list(CONVEXITY_RANGE), "points": CONVEXITY_POINTS}
        if not convex:
            ok = False
            notes.append("eta fails the sampled convexity test")
    result = VerdictResult.BLOWUP if ok else VerdictResult.INCONCLUSIVE
    return Verdict(theorem, reports, result, tuple(notes), convexity)
