"""Globally defined representatives for the standard power-log data."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import AsymptoticAtom, AsymptoticProfile
from .funcdsl import MonotoneFunction

__all__ = ["PowerLogPhi", "power_log_phi", "power_log_profile"]


def power_log_profile(p: float, nu: float) -> AsymptoticProfile:
    return AsymptoticProfile(
        AsymptoticAtom(p - 1.0, -nu, 0.0),
        AsymptoticAtom(p - 1.0, nu, 0.0),
    )


@dataclass(frozen=True)
class PowerLogPhi:
    """Increasing bijection with phi ~ t^(p-1) log^nu t at infinity and
    phi ~ t^(p-1) log^-nu (1/t) at zero.

    In ``x = log t``, ``y = log phi``:

    * ``x >= x_hi``: ``y = a x + nu log x`` (phi itself is exact);
    * ``x <= x_lo``: ``x = (y + nu log(-y)) / a``, i.e.
      ``phi^-1(s) = s^(1/a) log^(nu/a)(1/s)`` is exact;
    * in between ``y`` is linear in ``x``.

    with ``a = p - 1``.  Making the inverse exact near zero pins the
    infinity tail of ``eta(t) = t / phi^-1(1/t)`` to
    ``t^(p/(p-1)) log^(-nu/(p-1)) t`` without a leading constant.
    """

    p: float
    nu: float

    def __post_init__(self):
        if self.p <= 1:
            raise ValueError("p must exceed 1")

    @property
    def a(self) -> float:
        return self.p - 1.0

    def junctions(self):
        a, nu = self.a, self.nu
        x_hi = max(math.e, 1.25 * abs(nu) / a) if nu < 0 else math.e
        y_hi = a * x_hi + nu * math.log(x_hi)
        # Newton below needs |y| > nu when nu > 0; any y < 0 works otherwise
        y_lo = -math.e * max(1.0, 2.0 * nu)
        y_lo = min(y_lo, y_hi - 1.0)
        x_lo = (y_lo + nu * math.log(-y_lo)) / a
        while x_lo >= min(x_hi, 0.0) - 1.0:
            y_lo *= 2.0
            x_lo = (y_lo + nu * math.log(-y_lo)) / a
        return x_lo, y_lo, x_hi, y_hi

    def log_value(self, x):
        x = np.asarray(x, dtype=float)
        a, nu = self.a, self.nu
        x_lo, y_lo, x_hi, y_hi = self.junctions()
        y = y_lo + (y_hi - y_lo) * (x - x_lo) / (x_hi - x_lo)
        hi = x >= x_hi
        if np.any(hi):
            y = np.where(hi, a * np.maximum(x, x_hi) + nu * np.log(np.maximum(x, x_hi)), y)
        lo = x <= x_lo
        if np.any(lo) and nu != 0:
            # solve Y + nu log(-Y) = a x by Newton; Y stays below y_lo < -|nu|
            ax = a * np.where(lo, x, x_lo)
            Y = ax - nu * np.log(-ax)
            Y = np.minimum(Y, y_lo)
            for _ in range(30):
                G = Y + nu * np.log(-Y) - ax
                step = G / (1.0 + nu / Y)
                Y = np.minimum(Y - step, 0.5 * y_lo)
                if np.all(np.abs(step) <= 1e-15 * np.abs(Y)):
                    break
            y = np.where(lo, Y, y)
        elif np.any(lo):
            y = np.where(lo, a * x, y)
        return y

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            return np.exp(self.log_value(np.log(t)))


def power_log_phi(p: float, nu: float, name: str = "phi") -> MonotoneFunction:
    rep = PowerLogPhi(float(p), float(nu))
    if nu == 0:
        a = rep.a
        return MonotoneFunction(
            lambda t: np.power(np.asarray(t, float), a),
            lambda x: a * np.asarray(x, float),
            None,
            power_log_profile(p, 0.0),
            "increasing",
            name,
        )
    return MonotoneFunction(rep, rep.log_value, None, power_log_profile(p, nu), "increasing", name)
