"""The auxiliary functions built from phi: phi^-1, eta, eta^-1 and h.

    eta(t) = t / phi^-1(1/t),     h(t) = t phi^-1(t) = 1 / eta(1/t).

Everything is evaluated in log space.  eta^-1 avoids a nested inversion:
with ``s phi(s) = 1/y`` one has ``eta^-1(y) = 1/phi(s)``.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .asymptotics import (
    IDENTITY,
    AsymptoticProfile,
    UnsupportedAsymptotics,
    profile_invert,
    reflect,
)
from .funcdsl import InversionError, MonotoneFunction, geometric_grid, invert_log

__all__ = ["EtaBundle", "build_eta", "check_convexity", "check_lemma_3_5", "eta_profiles"]


@dataclass(frozen=True)
class EtaBundle:
    phi: MonotoneFunction
    phi_inverse: MonotoneFunction
    eta: MonotoneFunction
    eta_inverse: MonotoneFunction
    h: MonotoneFunction

    def table(self, grid=None):
        """Rows ``(t, eta, eta_inverse, h)`` on ``grid``."""
        grid = geometric_grid(1e-4, 1e4, 81) if grid is None else np.asarray(grid, dtype=float)
        return np.column_stack([grid, self.eta(grid), self.eta_inverse(grid), self.h(grid)])

    def write_csv(self, stream, grid=None) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["t", "eta", "eta_inverse", "h"])
        for row in self.table(grid):
            writer.writerow([repr(float(v)) for v in row])


def eta_profiles(phi_profile: AsymptoticProfile) -> dict:
    """Profiles of phi^-1, eta, eta^-1 and h from the profile of phi."""
    phi_inv = profile_invert(phi_profile)
    at_recip = reflect(phi_inv)  # t -> phi^-1(1/t)
    eta = AsymptoticProfile(IDENTITY / at_recip.at_zero, IDENTITY / at_recip.at_infinity)
    return {
        "phi_inverse": phi_inv,
        "eta": eta,
        "eta_inverse": profile_invert(eta),
        "h": AsymptoticProfile(IDENTITY * phi_inv.at_zero, IDENTITY * phi_inv.at_infinity),
    }


def _from_log(log_func, profile, name):
    def func(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            return np.exp(log_func(np.log(t)))

    return MonotoneFunction(func, log_func, None, profile, "increasing", name)


def build_eta(phi: MonotoneFunction, rel_tol: float = 1e-12) -> EtaBundle:
    """Construct the :class:`EtaBundle` of an increasing bijection ``phi``."""
    if phi.direction != "increasing":
        raise ValueError("phi must be an increasing function")
    profiles = {}
    if phi.profile is not None:
        try:
            profiles = eta_profiles(phi.profile)
        except UnsupportedAsymptotics:
            profiles = {}

    def log_phi_inv(ly):
        return invert_log(phi, ly, rel_tol)

    def log_eta(x):
        x = np.asarray(x, dtype=float)
        return x - invert_log(phi, -x, rel_tol)

    # s -> s phi(s), increasing whenever phi is
    k = MonotoneFunction(lambda s: s * phi(s), lambda xs: np.asarray(xs, float) + phi.log(xs),
                         name=f"t*{phi.name}")

    def log_eta_inv(ly):
        ly = np.asarray(ly, dtype=float)
        return -phi.log(invert_log(k, -ly, rel_tol))

    def log_h(x):
        x = np.asarray(x, dtype=float)
        return x + invert_log(phi, x, rel_tol)

    return EtaBundle(
        phi=phi,
        phi_inverse=_from_log(log_phi_inv, profiles.get("phi_inverse"), f"{phi.name}_inv"),
        eta=_from_log(log_eta, profiles.get("eta"), "eta"),
        eta_inverse=_from_log(log_eta_inv, profiles.get("eta_inverse"), "eta_inv"),
        h=_from_log(log_h, profiles.get("h"), "h"),
    )


def check_convexity(eta: MonotoneFunction, grid=None, tol: float = 1e-9):
    """Chord-midpoint convexity test on consecutive grid triples.

    Returns ``(convex, worst)`` where ``worst`` is the largest value of
    ``(eta((a+c)/2) - (eta(a)+eta(c))/2) / eta(c)``; the test passes when it
    never exceeds ``tol``.
    """
    grid = geometric_grid(1e-8, 1e8, 1000) if grid is None else np.asarray(grid, dtype=float)
    if grid.size < 3:
        raise ValueError("need at least three grid points")
    a, c = grid[:-2], grid[2:]
    ea, ec, em = eta(a), eta(c), eta(0.5 * (a + c))
    viol = (em - 0.5 * (ea + ec)) / ec
    worst = float(np.max(viol))
    return worst <= tol, worst


def check_lemma_3_5(bundle: EtaBundle, pairs=None) -> float:
    """Infimum over ``pairs`` of ``eta(a) b / eta(a / eta^-1(1/b))``.

    ``pairs`` is an ``(m, 2)`` array of ``(a, b)``; by default the product of
    31 geometric points on [1e-3, 1e3] with itself.  Points where an inversion
    fails are excluded and counted in a ``RuntimeWarning``.
    """
    if pairs is None:
        g = geometric_grid(1e-3, 1e3, 31)
        A, B = np.meshgrid(g, g)
        pairs = np.column_stack([A.ravel(), B.ravel()])
    pairs = np.asarray(pairs, dtype=float)
    la, lb = np.log(pairs[:, 0]), np.log(pairs[:, 1])

    def log_ratio(la, lb):
        inner = la - bundle.eta_inverse.log(-lb)
        return bundle.eta.log(la) + lb - bundle.eta.log(inner)

    try:
        lr = log_ratio(la, lb)
    except InversionError:
        lr = np.full(la.shape, np.nan)
        for i in range(la.size):
            try:
                lr[i] = log_ratio(la[i:i + 1], lb[i:i + 1])[0]
            except InversionError:
                pass
    bad = ~np.isfinite(lr)
    if np.any(bad):
        warnings.warn(f"{int(bad.sum())} point(s) excluded from the eta inequality check",
                      RuntimeWarning, stacklevel=2)
    return float(math.exp(np.min(lr[~bad])))
