"""Radial barrier for the phi-Laplacian with constant right-hand side.

On ``[r1, r2]`` the function

    w(r) = int_{r1}^{r} phi^-1( (tau^n - r1^n) / (n tau^(n-1)) F ) dtau

solves ``r^(1-n) (r^(n-1) phi(w'))' = F`` with ``w(r1) = w'(r1) = 0``.
This module tabulates ``w``, checks the equation by finite differences and
checks the lower bound on ``w(r2)`` that holds when ``r2 <= sigma r1``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .funcdsl import InversionError, MonotoneFunction, invert_log
from .quadrature import cumulative_integrate_log

__all__ = [
    "BarrierTable",
    "barrier_grid",
    "build_barrier",
    "check_lower_bound",
    "observed_order",
    "verify_cauchy",
]

MIN_NODES = 64


@dataclass(frozen=True)
class BarrierTable:
    r1: float
    r2: float
    F: float
    n: int
    grid: np.ndarray
    w: np.ndarray
    w_prime: np.ndarray
    residuals: np.ndarray
    phi: MonotoneFunction = field(repr=False, compare=False)

    def write_csv(self, stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["r", "w", "w_prime", "residual"])
        for row in zip(self.grid, self.w, self.w_prime, self.residuals):
            writer.writerow([repr(float(v)) for v in row])

    @property
    def max_residual(self) -> float:
        interior = self.residuals[1:-1]
        return float(np.max(np.abs(interior))) / self.F


def barrier_grid(r1: float, r2: float, nodes: int, geometric: int = None, depth: float = 1e-6) -> np.ndarray:
    """Nodes on ``[r1, r2]``: geometric in ``r - r1`` inside the first uniform
    cell (``geometric`` points down to ``depth`` times its width), uniform after."""
    if nodes < MIN_NODES:
        raise ValueError(f"need at least {MIN_NODES} nodes")
    m = max(8, nodes // 20) if geometric is None else int(geometric)
    K = nodes - 1 - m
    u = np.concatenate([
        [0.0],
        np.geomspace(depth, 1.0, m + 1)[:-1] / K,
        np.arange(1, K + 1) / K,
    ])
    grid = r1 + (r2 - r1) * u
    grid[-1] = r2
    return grid


def _log_argument(tau, r1, n, F):
    """log of ``(tau^n - r1^n) / (n tau^(n-1)) F``; ``-inf`` at ``tau = r1``."""
    tau = np.asarray(tau, dtype=float)
    # tau^n - r1^n = (tau - r1) sum_k tau^k r1^(n-1-k); tau - r1 is exact near r1
    s = sum(tau ** k * r1 ** (n - 1 - k) for k in range(n))
    with np.errstate(divide="ignore", invalid="ignore"):
        return (np.log(np.maximum(tau - r1, 0.0)) + np.log(s) - (n - 1) * np.log(tau)
                - math.log(n) + math.log(F))


INVERSION_RTOL = 1e-14


def _log_w_prime(phi, r1, n, F):
    def logf(tau):
        la = np.atleast_1d(_log_argument(tau, r1, n, F))
        out = np.full(la.shape, -np.inf)
        live = np.isfinite(la)
        if np.any(live):
            out[live] = invert_log(phi, la[live], INVERSION_RTOL)
        return out.reshape(np.shape(tau))

    return logf


def _residuals(grid, w_prime, phi, n, F):
    """``r^(1-n) d/dr (r^(n-1) phi(w')) - F`` by three-point differences."""
    q = np.zeros_like(grid)
    pos = w_prime > 0
    q[pos] = grid[pos] ** (n - 1) * phi(w_prime[pos])
    res = np.zeros_like(grid)
    hm = grid[1:-1] - grid[:-2]
    hp = grid[2:] - grid[1:-1]
    # derivative of the interpolating quadratic at the middle node
    dq = (-hp / (hm * (hm + hp)) * q[:-2]
          + (hp - hm) / (hm * hp) * q[1:-1]
          + hm / (hp * (hm + hp)) * q[2:])
    res[1:-1] = dq / grid[1:-1] ** (n - 1) - F
    res[0] = res[-1] = np.nan
    return res


def build_barrier(r1: float, r2: float, F: float, phi: MonotoneFunction, n: int,
                  nodes: int = 1000, rel_tol: float = 1e-10, geometric: int = None) -> BarrierTable:
    if not (0 < r1 < r2):
        raise ValueError("need 0 < r1 < r2")
    if not F > 0:
        raise ValueError("F must be positive")
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    n = int(n)
    grid = barrier_grid(r1, r2, int(nodes), geometric)
    logf = _log_w_prime(phi, r1, n, F)
    w, ok = cumulative_integrate_log(logf, grid, rel_tol=rel_tol)
    if not ok:
        raise InversionError("quadrature of the barrier integrand did not converge")
    with np.errstate(under="ignore"):
        w_prime = np.exp(logf(grid))
    w_prime[0] = 0.0
    residuals = _residuals(grid, w_prime, phi, n, F)
    return BarrierTable(r1, r2, F, n, grid, w, w_prime, residuals, phi)


def verify_cauchy(table: BarrierTable, phi: MonotoneFunction = None) -> float:
    """Max relative residual ``|L w - F| / F`` over interior nodes."""
    if phi is None:
        return table.max_residual
    res = _residuals(table.grid, table.w_prime, phi, table.n, table.F)
    return float(np.max(np.abs(res[1:-1]))) / table.F


def observed_order(r1, r2, F, phi, n, nodes: int = 1000, floor: float = 1e-9) -> float:
    """Order of the Cauchy residual when the uniform spacing is halved.

    The refined grid keeps the coarse nodes, and residuals are compared on
    the shared uniform nodes.  Returns ``inf`` when both sit below ``floor``,
    as they do when ``r^(n-1) phi(w')`` is a polynomial of degree at most two
    and only rounding is left.
    """
    m = max(8, nodes // 20)
    K = nodes - 1 - m
    coarse = build_barrier(r1, r2, F, phi, n, nodes, geometric=m)
    fine = build_barrier(r1, r2, F, phi, n, 2 * K + 1 + m, geometric=m)
    # uniform node j sits at index m + j on the coarse grid and m + 2j on the fine one;
    # j = 1 borders the geometric cells and is skipped
    j = np.arange(2, K)
    e1 = float(np.max(np.abs(coarse.residuals[m + j]))) / F
    e2 = float(np.max(np.abs(fine.residuals[m + 2 * j]))) / F
    if max(e1, e2) <= floor:
        return math.inf
    return math.log2(e1 / e2)


def check_lower_bound(table: BarrierTable, sigma: float) -> bool:
    """``w(r2) >= (r2 - r1)/2 * phi^-1((r2 - r1) F / (2 sigma^(n-1)))``."""
    if not sigma > 1:
        raise ValueError("sigma must exceed 1")
    if table.r2 > sigma * table.r1 * (1 + 1e-12):
        raise ValueError(f"need r2 <= sigma r1, got r2={table.r2:g}, sigma r1={sigma * table.r1:g}")
    d = table.r2 - table.r1
    ly = math.log(d * table.F / 2.0) - (table.n - 1) * math.log(sigma)
    bound = d / 2.0 * math.exp(float(invert_log(table.phi, ly)))
    return bool(table.w[-1] >= bound)
