"""Vectorized adaptive Simpson quadrature for positive integrands given in log form."""
from __future__ import annotations

import numpy as np

__all__ = ["QuadratureResult", "integrate_log", "cumulative_integrate_log"]


class QuadratureResult:
    """``log_value[i]`` is ``log int_{a_i}^{b_i} exp(logf)``; ``ok[i]`` is False on failure."""

    __slots__ = ("log_value", "ok", "evaluations")

    def __init__(self, log_value, ok, evaluations):
        self.log_value = log_value
        self.ok = ok
        self.evaluations = evaluations

    @property
    def value(self):
        with np.errstate(over="ignore"):
            return np.exp(self.log_value)


def _eval(logf, x):
    with np.errstate(all="ignore"):
        out = np.asarray(logf(x), dtype=float)
    return np.where(np.isnan(out), np.nan, out)


MAX_SEGMENTS = 1_000_000
NOISE_WIDTH = 1e3 * np.finfo(float).eps


def integrate_log(logf, a, b, rel_tol: float = 1e-8, panels: int = 8, max_depth: int = 40):
    """Integrate ``exp(logf(x))`` over each ``[a_i, b_i]`` with adaptive Simpson.

    ``logf`` must accept arrays.  Every interval starts from ``panels`` Simpson
    panels; a panel is accepted when its two-half refinement changes by at
    most ``15 tol`` (local tolerance proportional to width), and the
    Richardson correction is added.  Values are scaled by the largest
    initial sample of each interval, so results far outside the float range
    are fine.  A NaN sample or a panel deeper than ``max_depth`` marks the
    interval as failed, as does running past ``MAX_SEGMENTS`` live panels.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    m = a.size
    P = int(panels)
    nodes = a[:, None] + (b - a)[:, None] * np.linspace(0.0, 1.0, 2 * P + 1)[None, :]
    L = _eval(logf, nodes.ravel()).reshape(nodes.shape)
    evaluations = L.size
    ok = ~np.any(np.isnan(L), axis=1)
    finite = np.where(np.isfinite(L), L, -np.inf)
    shift = np.max(finite, axis=1)
    shift = np.where(np.isfinite(shift), shift, 0.0)
    F = np.exp(np.where(np.isnan(L), -np.inf, L) - shift[:, None])
    ok &= np.all(np.isfinite(F), axis=1)
    F = np.where(np.isfinite(F), F, 0.0)

    h = (b - a) / P
    fa, fm, fb = F[:, 0:-1:2], F[:, 1::2], F[:, 2::2]
    whole = (h[:, None] / 6.0) * (fa + 4.0 * fm + fb)
    estimate = np.abs(whole.sum(axis=1))
    total = np.zeros(m)

    owner = np.repeat(np.arange(m), P)
    sa = nodes[:, 0:-1:2].ravel()
    sb = nodes[:, 2::2].ravel()
    fa, fm, fb, whole = fa.ravel(), fm.ravel(), fb.ravel(), whole.ravel()
    tol = np.repeat(rel_tol * estimate / P, P)
    keep = ok[owner]
    owner, sa, sb, fa, fm, fb, whole, tol = (v[keep] for v in (owner, sa, sb, fa, fm, fb, whole, tol))

    depth = 0
    while owner.size:
        if depth > max_depth or owner.size > MAX_SEGMENTS:
            ok[np.unique(owner)] = False
            break
        mid = 0.5 * (sa + sb)
        xl = 0.5 * (sa + mid)
        xr = 0.5 * (mid + sb)
        lv = _eval(logf, np.concatenate([xl, xr]))
        evaluations += lv.size
        n = owner.size
        with np.errstate(over="ignore"):
            fl = np.exp(lv[:n] - shift[owner])
            fr = np.exp(lv[n:] - shift[owner])
        bad = ~(np.isfinite(fl) & np.isfinite(fr))
        if np.any(bad):
            ok[np.unique(owner[bad])] = False
        half = (sb - sa) / 12.0
        left = half * (fa + 4.0 * fl + fm)
        right = half * (fm + 4.0 * fr + fb)
        delta = left + right - whole
        # panels this narrow only resolve rounding noise in the abscissae
        tiny = (sb - sa) <= NOISE_WIDTH * np.maximum(np.abs(sa), np.abs(sb))
        done = (np.abs(delta) <= 15.0 * tol) | bad | tiny
        np.add.at(total, owner[done], (left + right + delta / 15.0)[done])
        go = ~done & ok[owner]
        o = owner[go]
        owner = np.concatenate([o, o])
        sa, sb = np.concatenate([sa[go], mid[go]]), np.concatenate([mid[go], sb[go]])
        fa, fm, fb = (np.concatenate([fa[go], fm[go]]), np.concatenate([fl[go], fr[go]]),
                      np.concatenate([fm[go], fb[go]]))
        whole = np.concatenate([left[go], right[go]])
        tol = np.concatenate([tol[go], tol[go]]) * 0.5
        depth += 1

    with np.errstate(divide="ignore", invalid="ignore"):
        log_value = np.where(total > 0, np.log(np.where(total > 0, total, 1.0)) + shift, -np.inf)
    log_value = np.where(ok, log_value, np.nan)
    return QuadratureResult(log_value, ok, evaluations)


def cumulative_integrate_log(logf, grid, rel_tol: float = 1e-10, panels: int = 4, max_depth: int = 40):
    """Values of ``int_{grid[0]}^{grid[i]} exp(logf)`` for every node (first entry 0).

    Each grid cell is integrated adaptively and the cell integrals are
    summed; returns ``(values, ok)``.
    """
    grid = np.asarray(grid, dtype=float)
    res = integrate_log(logf, grid[:-1], grid[1:], rel_tol, panels, max_depth)
    cells = np.where(res.ok, res.value, np.nan)
    return np.concatenate([[0.0], np.cumsum(cells)]), bool(np.all(res.ok))
