"""Coordinate-wise BTL likelihood and its maximization over the score box.

The likelihood of one score with all others frozen is concave in
``theta = log(tau)`` (not necessarily in ``tau``), so the maximizer is found by
bisection on the sign of the ``theta``-derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class CoordProblem:
    """One coordinate subproblem: item ``item`` against frozen neighbor scores."""

    item: int
    neighbor_scores: np.ndarray
    y_row: np.ndarray
    L: int
    box: tuple[float, float]

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.neighbor_scores, dtype=float))
        y = np.atleast_1d(np.asarray(self.y_row, dtype=float))
        lo, hi = self.box
        if w.size == 0:
            raise ValueError("a coordinate problem needs at least one neighbor")
        if w.shape != y.shape:
            raise ValueError("neighbor_scores and y_row must align")
        if not 0 < lo <= hi:
            raise ValueError(f"invalid box {self.box}")
        if w.min() < lo or w.max() > hi:
            raise ValueError("neighbor scores must lie in the box")
        if y.min() < 0 or y.max() > 1:
            raise ValueError("outcome fractions must lie in [0, 1]")
        object.__setattr__(self, "neighbor_scores", w)
        object.__setattr__(self, "y_row", y)
        object.__setattr__(self, "box", (float(lo), float(hi)))


def _check_tau(p: CoordProblem, tau: float):
    lo, hi = p.box
    if not lo <= tau <= hi:
        raise ValueError(f"tau={tau} outside the box [{lo}, {hi}]")


def coord_loglik(p: CoordProblem, tau: float) -> float:
    """Per-comparison log-likelihood of setting the item's score to ``tau``."""
    _check_tau(p, tau)
    w, y = p.neighbor_scores, p.y_row
    s = tau + w
    # xlogy keeps 0 * log(...) at 0 for y in {0, 1}
    return float(np.sum(xlogy(y, tau / s) + xlogy(1.0 - y, w / s)))


def coord_loglik_dlog(p: CoordProblem, theta: float) -> float:
    """Derivative of ``coord_loglik`` with respect to ``log(tau)``."""
    lo, hi = p.box
    # small slack so exp(log(x)) round trips at the box edges
    if not math.log(lo) - 1e-12 <= theta <= math.log(hi) + 1e-12:
        raise ValueError(f"theta={theta} outside [log {lo}, log {hi}]")
    tau = math.exp(theta)
    w, y = p.neighbor_scores, p.y_row
    return float(np.sum(y - tau / (tau + w)))


def _dlog(tau, w, y):
    return float(np.sum(y - tau / (tau + w)))


def coord_mle(p: CoordProblem, tol: float = DEFAULT_TOL) -> float:
    lo, hi = p.box
    w, y = p.neighbor_scores, p.y_row
    if _dlog(lo, w, y) <= 0:
        return lo
    if _dlog(hi, w, y) >= 0:
        return hi
    a, b = math.log(lo), math.log(hi)
    while b - a > tol:
        mid = 0.5 * (a + b)
        if _dlog(math.exp(mid), w, y) > 0:
            a = mid
        else:
            b = mid
    return min(max(math.exp(0.5 * (a + b)), lo), hi)


def coord_mle_oracle(p: CoordProblem, grid_points: int = 10_000) -> float:
    """Brute-force grid maximizer of ``coord_loglik`` (test oracle)."""
    if grid_points < 100:
        raise ValueError("grid_points must be at least 100")
    lo, hi = p.box
    taus = np.linspace(lo, hi, grid_points)
    w, y = p.neighbor_scores, p.y_row
    ll = np.zeros(grid_points)
    for wj, yj in zip(w, y):
        s = taus + wj
        if yj > 0:
            ll += yj * np.log(taus / s)
        if yj < 1:
            ll += (1.0 - yj) * np.log(wj / s)
    return float(taus[np.argmax(ll)])


def coord_mle_all(
    src: np.ndarray,
    dst: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    box: tuple[float, float],
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Coordinate MLE of every item at once against the frozen vector ``w``.

    ``(src, dst, y)`` lists every directed comparison with ``y`` the fraction
    won by ``src``. All items are bisected in lockstep, one ``bincount`` per
    step, so a full sweep costs O(|E| log(1/tol)).
    """
    n = w.size
    lo, hi = box
    wd = w[dst]
    wins = np.bincount(src, weights=y, minlength=n)

    def grad(tau):
        ts = tau[src]
        return wins - np.bincount(src, weights=ts / (ts + wd), minlength=n)

    at_lo = grad(np.full(n, lo)) <= 0
    at_hi = grad(np.full(n, hi)) >= 0
    a = np.full(n, math.log(lo))
    b = np.full(n, math.log(hi))
    steps = max(0, math.ceil(math.log2((b[0] - a[0]) / tol))) if hi > lo else 0
    for _ in range(steps):
        mid = 0.5 * (a + b)
        up = grad(np.exp(mid)) > 0
        a = np.where(up, mid, a)
        b = np.where(up, b, mid)
    out = np.clip(np.exp(0.5 * (a + b)), lo, hi)
    out[at_hi] = hi
    out[at_lo] = lo
    return out


def problems_from_stats(stats, w: np.ndarray, box: tuple[float, float]) -> list[CoordProblem]:
    """Build the per-item ``CoordProblem`` list for ``stats`` at the frozen vector ``w``."""
    src, dst, y = stats.directed()
    order = np.argsort(src, kind="stable")
    src, dst, y = src[order], dst[order], y[order]
    bounds = np.searchsorted(src, np.arange(stats.n + 1))
    out = []
    for i in range(stats.n):
        sl = slice(bounds[i], bounds[i + 1])
        out.append(CoordProblem(i, w[dst[sl]], y[sl], stats.L, box))
    return out
