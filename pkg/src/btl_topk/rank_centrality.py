"""Rank Centrality: stationary distribution of a comparison-driven random walk."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from .model import SufficientStats, connectivity

log = logging.getLogger(__name__)


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class TransitionMatrix:
    P: sparse.csr_matrix
    d_max: int

    @property
    def n(self) -> int:
        return self.P.shape[0]

    def toarray(self) -> np.ndarray:
        return self.P.toarray()


def build_transition(stats: SufficientStats) -> TransitionMatrix:
    """Row-stochastic walk that moves from ``i`` to ``j`` in proportion to ``j``'s wins over ``i``.

    ``y(i,j) + y(j,i) == 1`` by construction, so the usual normalization by
    that sum is omitted.
    """
    g = stats.graph
    deg = g.degrees()
    if (deg == 0).any():
        raise ValueError(f"item {int(np.argmin(deg))} has no comparisons")
    if not connectivity(g):
        raise ValueError("comparison graph is disconnected")
    d_max = int(deg.max())
    src, dst, y = stats.directed()
    # P[i, j] = y(j, i) / d_max
    off = (1.0 - y) / d_max
    diag = 1.0 - np.bincount(src, weights=off, minlength=g.n)
    n = g.n
    rows = np.concatenate([src, np.arange(n)])
    cols = np.concatenate([dst, np.arange(n)])
    vals = np.concatenate([off, diag])
    P = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return TransitionMatrix(P, d_max)


def default_max_iters(n: int) -> int:
    return int(10 * n * math.log(n)) + 1000


def stationary_distribution(
    T: TransitionMatrix,
    tol: float = 1e-10,
    max_iters: int | None = None,
    return_history: bool = False,
):
    """Power iteration on the lazy chain ``(I + P) / 2``.

    Stops once ``||pi P - pi||_1 <= tol``. The lazy chain has the same
    stationary distribution and is aperiodic, so the iteration always
    converges for an irreducible ``P``.
    """
    n = T.n
    if max_iters is None:
        max_iters = default_max_iters(n)
    PT = T.P.T.tocsr()
    pi = np.full(n, 1.0 / n)
    history = []
    for _ in range(max_iters):
        step = PT @ pi
        residual = float(np.abs(step - pi).sum())
        history.append(residual)
        if residual <= tol:
            break
        pi = 0.5 * (pi + step)
        pi /= pi.sum()
    else:
        raise ConvergenceError(
            f"power iteration did not reach tol={tol} in {max_iters} iterations "
            f"(residual {history[-1]:.3g})",
            history[-1],
        )
    if return_history:
        return pi, np.array(history)
    return pi


def solve_stationary(T: TransitionMatrix) -> tuple[np.ndarray, float]:
    """Direct sparse solve of ``pi P = pi``, ``sum(pi) = 1``; returns ``(pi, l1 residual)``."""
    n = T.n
    A = (T.P.T - sparse.identity(n, format="csr")).tolil()
    # one balance equation is redundant; replace it with the normalization
    A[n - 1, :] = np.ones(n)
    b = np.zeros(n)
    b[-1] = 1.0
    pi = spsolve(A.tocsc(), b)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    return pi, float(np.abs(T.P.T @ pi - pi).sum())


@dataclass(frozen=True)
class RankCentralityResult:
    scores: np.ndarray
    stationary: np.ndarray
    n_clipped: int
    n_iter: int
    method: str = "power"


def rank_centrality_estimate(
    stats: SufficientStats,
    w_min: float,
    w_max: float,
    tol: float = 1e-10,
    max_iters: int | None = None,
) -> RankCentralityResult:
    """Stationary distribution rescaled to max ``w_max`` and clipped below at ``w_min``.

    With the default ``max_iters``, a chain too slow for the power-iteration
    budget (nearly path-like graphs mix in ~n^2 steps) is solved directly
    instead; an explicit ``max_iters`` keeps the ``ConvergenceError``.
    """
    T = build_transition(stats)
    method = "power"
    try:
        pi, history = stationary_distribution(T, tol, max_iters, return_history=True)
        n_iter = len(history)
    except ConvergenceError as exc:
        if max_iters is not None:
            raise
        pi, residual = solve_stationary(T)
        if not residual <= tol:
            raise ConvergenceError(
                f"direct solve residual {residual:.3g} above tol={tol}", residual
            ) from exc
        log.info("power iteration budget exhausted; used direct solve (residual %.3g)", residual)
        method, n_iter = "direct", default_max_iters(T.n)
    scores = pi * (w_max / pi.max())
    low = scores < w_min
    scores[low] = w_min
    scores[np.argmax(pi)] = w_max
    return RankCentralityResult(scores, pi, int(low.sum()), n_iter, method)
