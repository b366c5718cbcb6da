"""Spectral MLE: Rank Centrality initialization followed by thresholded coordinate-MLE sweeps."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .coord_mle import DEFAULT_TOL, coord_mle_all
from .model import ComparisonGraph, SufficientStats, TopKResult, connectivity, top_k_indices
from .rank_centrality import rank_centrality_estimate

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralMleParams:
    K: int
    w_min: float = 0.5
    w_max: float = 1.0
    c2: float = 5.0
    c3: float = 1.0
    split_samples: bool = False
    rc_tol: float = 1e-10
    mle_tol: float = DEFAULT_TOL
    record_trajectory: bool = False
    # None: use the observed edge density of the comparison graph
    p_obs: float | None = None

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"K must be positive, got {self.K}")
        if not 0 < self.w_min <= self.w_max:
            raise ValueError("need 0 < w_min <= w_max")
        if self.c2 <= 0 or self.c3 <= 0:
            raise ValueError("c2 and c3 must be positive")
        if self.p_obs is not None and not 0 < self.p_obs <= 1:
            raise ValueError(f"p_obs must lie in (0, 1], got {self.p_obs}")


@dataclass
class RefinementTrace:
    t: list = field(default_factory=list)
    xi: list = field(default_factory=list)
    replaced: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    split_fallback: bool = False

    def append(self, t, xi, replaced, snapshot=None):
        self.t.append(t)
        self.xi.append(xi)
        self.replaced.append(replaced)
        if snapshot is not None:
            self.snapshots.append(snapshot)

    @property
    def replaced_total(self) -> int:
        return int(sum(self.replaced))

    def to_csv(self) -> str:
        lines = ["t,xi_t,replaced_count"]
        lines += [f"{t},{xi!r},{r}" for t, xi, r in zip(self.t, self.xi, self.replaced)]
        return "\n".join(lines) + "\n"


def xi_bounds(n: int, p_obs: float, L: int) -> tuple[float, float]:
    """``(xi_min, xi_max)`` with natural logs."""
    base = math.log(n) / (p_obs * L)
    return math.sqrt(base / n), math.sqrt(base)


def threshold_schedule(t: int, n: int, p_obs: float, L: int, c3: float = 1.0) -> float:
    """Replacement threshold at sweep ``t``, decaying geometrically to ``c3 * xi_min``."""
    lo, hi = xi_bounds(n, p_obs, L)
    return c3 * (lo + 2.0 ** (-t) * (hi - lo))


def n_sweeps(n: int, c2: float) -> int:
    return math.ceil(c2 * math.log(n))


def split_edges(g: ComparisonGraph, seed, max_tries: int = 100):
    """Random halving of the edge set into ``(init_mask, iter_mask)``.

    Returns ``None`` when no draw in ``max_tries`` leaves both halves connected.
    """
    m = g.n_edges
    if m < 2:
        raise ValueError("need at least 2 edges to split")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    for _ in range(max_tries):
        mask = np.zeros(m, dtype=bool)
        mask[rng.permutation(m)[: m // 2]] = True
        halves = (ComparisonGraph(g.n, g.edges[mask]), ComparisonGraph(g.n, g.edges[~mask]))
        if all(connectivity(h) for h in halves):
            return mask, ~mask
    return None


def refine_once(
    current: np.ndarray,
    stats: SufficientStats,
    xi: float,
    box: tuple[float, float],
    mle_tol: float = DEFAULT_TOL,
    _directed=None,
) -> tuple[np.ndarray, int]:
    """One Jacobi sweep: replace coordinates whose MLE moved by more than ``xi``."""
    src, dst, y = _directed if _directed is not None else stats.directed()
    mle = coord_mle_all(src, dst, y, np.asarray(current, dtype=float), box, mle_tol)
    replace = np.abs(mle - current) > xi
    return np.where(replace, mle, current), int(replace.sum())


@dataclass(frozen=True)
class SpectralMleResult:
    top_k: TopKResult
    trace: RefinementTrace
    init_scores: np.ndarray
    n_clipped: int


def spectral_mle_rank(
    stats: SufficientStats, params: SpectralMleParams, seed=0, init=None
) -> SpectralMleResult:
    """Run the full procedure and return the top-K set of the final iterate.

    ``init`` may carry a precomputed Rank Centrality result for ``stats``; it is
    ignored when samples are split.
    """
    n = stats.n
    if params.K >= n:
        raise ValueError(f"K={params.K} must be smaller than n={n}")
    box = (params.w_min, params.w_max)
    p_obs = params.p_obs if params.p_obs is not None else stats.graph.density()

    trace = RefinementTrace()
    init_stats = iter_stats = stats
    if params.split_samples:
        split = split_edges(stats.graph, seed)
        if split is None:
            log.warning("no connected edge split found; reusing all samples")
            trace.split_fallback = True
        else:
            init_stats, iter_stats = stats.restrict(split[0]), stats.restrict(split[1])

    if init is not None and init_stats is stats:
        rc = init
    else:
        rc = rank_centrality_estimate(init_stats, *box, tol=params.rc_tol)
    w = rc.scores.copy()
    directed = iter_stats.directed()
    for t in range(n_sweeps(n, params.c2)):
        xi = threshold_schedule(t, n, p_obs, stats.L, params.c3)
        w, replaced = refine_once(w, iter_stats, xi, box, params.mle_tol, _directed=directed)
        trace.append(t, xi, replaced, w.copy() if params.record_trajectory else None)
    result = TopKResult(params.K, top_k_indices(w, params.K), w)
    return SpectralMleResult(result, trace, rc.scores, rc.n_clipped)
