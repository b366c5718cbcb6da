"""Seeded synthetic instances: Erdos-Renyi graphs, score profiles, BTL outcomes.

Randomness comes from numpy's ``PCG64`` bit generator. ``generate_instance``
splits ``SeedSequence(seed)`` into three child streams (graph, scores,
comparisons), so changing one sampler never shifts the others. Monte Carlo
trials use ``seed + trial_index`` as their instance seed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .model import (
    ComparisonGraph,
    PreferenceVector,
    SufficientStats,
    btl_win_probability,
    connectivity,
)


class GenerationError(RuntimeError):
    """No connected graph was drawn within the allowed number of attempts."""


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class ScoreScheme:
    """``kind`` is ``"uniform"`` or ``"planted"``; ``K``/``delta`` only matter when planted."""

    kind: str = "uniform"
    lo: float = 0.5
    hi: float = 1.0
    K: int | None = None
    delta: float | None = None

    def __post_init__(self):
        if self.kind not in ("uniform", "planted"):
            raise ValueError(f"unknown score scheme {self.kind!r}")
        if not 0 < self.lo <= self.hi:
            raise ValueError(f"need 0 < lo <= hi, got lo={self.lo}, hi={self.hi}")
        if self.kind == "planted":
            if self.K is None or self.delta is None:
                raise ValueError("planted scheme needs K and delta")
            if self.delta < 0:
                raise ValueError(f"delta must be nonnegative, got {self.delta}")
            if self.lo + self.delta * self.hi > self.hi:
                raise ValueError(
                    f"delta={self.delta} too large for [{self.lo}, {self.hi}]: "
                    f"lo + delta*hi exceeds hi"
                )

    @classmethod
    def uniform(cls, lo: float = 0.5, hi: float = 1.0) -> "ScoreScheme":
        return cls("uniform", lo, hi)

    @classmethod
    def planted(cls, K: int, delta: float, lo: float = 0.5, hi: float = 1.0) -> "ScoreScheme":
        return cls("planted", lo, hi, K, delta)


@dataclass(frozen=True)
class GenConfig:
    n: int
    p_obs: float
    L: int
    scores: ScoreScheme = ScoreScheme()
    seed: int = 0
    max_regen_attempts: int = 100
    exact: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if not 0 < self.p_obs <= 1:
            raise ValueError(f"p_obs must lie in (0, 1], got {self.p_obs}")
        if self.L < 1:
            raise ValueError(f"L must be a positive integer, got {self.L}")
        if self.max_regen_attempts < 1:
            raise ValueError("max_regen_attempts must be positive")
        if self.scores.kind == "planted" and not 1 <= self.scores.K < self.n:
            raise ValueError(f"planted K must satisfy 1 <= K < n, got {self.scores.K}")


def sample_er_graph(n: int, p_obs: float, seed) -> ComparisonGraph:
    if n < 2 or not 0 < p_obs <= 1:
        raise ValueError(f"need n >= 2 and 0 < p_obs <= 1, got n={n}, p_obs={p_obs}")
    rng = _rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p_obs
    return ComparisonGraph(n, np.column_stack([iu[keep], ju[keep]]))


def sample_scores(scheme: ScoreScheme, n: int, seed) -> PreferenceVector:
    """Draw a score profile whose largest entry equals ``scheme.hi``.

    The planted scheme puts the top-K block on items ``0..K-1`` (sorted in
    decreasing order) with ``(w_K - w_{K+1}) / hi == delta``.
    """
    rng = _rng(seed)
    lo, hi = scheme.lo, scheme.hi
    if scheme.kind == "uniform":
        w = rng.uniform(lo, hi, size=n)
        w *= hi / w.max()
        w[np.argmax(w)] = hi
        return PreferenceVector(np.clip(w, lo, hi), lo, hi)

    K, gap = scheme.K, scheme.delta * hi
    # max() guards against hi - gap rounding just below lo at the largest delta
    base = np.sort(rng.uniform(lo, max(lo, hi - gap), size=n))[::-1]
    # K-th item collapses onto the (K+1)-th so the planted gap is exact
    base[K - 1] = base[K]
    w = base.copy()
    w[:K] += gap
    if K >= 2:
        w[0] = hi
    else:
        w[0], w[1] = hi, hi - gap
    return PreferenceVector(np.clip(w, lo, hi), lo, hi)


def sample_comparisons(
    w: PreferenceVector, g: ComparisonGraph, L: int, seed, exact: bool = False
) -> SufficientStats:
    """Aggregate ``L`` BTL comparisons per edge; ``exact`` uses win probabilities instead."""
    if w.n != g.n:
        raise ValueError(f"dimension mismatch: {w.n} scores for {g.n} items")
    e = g.edges
    p = btl_win_probability(w.scores[e[:, 0]], w.scores[e[:, 1]]) if len(e) else np.empty(0)
    p = np.atleast_1d(p)
    if exact:
        return SufficientStats(g, L, p)
    wins = _rng(seed).binomial(L, p)
    return SufficientStats(g, L, wins / L)


@dataclass(frozen=True)
class Instance:
    truth: PreferenceVector
    stats: SufficientStats
    attempts: int


def generate_instance(config: GenConfig) -> Instance:
    n, p = config.n, config.p_obs
    if p <= math.log(n) / n:
        warnings.warn(
            f"p_obs={p} is at or below log(n)/n={math.log(n) / n:.4g}; "
            "graphs will often be disconnected",
            stacklevel=2,
        )
    graph_seed, score_seed, cmp_seed = np.random.SeedSequence(config.seed).spawn(3)
    graph_rng = _rng(graph_seed)
    for attempt in range(1, config.max_regen_attempts + 1):
        g = sample_er_graph(n, p, graph_rng)
        if connectivity(g):
            break
    else:
        raise GenerationError(
            f"no connected graph after {config.max_regen_attempts} attempts "
            f"(n={n}, p_obs={p})"
        )
    w = sample_scores(config.scores, n, score_seed)
    stats = sample_comparisons(w, g, config.L, cmp_seed, exact=config.exact)
    return Instance(w, stats, attempt)
