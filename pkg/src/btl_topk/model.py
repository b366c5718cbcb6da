"""Shared domain types and elementary BTL quantities.

Items are indexed from 0 internally. File formats and the CLI show 1-based ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class PreferenceVector:
    """Latent (or estimated) scores confined to the box ``[w_min, w_max]``."""

    scores: np.ndarray
    w_min: float
    w_max: float

    def __post_init__(self):
        scores = np.array(self.scores, dtype=float)
        if scores.ndim != 1 or scores.size < 2:
            raise ValueError("scores must be a 1-d array with at least 2 entries")
        if not 0 < self.w_min <= self.w_max:
            raise ValueError(f"need 0 < w_min <= w_max, got {self.w_min}, {self.w_max}")
        if scores.min() < self.w_min or scores.max() > self.w_max:
            raise ValueError(
                f"scores must lie in [{self.w_min}, {self.w_max}], "
                f"got range [{scores.min()}, {scores.max()}]"
            )
        object.__setattr__(self, "scores", _frozen(scores))

    @property
    def n(self) -> int:
        return self.scores.size


@dataclass(frozen=True)
class ComparisonGraph:
    """Undirected comparison graph with canonical edges ``(i, j)``, ``i < j``."""

    n: int
    edges: np.ndarray

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("a comparison graph needs at least 2 items")
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if (edges[:, 0] == edges[:, 1]).any():
                raise ValueError("self-loops are not allowed")
            if edges.min() < 0 or edges.max() >= self.n:
                raise ValueError("edge endpoint out of range")
            edges = np.sort(edges, axis=1)
            if len(np.unique(edges, axis=0)) != len(edges):
                raise ValueError("duplicate edges are not allowed")
        object.__setattr__(self, "edges", _frozen(edges))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def density(self) -> float:
        return self.n_edges / (self.n * (self.n - 1) / 2)


@dataclass(frozen=True)
class SufficientStats:
    """Averaged outcomes over ``L`` repeated comparisons on every edge.

    ``y[e]`` is the fraction of comparisons that ``graph.edges[e, 0]`` won
    against ``graph.edges[e, 1]``; the reverse direction is ``1 - y[e]``.
    """

    graph: ComparisonGraph
    L: int
    y: np.ndarray

    def __post_init__(self):
        y = np.array(self.y, dtype=float).reshape(-1)
        if y.size != self.graph.n_edges:
            raise ValueError(f"expected {self.graph.n_edges} outcomes, got {y.size}")
        if y.size and (y.min() < 0 or y.max() > 1 or not np.isfinite(y).all()):
            raise ValueError("outcome fractions must lie in [0, 1]")
        if int(self.L) != self.L or self.L < 1:
            raise ValueError(f"L must be a positive integer, got {self.L}")
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "y", _frozen(y))

    @property
    def n(self) -> int:
        return self.graph.n

    def directed(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(src, dst, y_src_dst)`` listing both directions of every edge."""
        e = self.graph.edges
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        return src, dst, np.concatenate([self.y, 1.0 - self.y])

    def win_fraction(self, i: int, j: int) -> float:
        a, b = min(i, j), max(i, j)
        hit = np.flatnonzero((self.graph.edges[:, 0] == a) & (self.graph.edges[:, 1] == b))
        if hit.size == 0:
            raise KeyError(f"({i}, {j}) is not an edge")
        y = float(self.y[hit[0]])
        return y if i == a else 1.0 - y

    def restrict(self, mask: np.ndarray) -> "SufficientStats":
        """Statistics on the sub-graph keeping edges where ``mask`` is true."""
        mask = np.asarray(mask, dtype=bool)
        return SufficientStats(
            ComparisonGraph(self.n, self.graph.edges[mask]), self.L, self.y[mask]
        )


@dataclass(frozen=True)
class TopKResult:
    k: int
    indices: frozenset
    estimate: np.ndarray
    info: dict = field(default_factory=dict, compare=False)


def btl_win_probability(w_i, w_j):
    """Probability that an item of score ``w_i`` beats one of score ``w_j``."""
    w_i = np.asarray(w_i, dtype=float)
    w_j = np.asarray(w_j, dtype=float)
    if (w_i <= 0).any() or (w_j <= 0).any():
        raise ValueError("BTL scores must be positive")
    p = w_i / (w_i + w_j)
    return float(p) if p.ndim == 0 else p


def separation_measure(w: PreferenceVector, K: int) -> float:
    """Normalized gap ``(w_(K) - w_(K+1)) / w_max`` at the top-K boundary."""
    if not 1 <= K < w.n:
        raise ValueError(f"K must satisfy 1 <= K < n={w.n}, got {K}")
    s = np.sort(w.scores)[::-1]
    return float((s[K - 1] - s[K]) / w.w_max)


def top_k_indices(w, K: int) -> frozenset:
    """Indices of the ``K`` largest scores; ties go to the lower index."""
    scores = w.scores if isinstance(w, PreferenceVector) else np.asarray(w, dtype=float)
    if not 1 <= K <= scores.size:
        raise ValueError(f"K must satisfy 1 <= K <= n={scores.size}, got {K}")
    order = np.lexsort((np.arange(scores.size), -scores))
    return frozenset(int(i) for i in order[:K])


def connectivity(g: ComparisonGraph) -> bool:
    if g.n_edges == 0:
        return False
    e = g.edges
    adj = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(g.n, g.n))
    n_comp, _ = connected_components(adj, directed=False)
    return n_comp == 1
