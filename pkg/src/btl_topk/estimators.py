"""scikit-learn compatible wrappers around Rank Centrality and Spectral MLE.

Both estimators accept either a :class:`~btl_topk.model.SufficientStats` or an
array of shape ``(m, 3)`` whose rows are ``(i, j, y_ij)`` with 0-based item ids
and ``y_ij`` the fraction of the ``L`` comparisons that ``i`` won against ``j``.

>>> est = SpectralMLE(k=2).fit([[0, 1, 0.8], [1, 2, 0.6], [0, 2, 0.9]], L=10)
>>> est.predict().tolist()
[0, 1]
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .coord_mle import DEFAULT_TOL
from .model import ComparisonGraph, SufficientStats, connectivity, top_k_indices
from .rank_centrality import rank_centrality_estimate
from .spectral_mle import SpectralMleParams, spectral_mle_rank


def check_comparisons(X, n_items: int | None = None, L: int | None = None) -> SufficientStats:
    """Validate comparison input and return it as ``SufficientStats``.

    Raises ``ValueError`` for malformed rows, out-of-range fractions, and
    comparison graphs that are not connected.
    """
    if isinstance(X, SufficientStats):
        stats = X
    else:
        X = check_array(X, dtype=float, ensure_min_samples=1)
        if X.shape[1] != 3:
            raise ValueError(f"expected rows (i, j, y_ij), got {X.shape[1]} columns")
        ij = X[:, :2]
        if not np.array_equal(ij, np.round(ij)) or ij.min() < 0:
            raise ValueError("item ids must be nonnegative integers")
        ij = ij.astype(np.int64)
        n = int(ij.max()) + 1 if n_items is None else int(n_items)
        y = X[:, 2].copy()
        flip = ij[:, 0] > ij[:, 1]
        y[flip] = 1.0 - y[flip]
        stats = SufficientStats(ComparisonGraph(n, ij), 1 if L is None else L, y)
    if not connectivity(stats.graph):
        raise ValueError("comparison graph must be connected")
    return stats


def _check_k(k, n):
    if not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < n_items={n}, got {k}")


class RankCentrality(BaseEstimator):
    """Spectral score estimate from the stationary distribution of a comparison walk.

    Attributes set by ``fit``: ``scores_`` (rescaled to max ``w_max`` and clipped
    at ``w_min``), ``stationary_``, ``n_clipped_``, ``n_iter_``, ``top_k_``.
    """

    def __init__(self, k=1, w_min=0.5, w_max=1.0, tol=1e-10, max_iter=None):
        self.k = k
        self.w_min = w_min
        self.w_max = w_max
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None, *, n_items=None, L=None):
        stats = check_comparisons(X, n_items, L)
        _check_k(self.k, stats.n)
        res = rank_centrality_estimate(stats, self.w_min, self.w_max, self.tol, self.max_iter)
        self.scores_ = res.scores
        self.stationary_ = res.stationary
        self.n_clipped_ = res.n_clipped
        self.n_iter_ = res.n_iter
        self.n_items_ = stats.n
        self.top_k_ = np.array(sorted(top_k_indices(res.scores, self.k)))
        return self

    def predict(self, X=None):
        """Indices of the ``k`` highest-scoring items (sorted ascending)."""
        check_is_fitted(self, "scores_")
        return self.top_k_

    def fit_predict(self, X, y=None, **fit_params):
        return self.fit(X, y, **fit_params).predict()


class SpectralMLE(BaseEstimator):
    """Rank Centrality initialization refined by thresholded coordinate-wise MLE.

    ``random_state`` only matters with ``split_samples=True``.
    """

    def __init__(
        self,
        k=1,
        w_min=0.5,
        w_max=1.0,
        c2=5.0,
        c3=1.0,
        split_samples=False,
        rc_tol=1e-10,
        mle_tol=DEFAULT_TOL,
        p_obs=None,
        record_trajectory=False,
        random_state=None,
    ):
        self.k = k
        self.w_min = w_min
        self.w_max = w_max
        self.c2 = c2
        self.c3 = c3
        self.split_samples = split_samples
        self.rc_tol = rc_tol
        self.mle_tol = mle_tol
        self.p_obs = p_obs
        self.record_trajectory = record_trajectory
        self.random_state = random_state

    def _params(self) -> SpectralMleParams:
        return SpectralMleParams(
            K=self.k, w_min=self.w_min, w_max=self.w_max, c2=self.c2, c3=self.c3,
            split_samples=self.split_samples, rc_tol=self.rc_tol, mle_tol=self.mle_tol,
            record_trajectory=self.record_trajectory, p_obs=self.p_obs,
        )

    def fit(self, X, y=None, *, n_items=None, L=None):
        stats = check_comparisons(X, n_items, L)
        _check_k(self.k, stats.n)
        seed = 0 if self.random_state is None else self.random_state
        res = spectral_mle_rank(stats, self._params(), seed)
        self.scores_ = res.top_k.estimate
        self.init_scores_ = res.init_scores
        self.trace_ = res.trace
        self.n_clipped_ = res.n_clipped
        self.n_items_ = stats.n
        self.top_k_ = np.array(sorted(res.top_k.indices))
        return self

    def predict(self, X=None):
        """Indices of the ``k`` highest-scoring items (sorted ascending)."""
        check_is_fitted(self, "scores_")
        return self.top_k_

    def fit_predict(self, X, y=None, **fit_params):
        return self.fit(X, y, **fit_params).predict()
