"""Estimation-error metrics, top-K success, and Monte Carlo summaries.

BTL scores are only identified up to scale, so the error metrics first rescale
the estimate by the least-squares optimal scalar (``gauge_align``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import PreferenceVector, TopKResult, top_k_indices

Z95 = 1.959963984540054


def _arr(w) -> np.ndarray:
    return w.scores if isinstance(w, PreferenceVector) else np.asarray(w, dtype=float)


def gauge_align(estimate, truth) -> np.ndarray:
    e, w = _arr(estimate), _arr(truth)
    if e.shape != w.shape:
        raise ValueError(f"shape mismatch: {e.shape} vs {w.shape}")
    ee = float(e @ e)
    if ee == 0:
        raise ValueError("cannot align an all-zero estimate")
    return (float(e @ w) / ee) * e


def linf_error(estimate, truth) -> float:
    return float(np.max(np.abs(gauge_align(estimate, truth) - _arr(truth))))


def l2_rel_error(estimate, truth) -> float:
    w = _arr(truth)
    return float(np.linalg.norm(gauge_align(estimate, truth) - w) / np.linalg.norm(w))


def topk_success(result, truth, K: int | None = None) -> bool | None:
    """Whether the returned set equals the true top-K set.

    Returns ``None`` when the true top-K set is ambiguous (tie at the boundary).
    ``result`` may be a ``TopKResult`` or any iterable of indices.
    """
    if isinstance(result, TopKResult):
        K = result.k if K is None else K
        returned = result.indices
    else:
        returned = frozenset(int(i) for i in result)
        K = len(returned) if K is None else K
    w = _arr(truth)
    if K < w.size:
        s = np.sort(w)[::-1]
        if s[K - 1] == s[K]:
            return None
    return frozenset(returned) == top_k_indices(w, K)


@dataclass(frozen=True)
class TrialRecord:
    trial_seed: int
    algo: str
    linf_error: float
    l2_rel_error: float
    topk_success: bool | None
    runtime_ms: float
    replaced_total: int = 0
    failed: bool = False


@dataclass(frozen=True)
class Summary:
    algo: str
    trials: int
    linf_mean: float
    linf_se: float
    l2_mean: float
    l2_se: float
    success_rate: float
    success_ci_lo: float
    success_ci_hi: float
    failures: int
    runtime_ms: float


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    if x.size == 0:
        return math.nan, math.nan
    se = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return float(np.mean(x)), se


def success_interval(successes: int, total: int) -> tuple[float, float, float]:
    """Rate with a 95% normal-approximation interval clamped to [0, 1]."""
    if total == 0:
        return math.nan, math.nan, math.nan
    p = successes / total
    half = Z95 * math.sqrt(p * (1 - p) / total)
    return p, max(0.0, p - half), min(1.0, p + half)


def aggregate(records) -> list[Summary]:
    """Per-algorithm summary, in order of first appearance.

    Failed trials are counted but excluded from the means; ambiguous top-K
    outcomes are excluded from the success rate.
    """
    records = list(records)
    if not records:
        raise ValueError("cannot aggregate an empty list of records")
    algos = list(dict.fromkeys(r.algo for r in records))
    out = []
    for algo in algos:
        rows = [r for r in records if r.algo == algo]
        ok = [r for r in rows if not r.failed]
        linf = _mean_se(np.array([r.linf_error for r in ok]))
        l2 = _mean_se(np.array([r.l2_rel_error for r in ok]))
        decided = [r.topk_success for r in ok if r.topk_success is not None]
        rate, lo, hi = success_interval(sum(decided), len(decided))
        runtime = float(np.mean([r.runtime_ms for r in rows]))
        out.append(
            Summary(algo, len(ok), *linf, *l2, rate, lo, hi, len(rows) - len(ok), runtime)
        )
    return out
