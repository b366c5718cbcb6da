"""Top-K rank aggregation from pairwise comparisons under the BTL model."""

from .estimators import RankCentrality, SpectralMLE, check_comparisons
from .model import (
    ComparisonGraph,
    PreferenceVector,
    SufficientStats,
    TopKResult,
    btl_win_probability,
    connectivity,
    separation_measure,
    top_k_indices,
)
from .rank_centrality import build_transition, rank_centrality_estimate, stationary_distribution
from .spectral_mle import SpectralMleParams, spectral_mle_rank, threshold_schedule
from .synth import GenConfig, ScoreScheme, generate_instance

__all__ = [
    "ComparisonGraph",
    "GenConfig",
    "PreferenceVector",
    "RankCentrality",
    "ScoreScheme",
    "SpectralMLE",
    "SpectralMleParams",
    "SufficientStats",
    "TopKResult",
    "btl_win_probability",
    "build_transition",
    "check_comparisons",
    "connectivity",
    "generate_instance",
    "rank_centrality_estimate",
    "separation_measure",
    "spectral_mle_rank",
    "stationary_distribution",
    "threshold_schedule",
    "top_k_indices",
]

__version__ = "0.1.0"
