"""Monte Carlo sweeps over ``(n, p_obs, L, K, delta_K)`` grids with resumable CSV output.

Trial ``t`` of every cell uses instance seed ``config.seed + t``, so cells share
random numbers and a rerun reproduces the same CSV (``runtime_ms`` aside).
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import io as bio
from .metrics import TrialRecord, aggregate, l2_rel_error, linf_error, topk_success
from .model import TopKResult, top_k_indices
from .rank_centrality import rank_centrality_estimate
from .spectral_mle import SpectralMleParams, spectral_mle_rank
from .synth import GenConfig, GenerationError, ScoreScheme, generate_instance

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cell:
    n: int
    p_obs: float
    L: int
    K: int
    delta_K: float | None = None

    def key(self, algo: str) -> tuple:
        return (algo, self.n, float(self.p_obs), self.L, self.K,
                "uniform" if self.delta_K is None else float(self.delta_K))


def grid(config: bio.ExperimentConfig) -> list[Cell]:
    deltas = config.delta_K or [None]
    cells = []
    for n, p, L, K, d in itertools.product(config.n, config.p_obs, config.L, config.K, deltas):
        if not 1 <= K < n:
            raise bio.ConfigError(f"K={K} must satisfy 1 <= K < n={n}")
        if d is not None:
            try:
                ScoreScheme.planted(K, d, config.score_lo, config.score_hi)
            except ValueError as exc:
                raise bio.ConfigError(f"delta_K: {exc}") from None
        cells.append(Cell(n, p, L, K, d))
    return cells


def _scheme(cell: Cell, config) -> ScoreScheme:
    if cell.delta_K is None:
        return ScoreScheme.uniform(config.score_lo, config.score_hi)
    return ScoreScheme.planted(cell.K, cell.delta_K, config.score_lo, config.score_hi)


def run_trial(cell: Cell, trial: int, config: bio.ExperimentConfig) -> list[TrialRecord]:
    """One instance, every requested algorithm; failures become flagged records."""
    seed = config.seed + trial
    lo, hi = config.score_lo, config.score_hi
    try:
        inst = generate_instance(
            GenConfig(cell.n, cell.p_obs, cell.L, _scheme(cell, config), seed, exact=config.exact)
        )
    except GenerationError as exc:
        log.warning("trial %d of %s failed: %s", trial, cell, exc)
        return [TrialRecord(seed, a, math.nan, math.nan, None, 0.0, 0, True) for a in config.algos]

    truth = inst.truth
    records = []
    t0 = time.perf_counter()
    try:
        rc = rank_centrality_estimate(inst.stats, lo, hi)
    except Exception as exc:  # noqa: BLE001 - any numerical failure is recorded, not raised
        log.warning("trial %d of %s failed in rank centrality: %s", trial, cell, exc)
        return [TrialRecord(seed, a, math.nan, math.nan, None, 0.0, 0, True) for a in config.algos]
    rc_ms = 1e3 * (time.perf_counter() - t0)

    for algo in config.algos:
        if algo == "rank-centrality":
            est, ms, replaced = rc.scores, rc_ms, 0
            result = TopKResult(cell.K, top_k_indices(est, cell.K), est)
        else:
            params = SpectralMleParams(
                K=cell.K, w_min=lo, w_max=hi, c2=config.c2, c3=config.c3,
                split_samples=config.split_samples,
            )
            t1 = time.perf_counter()
            try:
                res = spectral_mle_rank(
                    inst.stats, params, seed, init=None if config.split_samples else rc
                )
            except Exception as exc:  # noqa: BLE001
                log.warning("trial %d of %s failed in spectral MLE: %s", trial, cell, exc)
                records.append(TrialRecord(seed, algo, math.nan, math.nan, None, 0.0, 0, True))
                continue
            ms = 1e3 * (time.perf_counter() - t1) + (0.0 if config.split_samples else rc_ms)
            est, result, replaced = res.top_k.estimate, res.top_k, res.trace.replaced_total
        records.append(
            TrialRecord(
                seed, algo, linf_error(est, truth), l2_rel_error(est, truth),
                topk_success(result, truth, cell.K), ms, replaced,
            )
        )
    return records


def _run_chunk(args):
    cell, trials, config = args
    return [run_trial(cell, t, config) for t in trials]


def run_cell(cell: Cell, config: bio.ExperimentConfig, jobs: int = 1) -> list[TrialRecord]:
    """All trials of one cell, ordered by trial index regardless of ``jobs``."""
    trials = list(range(config.trials))
    if jobs <= 1:
        nested = [run_trial(cell, t, config) for t in trials]
    else:
        chunks = [trials[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(jobs) as pool:
            parts = list(pool.map(_run_chunk, [(cell, c, config) for c in chunks]))
        by_trial = {}
        for chunk, part in zip(chunks, parts):
            by_trial.update(zip(chunk, part))
        nested = [by_trial[t] for t in trials]
    return [r for recs in nested for r in recs]


def summary_rows(cell: Cell, records: list[TrialRecord]) -> list[dict]:
    rows = []
    for s in aggregate(records):
        rows.append({
            "algo": s.algo, "n": cell.n, "p_obs": float(cell.p_obs), "L": cell.L, "K": cell.K,
            "delta_K": math.nan if cell.delta_K is None else float(cell.delta_K),
            "trials": s.trials, "linf_mean": s.linf_mean, "linf_se": s.linf_se,
            "l2_mean": s.l2_mean, "l2_se": s.l2_se, "success_rate": s.success_rate,
            "success_ci_lo": s.success_ci_lo, "success_ci_hi": s.success_ci_hi,
            "failures": s.failures, "runtime_ms": s.runtime_ms,
        })
    return rows


def _line(values) -> str:
    return ",".join(bio.csv_value(v) for v in values) + "\n"


def run_experiment(
    config: bio.ExperimentConfig,
    out_dir=None,
    jobs: int = 1,
    max_cells: int | None = None,
) -> Path:
    """Run (or resume) the sweep; returns the results CSV path.

    Cells whose rows are already in ``results.csv`` are skipped. ``max_cells``
    stops after that many newly computed cells (used to test resumption).
    """
    out = Path(out_dir or config.out)
    out.mkdir(parents=True, exist_ok=True)
    results_path, trials_path = out / "results.csv", out / "trials.csv"
    cells = grid(config)

    done = set()
    if results_path.exists():
        done = {bio.cell_key(r) for r in bio.read_csv_rows(results_path, bio.RESULT_COLUMNS)}
    else:
        results_path.write_text(",".join(bio.RESULT_COLUMNS) + "\n", encoding="utf-8")

    # drop traces of cells whose summary never made it to results.csv
    kept = []
    if trials_path.exists():
        kept = [r for r in bio.read_csv_rows(trials_path) if bio.cell_key(r) in done]
    with trials_path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(bio.TRIAL_COLUMNS) + "\n")
        for r in kept:
            fh.write(",".join(r[c] for c in bio.TRIAL_COLUMNS) + "\n")

    computed = 0
    for cell in cells:
        if all(cell.key(a) in done for a in config.algos):
            continue
        if max_cells is not None and computed >= max_cells:
            break
        log.info("running %s (%d trials)", cell, config.trials)
        records = run_cell(cell, config, jobs)
        d = math.nan if cell.delta_K is None else float(cell.delta_K)
        with trials_path.open("a", encoding="utf-8") as fh:
            fh.write("".join(
                _line([r.algo, cell.n, float(cell.p_obs), cell.L, cell.K, d, r.trial_seed,
                       r.linf_error, r.l2_rel_error, r.topk_success, r.replaced_total,
                       r.failed, r.runtime_ms])
                for r in records
            ))
        rows = [r for r in summary_rows(cell, records) if cell.key(r["algo"]) not in done]
        with results_path.open("a", encoding="utf-8") as fh:
            fh.write("".join(_line([row[c] for c in bio.RESULT_COLUMNS]) for row in rows))
        computed += 1
    return results_path


def success_rate(cell: Cell, config: bio.ExperimentConfig, algo: str = "spectral-mle",
                 jobs: int = 1) -> float:
    """Empirical top-K success rate of one algorithm on one cell."""
    cfg = replace(config, algos=[algo])
    records = run_cell(cell, cfg, jobs)
    decided = [r.topk_success for r in records if not r.failed and r.topk_success is not None]
    return float(np.mean(decided)) if decided else math.nan
