import csv
import math
import time
from dataclasses import replace

import pytest

from btl_topk.cli import main
from btl_topk.experiment import Cell, grid, run_cell, run_experiment, run_trial
from btl_topk.io import RESULT_COLUMNS, ConfigError, ExperimentConfig, read_csv_rows

SMALL = ExperimentConfig(n=[30], p_obs=[0.3, 0.5], L=[5, 10], K=[3], trials=3, seed=5)


def _strip_runtime(path):
    rows = list(csv.reader(path.open()))
    idx = rows[0].index("runtime_ms")
    return [r[:idx] + r[idx + 1:] for r in rows]


def test_grid_and_validation():
    assert len(grid(SMALL)) == 4
    with pytest.raises(ConfigError):
        grid(replace(SMALL, K=[30]))
    with pytest.raises(ConfigError):
        grid(replace(SMALL, delta_K=[0.9]))
    cells = grid(replace(SMALL, delta_K=[0.1, 0.2]))
    assert {c.delta_K for c in cells} == {0.1, 0.2}


def test_run_trial_records():
    recs = run_trial(Cell(30, 0.3, 5, 3), 0, SMALL)
    assert [r.algo for r in recs] == ["rank-centrality", "spectral-mle"]
    assert all(r.trial_seed == 5 and not r.failed for r in recs)
    assert all(0 <= r.linf_error < 1 for r in recs)


def test_failed_generation_is_recorded():
    cfg = replace(SMALL, trials=1)
    with pytest.warns(UserWarning):
        recs = run_trial(Cell(200, 0.001, 5, 3), 0, cfg)
    assert all(r.failed and math.isnan(r.linf_error) for r in recs)


def test_jobs_do_not_change_results():
    cell = Cell(30, 0.3, 5, 3)
    a = run_cell(cell, SMALL, jobs=1)
    b = run_cell(cell, SMALL, jobs=2)
    strip = lambda rs: [replace(r, runtime_ms=0.0) for r in rs]  # noqa: E731
    assert strip(a) == strip(b)


def test_determinism_and_resume(tmp_path):
    full1 = run_experiment(SMALL, tmp_path / "a")
    full2 = run_experiment(SMALL, tmp_path / "b")
    assert _strip_runtime(full1) == _strip_runtime(full2)
    part = run_experiment(SMALL, tmp_path / "c", max_cells=1)
    assert len(read_csv_rows(part)) == 2
    resumed = run_experiment(SMALL, tmp_path / "c")
    assert _strip_runtime(resumed) == _strip_runtime(full1)
    assert _strip_runtime(tmp_path / "c" / "trials.csv") == _strip_runtime(tmp_path / "a" / "trials.csv")


def test_resume_after_truncated_trials(tmp_path):
    out = tmp_path / "r"
    run_experiment(SMALL, out, max_cells=2)
    # simulate a crash while the third cell's traces were being written
    with (out / "trials.csv").open("a") as fh:
        fh.write("spectral-mle,30,0.5,5,3,nan,5,0.1,0.1,1,0,0,1.0\n")
    run_experiment(SMALL, out)
    ref = run_experiment(SMALL, tmp_path / "ref")
    assert _strip_runtime(out / "results.csv") == _strip_runtime(ref)
    assert _strip_runtime(out / "trials.csv") == _strip_runtime(tmp_path / "ref" / "trials.csv")


def test_results_csv_schema(tmp_path):
    path = run_experiment(replace(SMALL, p_obs=[0.3], L=[5]), tmp_path)
    rows = read_csv_rows(path, RESULT_COLUMNS)
    assert [r["algo"] for r in rows] == ["rank-centrality", "spectral-mle"]
    assert rows[0]["delta_K"] == "nan" and rows[0]["trials"] == "3"


def test_cli_experiment_and_plot(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("n = 30\np_obs = 0.3\nL = 5, 10\nK = 3\ntrials = 2\n")
    assert main(["experiment", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert main(["plot", str(tmp_path / "o" / "results.csv")]) == 0
    assert (tmp_path / "o" / "linf-vs-L.svg").exists()
    bad = tmp_path / "bad.cfg"
    bad.write_text("n = 30\nK = 40\n")
    assert main(["experiment", "--config", str(bad), "--out", str(tmp_path / "x")]) == 3
    capsys.readouterr()


def test_single_trial_smoke_is_fast(tmp_path):
    cfg = ExperimentConfig(n=[100], p_obs=[0.2], L=[5], K=[10], trials=1)
    t0 = time.perf_counter()
    path = run_experiment(cfg, tmp_path)
    assert time.perf_counter() - t0 < 10
    assert len(read_csv_rows(path)) == 2
