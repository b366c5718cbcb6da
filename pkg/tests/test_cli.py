import csv
import subprocess
import sys
from pathlib import Path

import pytest

from btl_topk.bounds import FeasibilityReport
from btl_topk.cli import main
from btl_topk.io import InstanceFile, read_instance, write_instance
from btl_topk.model import ComparisonGraph, SufficientStats
from btl_topk.synth import GenConfig, ScoreScheme, generate_instance

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture
def instance(tmp_path):
    inst = generate_instance(
        GenConfig(20, 0.5, 10, ScoreScheme.planted(3, 0.3), seed=1, exact=True)
    )
    return write_instance(tmp_path / "inst.txt", InstanceFile(inst.stats, 0.5, 1.0, inst.truth.scores))


def test_rank_both(instance, capsys, tmp_path):
    out = tmp_path / "est.csv"
    assert main(["rank", str(instance), "--algo", "both", "--k", "3", "--out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "rank-centrality top-3: 1 2 3"
    assert lines[1] == "spectral-mle top-3: 1 2 3"
    assert lines[2] == "algo,seed,linf_error,l2_rel_error,success"
    assert lines[3].endswith(",true") and lines[4].endswith(",true")
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 20 and set(rows[0]) == {"item", "rank-centrality", "spectral-mle"}


def test_rank_exit_codes(tmp_path, instance, capsys):
    s = SufficientStats(ComparisonGraph(4, [(0, 1), (2, 3)]), 5, [0.5, 0.5])
    disc = write_instance(tmp_path / "d.txt", InstanceFile(s, 0.5, 1.0))
    assert main(["rank", str(disc), "--k", "1"]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("n=3\nL=oops\n")
    assert main(["rank", str(bad), "--k", "1"]) == 3
    assert main(["rank", str(tmp_path / "missing.txt"), "--k", "1"]) == 3
    assert main(["rank", str(instance), "--k", "20"]) == 1
    with pytest.raises(SystemExit) as info:
        main(["rank", str(instance)])
    assert info.value.code == 1
    capsys.readouterr()


def test_simulate_writes_readable_instances(tmp_path, capsys):
    assert main(["simulate", "--config", str(CONFIGS / "simulate.cfg"), "--out", str(tmp_path)]) == 0
    files = sorted(tmp_path.glob("inst_*.txt"))
    assert [f.name for f in files] == [f"inst_n20_p0.5_L10_K3_d0.2_s{s}.txt" for s in (1, 2, 3)]
    f = read_instance(files[0])
    assert f.stats.n == 20 and f.truth is not None
    again = tmp_path / "again"
    main(["simulate", "--config", str(CONFIGS / "simulate.cfg"), "--out", str(again)])
    assert (again / files[0].name).read_bytes() == files[0].read_bytes()
    capsys.readouterr()


def test_bounds_report(capsys, tmp_path):
    out = tmp_path / "b.csv"
    argv = ["bounds", "--n", "100", "--p-obs", "0.2", "--L", "5", "--delta", "0.3", "--csv", str(out)]
    assert main(argv) == 0
    text = capsys.readouterr().out
    assert "0.0252409312411644" in text and "2.5584278811045" in text
    assert "above achievability" in text
    rep = FeasibilityReport.from_csv(out.read_text())
    assert rep.fano_min_L == pytest.approx(0.0252409312411644)
    assert main(["bounds", "--n", "100", "--p-obs", "0.2", "--L", "5", "--delta", "0.3", "--eps", "0.7"]) == 1
    capsys.readouterr()


def _results_csv(path, rows):
    cols = ["algo", "n", "p_obs", "L", "K", "delta_K", "linf_mean", "linf_se",
            "success_rate", "success_ci_lo", "success_ci_hi"]
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, cols)
        w.writeheader()
        for r in rows:
            w.writerow({c: r.get(c, 0.5) for c in cols})
    return path


def test_plot_two_series(tmp_path, capsys):
    rows = [
        {"algo": a, "n": 100, "p_obs": 0.25, "L": L, "K": 10, "delta_K": "nan",
         "linf_mean": 0.4 / L**0.5, "linf_se": 0.01}
        for a in ("rank-centrality", "spectral-mle") for L in (5, 10, 20)
    ]
    res = _results_csv(tmp_path / "results.csv", rows)
    assert main(["plot", str(res), "--kind", "linf-vs-L"]) == 0
    svg = (tmp_path / "linf-vs-L.svg").read_text()
    assert svg.count("<polyline") == 2
    assert "L (repeated comparisons)" in svg
    assert svg.count('class="errorbar"') == 6
    capsys.readouterr()


def test_plot_single_row_and_success_clamp(tmp_path, capsys):
    res = _results_csv(tmp_path / "results.csv", [
        {"algo": "spectral-mle", "n": 100, "p_obs": 0.2, "L": 5, "K": 10, "delta_K": 0.1,
         "success_rate": 1.0, "success_ci_lo": 0.9, "success_ci_hi": 1.0},
    ])
    assert main(["plot", str(res), "--out", str(tmp_path / "svg")]) == 0
    svg = (tmp_path / "svg" / "success-vs-deltaK.svg").read_text()
    assert svg.count("<circle") == 1
    # y ticks run from 0 to 1
    assert ">0</text>" in svg and ">1</text>" in svg
    capsys.readouterr()


def test_plot_missing_columns(tmp_path, capsys):
    p = tmp_path / "r.csv"
    p.write_text("algo,n\nx,1\n")
    assert main(["plot", str(p)]) == 3
    assert "missing columns" in capsys.readouterr().err


def test_console_script_help():
    out = subprocess.run(
        [sys.executable, "-m", "btl_topk.cli", "--help"], capture_output=True, text=True, check=True
    )
    for sub in ("simulate", "rank", "experiment", "bounds", "plot"):
        assert sub in out.stdout
