import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from btl_topk.io import (
    ConfigError,
    FormatError,
    InstanceFile,
    cell_key,
    config_from_text,
    format_instance,
    parse_instance,
    read_csv_rows,
)
from btl_topk.synth import GenConfig, generate_instance


@pytest.mark.filterwarnings("ignore:p_obs")
@settings(max_examples=20, deadline=None)
@given(st.integers(2, 30), st.floats(0.2, 1.0), st.integers(1, 20), st.integers(0, 1000))
def test_instance_roundtrip_is_bit_exact(n, p, L, seed):
    inst = generate_instance(GenConfig(n, p, L, seed=seed))
    f = InstanceFile(inst.stats, 0.5, 1.0, inst.truth.scores)
    back = parse_instance(format_instance(f))
    assert np.array_equal(back.stats.graph.edges, inst.stats.graph.edges)
    assert np.array_equal(back.stats.y, inst.stats.y)
    assert np.array_equal(back.truth, inst.truth.scores)
    assert back.stats.L == L
    assert format_instance(back) == format_instance(f)


def test_parse_flips_and_comments():
    text = "n=3\nL=4\nw_min=0.5\nw_max=1\n# comment\n2,1,0.25\n2,3,0.5  # trailing\n"
    f = parse_instance(text)
    assert f.stats.win_fraction(0, 1) == 0.75
    assert f.truth is None and f.truth_vector() is None


@pytest.mark.parametrize(
    "text,match",
    [
        ("n=3\nL=4\nw_min=0.5\n1,2,0.5\n", "w_max"),
        ("n=3\nL=4\nw_min=0.5\nw_max=1\n1,2\n", ":5:"),
        ("n=3\nL=4\nw_min=0.5\nw_max=1\n1,2,x\n", ":5:"),
        ("n=3\nL=4\nw_min=0.5\nw_max=1\n1,4,0.5\n", "out of range"),
        ("n=3\nL=4\nw_min=0.5\nw_max=1\n1,2,1.5\n", "outside"),
        ("n=3\nL=4\nw_min=0.5\nw_max=1\ntruth=1,0.5\n", "truth"),
        ("n=3\nL=4\nw_min=0.5\nw_max=1\n1,2,0.5\n2,1,0.5\n", "duplicate"),
    ],
)
def test_parse_errors(text, match):
    with pytest.raises(FormatError, match=match):
        parse_instance(text)


def test_config_parsing():
    cfg = config_from_text(
        "n = 50, 100\np_obs = 0.2\nL = 5,10 # comment\nK = 3\ndelta_K = 0.1, 0.2\n"
        "trials = 4\nalgos = spectral-mle\nsplit_samples = yes\n"
    )
    assert cfg.n == [50, 100] and cfg.L == [5, 10] and cfg.delta_K == [0.1, 0.2]
    assert cfg.trials == 4 and cfg.algos == ["spectral-mle"] and cfg.split_samples


@pytest.mark.parametrize(
    "text,match",
    [
        ("n = 1\n", "cfg:1: n"),
        ("p_obs = 0.2\np_obs = 0.3\n", "duplicate"),
        ("bogus = 3\n", "unknown key"),
        ("trials = many\n", "cannot parse"),
        ("algos = magic\n", "must be one of"),
        ("score_lo = 2\n", "score_lo"),
        ("just text\n", "key = value"),
    ],
)
def test_config_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        config_from_text(text, "cfg")


def test_csv_missing_columns(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("algo,n\nx,1\n")
    with pytest.raises(FormatError, match="missing columns: L"):
        read_csv_rows(p, ["algo", "n", "L"])
    with pytest.raises(FormatError):
        read_csv_rows(tmp_path / "nope.csv")


def test_cell_key_uniform():
    row = {"algo": "a", "n": "10", "p_obs": "0.2", "L": "5", "K": "2", "delta_K": "nan"}
    assert cell_key(row) == ("a", 10, 0.2, 5, 2, "uniform")
    row["delta_K"] = "0.1"
    assert cell_key(row)[-1] == 0.1
