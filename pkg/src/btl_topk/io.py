"""Text formats: instance files, ``key = value`` configs, and results CSVs.

Instance file (UTF-8)::

    n=4
    L=5
    w_min=0.5
    w_max=1
    truth=1,0.8,0.7,0.5        # optional
    1,2,0.6                    # one edge per line: i,j,y_ij with 1-based ids

``y_ij`` is written with 17 significant digits so reading back is bit-exact.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import ComparisonGraph, PreferenceVector, SufficientStats


class FormatError(ValueError):
    """Malformed instance, config, or CSV file."""


class ConfigError(FormatError):
    pass


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


# --- instance files -------------------------------------------------------


@dataclass
class InstanceFile:
    stats: SufficientStats
    w_min: float
    w_max: float
    truth: np.ndarray | None = None

    def truth_vector(self) -> PreferenceVector | None:
        if self.truth is None:
            return None
        return PreferenceVector(self.truth, self.w_min, self.w_max)


def format_instance(inst: InstanceFile) -> str:
    s = inst.stats
    lines = [f"n={s.n}", f"L={s.L}", f"w_min={fmt_float(inst.w_min)}", f"w_max={fmt_float(inst.w_max)}"]
    if inst.truth is not None:
        lines.append("truth=" + ",".join(fmt_float(v) for v in inst.truth))
    for (i, j), y in zip(s.graph.edges, s.y):
        lines.append(f"{i + 1},{j + 1},{fmt_float(y)}")
    return "\n".join(lines) + "\n"


def write_instance(path, inst: InstanceFile) -> Path:
    path = Path(path)
    path.write_bytes(format_instance(inst).encode("utf-8"))
    return path


def parse_instance(text: str, source: str = "<instance>") -> InstanceFile:
    header: dict[str, str] = {}
    edges, ys = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if "=" in line:
            if edges:
                raise FormatError(f"{where}: header line after edge lines")
            key, _, value = line.partition("=")
            header[key.strip()] = value.strip()
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise FormatError(f"{where}: expected 'i,j,y', got {raw!r}")
        try:
            i, j, y = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise FormatError(f"{where}: cannot parse edge line {raw!r}") from None
        if not 0 <= y <= 1:
            raise FormatError(f"{where}: y={y} outside [0, 1]")
        if i > j:
            i, j, y = j, i, 1.0 - y
        edges.append((i - 1, j - 1))
        ys.append(y)

    for key in ("n", "L", "w_min", "w_max"):
        if key not in header:
            raise FormatError(f"{source}: missing header line '{key}=...'")
    try:
        n, L = int(header["n"]), int(header["L"])
        w_min, w_max = float(header["w_min"]), float(header["w_max"])
        truth = None
        if header.get("truth"):
            truth = np.array([float(v) for v in header["truth"].split(",")])
    except ValueError as exc:
        raise FormatError(f"{source}: bad header value ({exc})") from None
    if truth is not None and truth.size != n:
        raise FormatError(f"{source}: truth has {truth.size} entries, expected n={n}")
    e = np.array(edges, dtype=np.int64).reshape(-1, 2)
    if e.size and (e.min() < 0 or e.max() >= n):
        raise FormatError(f"{source}: edge id out of range 1..{n}")
    try:
        stats = SufficientStats(ComparisonGraph(n, e), L, np.array(ys))
    except ValueError as exc:
        raise FormatError(f"{source}: {exc}") from None
    return InstanceFile(stats, w_min, w_max, truth)


def read_instance(path) -> InstanceFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    return parse_instance(text, str(path))


# --- configs --------------------------------------------------------------


def parse_config_text(text: str, source: str = "<config>") -> dict[str, tuple[str, int]]:
    """Map each key to ``(raw value, line number)``."""
    out: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key '{key}'")
        out[key] = (value.strip(), lineno)
    return out


def _bool(s: str) -> bool:
    low = s.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _split(s: str) -> list[str]:
    return [p.strip() for p in s.split(",") if p.strip()]


ALGOS = ("rank-centrality", "spectral-mle")


@dataclass
class ExperimentConfig:
    n: list = field(default_factory=lambda: [100])
    p_obs: list = field(default_factory=lambda: [0.2])
    L: list = field(default_factory=lambda: [5])
    K: list = field(default_factory=lambda: [10])
    # empty: uniform scores; otherwise one planted separation per entry
    delta_K: list = field(default_factory=list)
    trials: int = 200
    algos: list = field(default_factory=lambda: list(ALGOS))
    seed: int = 0
    out: str = "results"
    score_lo: float = 0.5
    score_hi: float = 1.0
    c2: float = 5.0
    c3: float = 1.0
    split_samples: bool = False
    exact: bool = False
    seeds: list = field(default_factory=list)


# key -> (parser, is_list, validator, message)
_SCHEMA = {
    "n": (int, True, lambda v: v >= 2, "must be an integer >= 2"),
    "p_obs": (float, True, lambda v: 0 < v <= 1, "must lie in (0, 1]"),
    "L": (int, True, lambda v: v >= 1, "must be a positive integer"),
    "K": (int, True, lambda v: v >= 1, "must be a positive integer"),
    "delta_K": (float, True, lambda v: 0 <= v < 1, "must lie in [0, 1)"),
    "trials": (int, False, lambda v: v >= 1, "must be a positive integer"),
    "algos": (str, True, lambda v: v in ALGOS, f"must be one of {', '.join(ALGOS)}"),
    "seed": (int, False, lambda v: v >= 0, "must be a nonnegative integer"),
    "seeds": (int, True, lambda v: v >= 0, "must be nonnegative integers"),
    "out": (str, False, lambda v: bool(v), "must be a path"),
    "score_lo": (float, False, lambda v: v > 0, "must be positive"),
    "score_hi": (float, False, lambda v: v > 0, "must be positive"),
    "c2": (float, False, lambda v: v > 0, "must be positive"),
    "c3": (float, False, lambda v: v > 0, "must be positive"),
    "split_samples": (_bool, False, lambda v: True, ""),
    "exact": (_bool, False, lambda v: True, ""),
}


def config_from_text(text: str, source: str = "<config>") -> ExperimentConfig:
    raw = parse_config_text(text, source)
    cfg = ExperimentConfig()
    for key, (value, lineno) in raw.items():
        where = f"{source}:{lineno}: {key}"
        if key not in _SCHEMA:
            raise ConfigError(f"{where}: unknown key")
        parse, is_list, ok, msg = _SCHEMA[key]
        items = _split(value) if is_list else [value]
        if not items:
            raise ConfigError(f"{where}: empty value")
        try:
            parsed = [parse(v) for v in items]
        except ValueError:
            raise ConfigError(f"{where}: cannot parse {value!r}") from None
        for v in parsed:
            if not ok(v):
                raise ConfigError(f"{where}: {v!r} {msg}")
        setattr(cfg, key, parsed if is_list else parsed[0])
    if cfg.score_lo > cfg.score_hi:
        line = raw.get("score_lo", ("", 0))[1]
        raise ConfigError(f"{source}:{line}: score_lo: must not exceed score_hi")
    return cfg


def read_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return config_from_text(text, str(path))


# --- results CSV ----------------------------------------------------------

RESULT_COLUMNS = [
    "algo", "n", "p_obs", "L", "K", "delta_K", "trials",
    "linf_mean", "linf_se", "l2_mean", "l2_se",
    "success_rate", "success_ci_lo", "success_ci_hi",
    "failures", "runtime_ms",
]
TRIAL_COLUMNS = [
    "algo", "n", "p_obs", "L", "K", "delta_K", "trial_seed",
    "linf_error", "l2_rel_error", "topk_success", "replaced_total", "failed", "runtime_ms",
]
CELL_KEY = ["n", "p_obs", "L", "K", "delta_K"]


def cell_key(row: dict) -> tuple:
    """Normalized ``(algo, n, p_obs, L, K, delta_K)`` key of a CSV row."""
    d = row["delta_K"]
    d = math.nan if d in ("", "nan", None) else float(d)
    return (
        row["algo"], int(row["n"]), float(row["p_obs"]), int(row["L"]), int(row["K"]),
        "uniform" if math.isnan(d) else d,
    )


def read_csv_rows(path, required=()) -> list[dict]:
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = [c for c in required if c not in (reader.fieldnames or [])]
            if missing:
                raise FormatError(f"{path}: missing columns: {', '.join(missing)}")
            return list(reader)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None


def csv_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if v is None:
        return ""
    if isinstance(v, float):
        return "nan" if math.isnan(v) else fmt_float(v)
    return str(v)
