"""Command-line interface: ``btl-topk simulate | rank | experiment | bounds | plot``.

Exit codes: 0 ok, 1 usage, 2 infeasible input (disconnected graph), 3 IO/format.
Set ``BTL_TOPK_LOG`` (e.g. ``INFO``) for log output on stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import io as bio
from .bounds import RegimeSpec, feasibility_report
from .experiment import grid, run_experiment
from .metrics import l2_rel_error, linf_error, topk_success
from .model import TopKResult, connectivity, top_k_indices
from .rank_centrality import ConvergenceError, rank_centrality_estimate
from .spectral_mle import SpectralMleParams, spectral_mle_rank
from .svgplot import FIGURES, render_svg, required_columns
from .synth import GenConfig, GenerationError, ScoreScheme, generate_instance

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_FORMAT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fail(code: int, message: str) -> int:
    print(f"btl-topk: {message}", file=sys.stderr)
    return code


def cmd_simulate(args) -> int:
    cfg = bio.read_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    out = Path(args.out or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    seeds = cfg.seeds or [cfg.seed]
    for cell in grid(cfg):
        scheme = (
            ScoreScheme.uniform(cfg.score_lo, cfg.score_hi)
            if cell.delta_K is None
            else ScoreScheme.planted(cell.K, cell.delta_K, cfg.score_lo, cfg.score_hi)
        )
        for seed in seeds:
            inst = generate_instance(GenConfig(cell.n, cell.p_obs, cell.L, scheme, seed, exact=cfg.exact))
            name = f"inst_n{cell.n}_p{cell.p_obs:g}_L{cell.L}"
            if cell.delta_K is not None:
                name += f"_K{cell.K}_d{cell.delta_K:g}"
            path = out / f"{name}_s{seed}.txt"
            bio.write_instance(
                path, bio.InstanceFile(inst.stats, cfg.score_lo, cfg.score_hi, inst.truth.scores)
            )
            print(path)
    return EXIT_OK


def cmd_rank(args) -> int:
    inst = bio.read_instance(args.instance)
    stats = inst.stats
    if not connectivity(stats.graph):
        return _fail(EXIT_INFEASIBLE, f"{args.instance}: comparison graph is disconnected")
    if not 1 <= args.k < stats.n:
        return _fail(EXIT_USAGE, f"--k must satisfy 1 <= k < n={stats.n}")
    algos = ["rank-centrality", "spectral-mle"] if args.algo == "both" else [args.algo]
    truth = inst.truth_vector()
    rc = rank_centrality_estimate(stats, inst.w_min, inst.w_max)
    estimates = {}
    for algo in algos:
        if algo == "rank-centrality":
            est = rc.scores
            result = TopKResult(args.k, top_k_indices(est, args.k), est)
        else:
            params = SpectralMleParams(
                K=args.k, w_min=inst.w_min, w_max=inst.w_max, c2=args.c2, c3=args.c3,
                split_samples=args.split,
            )
            res = spectral_mle_rank(stats, params, args.seed, init=None if args.split else rc)
            est, result = res.top_k.estimate, res.top_k
        estimates[algo] = est
        ids = " ".join(str(i + 1) for i in sorted(result.indices))
        print(f"{algo} top-{args.k}: {ids}")
        if truth is not None:
            estimates[algo, "row"] = (
                algo, args.seed, linf_error(est, truth), l2_rel_error(est, truth),
                topk_success(result, truth, args.k),
            )
    if truth is not None:
        print("algo,seed,linf_error,l2_rel_error,success")
        for algo in algos:
            a, seed, linf, l2, ok = estimates[algo, "row"]
            okstr = "ambiguous" if ok is None else str(ok).lower()
            print(f"{a},{seed},{bio.fmt_float(linf)},{bio.fmt_float(l2)},{okstr}")
    if args.out:
        lines = ["item," + ",".join(algos)]
        for i in range(stats.n):
            lines.append(f"{i + 1}," + ",".join(bio.fmt_float(estimates[a][i]) for a in algos))
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = bio.read_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    path = run_experiment(cfg, args.out, jobs=args.jobs)
    print(path)
    return EXIT_OK


def cmd_bounds(args) -> int:
    try:
        spec = RegimeSpec(args.n, args.p_obs, args.L, args.delta, args.k, args.w_min, args.w_max, args.eps)
    except ValueError as exc:
        print(f"btl-topk bounds: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = feasibility_report(spec)
    sys.stdout.write(report.to_text())
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    return EXIT_OK


def cmd_plot(args) -> int:
    kinds = list(FIGURES) if args.kind == "all" else [args.kind]
    needed = sorted({c for k in kinds for c in required_columns(k)}, key=bio.RESULT_COLUMNS.index)
    rows = bio.read_csv_rows(args.results, needed)
    out = Path(args.out) if args.out else Path(args.results).parent
    out.mkdir(parents=True, exist_ok=True)
    for kind in kinds:
        path = out / f"{kind}.svg"
        path.write_text(render_svg(rows, kind), encoding="utf-8")
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="btl-topk", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="write synthetic instance files")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("rank", help="rank one instance file")
    r.add_argument("instance")
    r.add_argument("--algo", choices=["rank-centrality", "spectral-mle", "both"], default="spectral-mle")
    r.add_argument("--k", type=int, required=True)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--c2", type=float, default=5.0)
    r.add_argument("--c3", type=float, default=1.0)
    r.add_argument("--split", action="store_true", help="split edges between init and refinement")
    r.add_argument("--out", help="write per-item estimates as CSV")
    r.set_defaults(func=cmd_rank)

    e = sub.add_parser("experiment", help="run a Monte Carlo sweep")
    e.add_argument("--config", required=True)
    e.add_argument("--out")
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--seed", type=int)
    e.set_defaults(func=cmd_experiment)

    b = sub.add_parser("bounds", help="minimax / achievability thresholds on L")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--p-obs", type=float, required=True)
    b.add_argument("--L", type=float, required=True)
    b.add_argument("--delta", type=float, required=True)
    b.add_argument("--k", type=int, default=1)
    b.add_argument("--w-min", type=float, default=0.5)
    b.add_argument("--w-max", type=float, default=1.0)
    b.add_argument("--eps", type=float, default=0.25)
    b.add_argument("--csv", help="also write the report as CSV")
    b.set_defaults(func=cmd_bounds)

    pl = sub.add_parser("plot", help="SVG charts from a results CSV")
    pl.add_argument("results")
    pl.add_argument("--kind", choices=[*FIGURES, "all"], default="all")
    pl.add_argument("--out", help="output directory (default: next to the CSV)")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    level = os.environ.get("BTL_TOPK_LOG", "WARNING").upper()
    logging.basicConfig(
        level=level if isinstance(logging.getLevelName(level), int) else "WARNING",
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except bio.FormatError as exc:
        return _fail(EXIT_FORMAT, str(exc))
    except (GenerationError, ConvergenceError) as exc:
        return _fail(EXIT_INFEASIBLE, str(exc))
    except ValueError as exc:
        return _fail(EXIT_USAGE, str(exc))


if __name__ == "__main__":
    sys.exit(main())
