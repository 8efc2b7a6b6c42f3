"""Command-line surface: evaluate, impute, and benchmark subcommands."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import bench as bench_mod
from .io import ParseError, load_dataset, load_queries, write_imputed, write_plot_csv, write_report
from .layers import evaluate_layers
from .model import GradsurfError, ValidationError, validate_query

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_VALIDATION = 2


@dataclass(frozen=True)
class RunConfig:
    """Resolved invocation options shared by all subcommands."""

    command: str
    method: str = "smooth"
    combinations: int = 1
    d: float = 1.0
    tolerance: float = 1e-9
    max_iter: int = 20
    seed: int = 0
    workers: int = 1
    data: Optional[str] = None
    queries: Optional[str] = None
    output: Optional[str] = None
    scale: str = "small"
    table: Optional[str] = None
    plot_csv: Optional[str] = None
    at: Optional[str] = None


def _add_method_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=("gradient", "smooth"), default="smooth")
    p.add_argument("--combinations", type=int, default=1,
                   help="simplexes averaged per query (gradient method)")
    p.add_argument("--d-exponent", dest="d", type=float, default=1.0,
                   help="shape exponent of the approximating arc")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradsurf",
        description="Local-area estimation of outcomes at query points "
        "in N-dimensional space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate a single query point")
    p_eval.add_argument("--data", required=True, help="training CSV (+ optional mesh sidecar)")
    p_eval.add_argument("--at", required=True,
                        help="comma-separated query coordinates, e.g. 1.0,2.5,0.3")
    _add_method_flags(p_eval)

    p_imp = sub.add_parser("impute", help="fill outcomes for a query file")
    p_imp.add_argument("--data", required=True)
    p_imp.add_argument("--queries", required=True, help="query CSV with header x1..xn")
    p_imp.add_argument("--output", required=True)
    _add_method_flags(p_imp)

    p_bench = sub.add_parser("bench", help="run a benchmark table at desk scale")
    p_bench.add_argument("--table", required=True,
                         choices=("T1", "T2", "T3", "T4", "averaging"))
    p_bench.add_argument("--scale", choices=("small", "medium", "large"),
                         default="small")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--workers", type=int, default=1)
    p_bench.add_argument("--output", required=True, help="JSON Lines report path")
    p_bench.add_argument("--plot-csv", dest="plot_csv", default=None,
                         help="also write a plot-ready CSV")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {f for f in RunConfig.__dataclass_fields__}
    return RunConfig(**{k: v for k, v in vars(args).items() if k in fields})


def _method_kwargs(cfg: RunConfig) -> dict:
    if cfg.method == "gradient":
        return {"combinations": cfg.combinations}
    return {"d": cfg.d, "tol": cfg.tolerance, "max_iter": cfg.max_iter}


def _impute_one(training, mesh, cfg: RunConfig, coords) -> dict:
    row = {"coords": list(coords), "method": cfg.method, "y_hat": None,
           "status": "ok", "flags": ""}
    try:
        query = validate_query(coords, training.n)
        result = evaluate_layers(
            training, query, mesh=mesh, method=cfg.method, **_method_kwargs(cfg)
        )
        row["y_hat"] = list(result.y_hat)
        flags = set()
        for comp in result.components:
            flags.update(comp.flags)
            if comp.extrapolated:
                flags.add("extrapolated")
        row["flags"] = ";".join(sorted(flags))
    except GradsurfError as exc:
        row["status"] = f"error: {exc}"
    return row


def _impute_chunk(payload) -> list:
    training, mesh, cfg, chunk = payload
    return [_impute_one(training, mesh, cfg, c) for c in chunk]


def impute_rows(training, mesh, cfg: RunConfig, queries: np.ndarray) -> list:
    """One output row per query, in input order, fanned out across workers."""
    if cfg.workers <= 1 or len(queries) < 2 * cfg.workers:
        return _impute_chunk((training, mesh, cfg, queries))
    chunks = np.array_split(queries, cfg.workers)
    payloads = [(training, mesh, cfg, c) for c in chunks if len(c)]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        parts = list(pool.map(_impute_chunk, payloads))
    return [row for part in parts for row in part]


def cmd_eval(cfg: RunConfig) -> int:
    training, mesh = load_dataset(cfg.data)
    try:
        coords = [float(t) for t in cfg.at.split(",")]
    except ValueError as exc:
        raise ValidationError(f"bad --at coordinates: {exc}") from exc
    query = validate_query(coords, training.n)
    result = evaluate_layers(
        training, query, mesh=mesh, method=cfg.method, **_method_kwargs(cfg)
    )
    values = " ".join(repr(v) for v in result.y_hat)
    print(values)
    return EXIT_OK


def cmd_impute(cfg: RunConfig) -> int:
    training, mesh = load_dataset(cfg.data)
    queries = load_queries(cfg.queries)
    if queries.shape[1] != training.n:
        raise ValidationError(
            f"queries have {queries.shape[1]} coordinates, dataset has {training.n}"
        )
    rows = impute_rows(training, mesh, cfg, queries)
    write_imputed(cfg.output, rows)
    failed = sum(1 for r in rows if r["status"] != "ok")
    if failed:
        print(f"{failed} of {len(rows)} queries failed; see status column",
              file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_bench(cfg: RunConfig) -> int:
    report = bench_mod.run_benchmark(
        cfg.table, scale=cfg.scale, seed=cfg.seed, workers=cfg.workers
    )
    write_report(cfg.output, report)
    if cfg.plot_csv:
        write_plot_csv(cfg.plot_csv, report)
    return EXIT_OK


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = config_from_args(args)
    try:
        if cfg.command == "eval":
            return cmd_eval(cfg)
        if cfg.command == "impute":
            return cmd_impute(cfg)
        return cmd_bench(cfg)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (GradsurfError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
