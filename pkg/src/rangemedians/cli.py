"""Command-line harness: answer query files, report comparison counts, sweep grids.

Dataset files hold one decimal value per line (the line number minus one is
the element's index). Query files hold one "l r" pair per line, 1-based
inclusive. Run output is one row per query plus a trailer row carrying the
build and total comparison counts; sweeps emit one row per (n, k, mode,
seed) cell with the normalized comparison ratio.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass

from .core import ComparisonLedger, Dataset, Element
from .oracle import Workload, generate, oracle_median
from .range_tree import (
    OnlineEngine,
    QueryInterval,
    build,
    decompose,
    query_offline,
    query_online,
    query_online_known_k,
    query_slow,
)

MODES = ("offline", "online-known-k", "online", "slow", "oracle")

RUN_HEADER = ["query_index", "l", "r", "median_value", "median_original_index", "comparisons"]
SWEEP_HEADER = ["n", "k", "mode", "seed", "total_comparisons", "ratio"]


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    mode: str
    data_path: str | None = None
    query_path: str | None = None
    gen_n: int | None = None
    gen_k: int | None = None
    gen_seed: int = 0
    hierarchical: bool = False
    u_override: int | None = None
    out_path: str | None = None
    fmt: str = "csv"


def _load_dataset(path: str) -> Dataset:
    try:
        with open(path, "r", encoding="ascii") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise CliError(f"cannot read dataset file {path}: {e.strerror}")
    values = []
    for ln, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        try:
            v = float(text)
        except ValueError:
            raise CliError(f"{path} line {ln}: not a number: {text!r}")
        if not math.isfinite(v):
            raise CliError(f"{path} line {ln}: non-finite value {text!r}")
        values.append(v)
    if not values:
        raise CliError(f"{path}: dataset is empty")
    return Dataset.from_values(values)


def _load_queries(path: str, n: int) -> list[QueryInterval]:
    try:
        with open(path, "r", encoding="ascii") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise CliError(f"cannot read query file {path}: {e.strerror}")
    queries = []
    for ln, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 2:
            raise CliError(f"{path} line {ln}: expected 'l r', got {text!r}")
        try:
            lo, hi = int(parts[0]), int(parts[1])
        except ValueError:
            raise CliError(f"{path} line {ln}: expected integers, got {text!r}")
        if lo < 1 or lo > hi or hi > n:
            raise CliError(f"{path} line {ln}: invalid interval [{lo}, {hi}] for n={n}")
        queries.append(QueryInterval(lo, hi))
    return queries


def _execute(
    mode: str, dataset: Dataset, queries: list[QueryInterval], u_override: int | None
) -> tuple[list[Element], list[int], int]:
    """Answers, per-query comparison counts, and build comparison count."""
    n = len(dataset)
    k = len(queries)
    if mode == "oracle":
        return [oracle_median(dataset, q) for q in queries], [0] * k, 0

    if mode == "offline":
        u = u_override if u_override is not None else min(max(k, 1) ** 2, n)
        u = min(max(u, 1), n)
        build_ledger = ComparisonLedger()
        tree = build(dataset, decompose(n, queries), u, build_ledger)
        answers, counts = [], []
        for q in queries:
            ql = ComparisonLedger()
            answers.append(query_offline(tree, q, ql))
            counts.append(ql.count)
        return answers, counts, build_ledger.count

    if mode == "online-known-k":
        engine = OnlineEngine(dataset, k=max(k, 1), u_override=u_override)
        answers, counts = [], []
        for q in queries:
            ql = ComparisonLedger()
            answers.append(query_online_known_k(engine, q, ql))
            counts.append(ql.count)
        return answers, counts, engine.build_ledger.count

    if mode == "online":
        engine = OnlineEngine(dataset)
        answers, counts = [], []
        for q in queries:
            ql = ComparisonLedger()
            answers.append(query_online(engine, q, ql))
            counts.append(ql.count)
        return answers, counts, engine.build_ledger.count

    if mode == "slow":
        ledger = ComparisonLedger()
        per_query: list[int] = []
        answers = query_slow(dataset, queries, ledger, per_query_counts=per_query)
        return answers, per_query, ledger.count - sum(per_query)

    raise CliError(f"unknown mode {mode!r}")


def run(config: RunConfig) -> int:
    """Answer every query in order and write the report. Returns exit status."""
    try:
        if config.data_path is not None:
            dataset = _load_dataset(config.data_path)
            queries = _load_queries(config.query_path, len(dataset))
        else:
            dataset, queries = generate(
                Workload(
                    n=config.gen_n,
                    k=config.gen_k,
                    seed=config.gen_seed,
                    hierarchical=config.hierarchical,
                )
            )
        if config.u_override is not None and config.mode == "online":
            raise CliError("--u does not apply to mode 'online' (u follows the guess)")
        answers, counts, build_count = _execute(
            config.mode, dataset, queries, config.u_override
        )
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    total = build_count + sum(counts)
    rows = [
        [i + 1, q.lo, q.hi, repr(ans.value), ans.index, cnt]
        for i, (q, ans, cnt) in enumerate(zip(queries, answers, counts))
    ]
    _emit(config, rows, build_count, total)
    return 0


def _emit(config: RunConfig, rows, build_count: int, total: int) -> None:
    def write(f):
        if config.fmt == "csv":
            w = csv.writer(f, lineterminator="\n")
            w.writerow(RUN_HEADER)
            w.writerows(rows)
            w.writerow(["trailer", build_count, total])
        else:
            for r in rows:
                f.write(
                    f"query {r[0]}: [{r[1]}, {r[2]}] median={r[3]} "
                    f"(original index {r[4]}), comparisons={r[5]}\n"
                )
            f.write(f"build comparisons: {build_count}\n")
            f.write(f"total comparisons: {total}\n")

    if config.out_path:
        with open(config.out_path, "w", encoding="ascii", newline="") as f:
            write(f)
    else:
        write(sys.stdout)


def normalized_ratio(total: int, n: int, k: int) -> float:
    """Comparisons over the n*log2(k+2) + k*log2(k+2)*log2(n) yardstick."""
    lk = math.log2(k + 2)
    return total / (n * lk + k * lk * math.log2(max(n, 2)))


def sweep(
    ns: list[int],
    ks: list[int],
    modes: list[str],
    seeds: list[int],
    out_path: str | None = None,
    fmt: str = "csv",
) -> int:
    """Comparison totals over a (n, k, mode, seed) grid, as CSV rows."""
    rows = []
    for n in ns:
        for k in ks:
            for mode in modes:
                for seed in seeds:
                    dataset, queries = generate(Workload(n=n, k=k, seed=seed))
                    try:
                        _, counts, build_count = _execute(mode, dataset, queries, None)
                    except CliError as e:
                        print(f"error: {e}", file=sys.stderr)
                        return 2
                    total = build_count + sum(counts)
                    rows.append(
                        [n, k, mode, seed, total, f"{normalized_ratio(total, n, k):.6f}"]
                    )

    def write(f):
        if fmt == "csv":
            w = csv.writer(f, lineterminator="\n")
            w.writerow(SWEEP_HEADER)
            w.writerows(rows)
        else:
            for r in rows:
                f.write(
                    f"n={r[0]} k={r[1]} mode={r[2]} seed={r[3]} "
                    f"comparisons={r[4]} ratio={r[5]}\n"
                )

    if out_path:
        with open(out_path, "w", encoding="ascii", newline="") as f:
            write(f)
    else:
        write(sys.stdout)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="range-medians",
        description="Range-median queries with exact comparison counting.",
    )
    p.add_argument("--mode", default="offline", help="|".join(MODES) + " (comma-list for sweeps)")
    p.add_argument("--data", help="dataset file: one value per line")
    p.add_argument("--queries", help="query file: one 'l r' pair per line")
    p.add_argument("--gen-n", type=int, help="generate a dataset of this length")
    p.add_argument("--gen-k", type=int, help="generate this many queries")
    p.add_argument("--gen-seed", type=int, default=0, help="generator seed")
    p.add_argument("--hierarchical", action="store_true", help="nested-or-disjoint queries")
    p.add_argument("--u", type=int, dest="u_override", help="override the relaxation parameter")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "human"), default="csv")
    p.add_argument(
        "--sweep-grid",
        help="run a sweep instead: 'n1,n2,..xk1,k2,..' (e.g. 4096,16384x16,256)",
    )
    p.add_argument("--sweep-seeds", type=int, default=3, help="seeds per sweep cell")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    if args.sweep_grid:
        try:
            ns_part, ks_part = args.sweep_grid.split("x")
            ns = [int(s) for s in ns_part.split(",") if s]
            ks = [int(s) for s in ks_part.split(",") if s]
            if not ns or not ks:
                raise ValueError
        except ValueError:
            print("error: --sweep-grid expects 'n1,n2,..xk1,k2,..'", file=sys.stderr)
            return 2
        modes = [m.strip() for m in args.mode.split(",") if m.strip()]
        for m in modes:
            if m not in MODES:
                print(f"error: unknown mode {m!r}", file=sys.stderr)
                return 2
        seeds = list(range(args.sweep_seeds))
        return sweep(ns, ks, modes, seeds, args.out, args.format)

    if args.mode not in MODES:
        print(f"error: unknown mode {args.mode!r}", file=sys.stderr)
        return 2
    have_files = args.data is not None or args.queries is not None
    have_gen = args.gen_n is not None or args.gen_k is not None
    if have_files == have_gen:
        print("error: provide either --data with --queries, or --gen-n with --gen-k", file=sys.stderr)
        return 2
    if have_files and (args.data is None or args.queries is None):
        print("error: --data and --queries go together", file=sys.stderr)
        return 2
    if have_gen and (args.gen_n is None or args.gen_k is None):
        print("error: --gen-n and --gen-k go together", file=sys.stderr)
        return 2

    config = RunConfig(
        mode=args.mode,
        data_path=args.data,
        query_path=args.queries,
        gen_n=args.gen_n,
        gen_k=args.gen_k,
        gen_seed=args.gen_seed,
        hierarchical=args.hierarchical,
        u_override=args.u_override,
        out_path=args.out,
        fmt=args.format,
    )
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
