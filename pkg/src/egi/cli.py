"""Command-line front end: ``egi detect | synth | eval | bench``.

Exit codes: 0 success, 1 detection failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import secrets
import sys
import time
from pathlib import Path

import numpy as np

from . import baselines
from .density import rank_anomalies, write_curve_csv
from .ensemble import EnsembleConfig, ensemble_curve, grammar_density_curve
from .errors import InputTooShortError, NonFiniteValueError
from .evaluation import (evaluate, gt_from_dict, gt_to_dict, load_corpus, make_methods,
                         split_classes, synth_from_corpus)
from .fileio import atomic_open, write_json
from .series import build_series, read_series_csv
from .synthetic import random_walk

METHODS = ("ensemble", "gi-fix", "gi-random", "gi-select", "discord")


class UsageError(Exception):
    """Bad arguments or unreadable input (exit status 2)."""


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(63)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def _write_manifest(path: Path, command: str, params: dict, inputs: list, outputs: list,
                    started: float) -> None:
    write_json(path, {
        "command": command,
        "parameters": params,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "duration_seconds": round(time.perf_counter() - started, 6),
    })


def _load_input(args) -> np.ndarray:
    path = Path(args.input)
    if not path.is_file():
        raise UsageError(f"input file not found: {path}")
    try:
        values = read_series_csv(path, args.column)
        return build_series(values)
    except NonFiniteValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc
    except (ValueError, OSError) as exc:
        raise UsageError(str(exc)) from exc


# detect -------------------------------------------------------------------

def cmd_detect(args) -> int:
    started = time.perf_counter()
    series = _load_input(args)
    n, k = args.n, args.topk
    if n < 2 or k < 1:
        raise UsageError("--n must be >= 2 and --topk >= 1")
    if len(series) < n:
        raise UsageError(f"series of length {len(series)} shorter than window {n}")
    seed = _seed(args)
    edge = not args.no_edge_correction
    params: dict = {"method": args.method, "n": n, "topk": k, "seed": seed}
    curve = None
    try:
        if args.method == "ensemble":
            try:
                config = EnsembleConfig(n, args.ensemble_size, args.wmax, args.amax, args.tau, seed)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            params.update(config.to_dict())
            curve = ensemble_curve(series, config)
            cands = rank_anomalies(curve, n, k, edge)
        elif args.method == "discord":
            if len(series) < 2 * n:
                raise UsageError(f"discord search needs at least {2 * n} points")
            cands = baselines.detect_discord(series, n, k)
        else:
            if args.method == "gi-fix":
                w, a = args.w or baselines.GI_FIX_PARAMS[0], args.a or baselines.GI_FIX_PARAMS[1]
            elif args.method == "gi-random":
                w, a = baselines.random_params(min(args.wmax, n), args.amax, seed)
            else:
                w, a = baselines.select_params(series, n, min(args.wmax, n), args.amax)
            if not (2 <= w <= n and 2 <= a <= 26):
                raise UsageError(f"invalid (w, a) = ({w}, {a}) for n = {n}")
            params.update({"w": w, "a": a})
            curve = grammar_density_curve(series, n, w, a)
            cands = rank_anomalies(curve, n, k, edge)
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    key = "distance" if args.method == "discord" else "density"
    rows = [{"rank": c.rank, "start": c.start, "length": c.length, key: c.score} for c in cands]
    print(f"{'rank':>4}  {'start':>8}  {'length':>6}  {key:>10}")
    for r in rows:
        print(f"{r['rank']:>4}  {r['start']:>8}  {r['length']:>6}  {_fmt(r[key]):>10}")

    out = Path(args.output or f"{Path(args.input).stem}_detect.json")
    outputs = [out]
    result = {"config": params, "input": str(args.input), "candidates": rows, "curve_path": None}
    if args.curve_out and curve is not None:
        write_curve_csv(curve, args.curve_out)
        result["curve_path"] = str(args.curve_out)
        outputs.append(Path(args.curve_out))
    write_json(out, result)
    _write_manifest(out.with_suffix(".manifest.json"), "detect", params, [args.input], outputs, started)
    return 0


# synth --------------------------------------------------------------------

def cmd_synth(args) -> int:
    started = time.perf_counter()
    if not args.corpus:
        raise UsageError("--corpus is required")
    try:
        corpus = load_corpus(args.corpus)
        split_classes(corpus)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"bad corpus: {exc}") from exc
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    seed = _seed(args)
    try:
        cases = synth_from_corpus(corpus, args.count, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    outdir = Path(args.output or "synth")
    outdir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for i, (series, gt) in enumerate(cases):
        stem = outdir / f"series_{i:03d}"
        with atomic_open(stem.with_suffix(".csv")) as fh:
            fh.writelines(f"{_fmt(v)}\n" for v in series.values)
        write_json(stem.with_suffix(".gt.json"), {**gt_to_dict(gt), "index": i})
        outputs += [stem.with_suffix(".csv"), stem.with_suffix(".gt.json")]
    params = {"corpus": str(args.corpus), "count": args.count, "seed": seed}
    _write_manifest(outdir / "manifest.json", "synth", params, [args.corpus], outputs, started)
    print(f"wrote {len(cases)} series to {outdir}")
    return 0


# eval ---------------------------------------------------------------------

def _load_cases(directory: Path):
    cases = []
    for csv_path in sorted(directory.glob("series_*.csv")):
        gt_path = csv_path.with_suffix(".gt.json")
        if not gt_path.exists():
            raise UsageError(f"missing ground truth for {csv_path.name}")
        with open(gt_path) as fh:
            gt = gt_from_dict(json.load(fh))
        cases.append((build_series(read_series_csv(csv_path)), gt))
    return cases


def cmd_eval(args) -> int:
    started = time.perf_counter()
    methods = [m.strip() for m in (args.method or ",".join(METHODS)).split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise UsageError(f"unknown method(s): {', '.join(unknown)}")
    directory = Path(args.input or "synth")
    if not directory.is_dir():
        raise UsageError(f"not a directory: {directory}")
    try:
        cases = _load_cases(directory)
    except (ValueError, KeyError, OSError) as exc:
        raise UsageError(str(exc)) from exc
    if not cases:
        raise UsageError(f"no series_*.csv files in {directory}")
    seed = _seed(args)
    config = EnsembleConfig(10, args.ensemble_size, args.wmax, args.amax, args.tau, seed)
    report = evaluate(cases, methods, k=args.topk, seed=seed, n=args.n, config=config)

    outdir = Path(args.output or "eval")
    summary = report.summary()
    summary["parameters"] = {"methods": methods, "topk": args.topk, "seed": seed, "n": args.n,
                             **{k: v for k, v in config.to_dict().items() if k != "n"}}
    paths = {
        "score": outdir / "scores.csv",
        "wtl": outdir / "wins_ties_losses.csv",
        "per_series": outdir / "per_series.csv",
        "json": outdir / "report.json",
    }
    with atomic_open(paths["score"], newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "mean_score", "hit_rate"])
        for row in summary["summary"]:
            w.writerow([row["method"], _fmt(row["mean_score"]), _fmt(row["hit_rate"])])
    with atomic_open(paths["wtl"], newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["baseline", "wins", "ties", "losses"])
        for row in summary.get("wins_ties_losses", []):
            w.writerow([row["baseline"], row["wins"], row["ties"], row["losses"]])
    with atomic_open(paths["per_series"], newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["series", *methods])
        for i in range(len(cases)):
            w.writerow([i, *(_fmt(report.scores[m][i]) for m in methods)])
    write_json(paths["json"], summary)
    _write_manifest(outdir / "manifest.json", "eval", summary["parameters"], [directory],
                    list(paths.values()), started)

    print(f"{'method':<10}  {'score':>7}  {'hitrate':>7}")
    for row in summary["summary"]:
        print(f"{row['method']:<10}  {row['mean_score']:>7.4f}  {row['hit_rate']:>7.3f}")
    for row in summary.get("wins_ties_losses", []):
        print(f"ensemble vs {row['baseline']}: {row['wins']}/{row['ties']}/{row['losses']}")
    return 0


# bench --------------------------------------------------------------------

def bench_times(lengths, n: int, seed: int, methods=("ensemble", "discord"), repeats: int = 1,
                config: EnsembleConfig | None = None) -> list[tuple[int, str, float]]:
    """Best-of-``repeats`` wall-clock seconds per (length, method) on a random walk."""
    detectors = make_methods(config)
    rows = []
    for length in lengths:
        series = build_series(random_walk(length, seed))
        for m in methods:
            best = np.inf
            for _ in range(repeats):
                t0 = time.perf_counter()
                detectors[m](series, n, 3, seed)
                best = min(best, time.perf_counter() - t0)
            rows.append((length, m, best))
    return rows


def cmd_bench(args) -> int:
    started = time.perf_counter()
    try:
        lengths = [int(x) for x in args.lengths.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad --lengths: {args.lengths}") from exc
    methods = [m.strip() for m in (args.method or "ensemble,discord").split(",")]
    if any(m not in METHODS for m in methods):
        raise UsageError(f"unknown method in {methods}")
    if min(lengths) < 2 * args.n:
        raise UsageError("every length must be at least 2n")
    seed = _seed(args)
    config = EnsembleConfig(args.n, args.ensemble_size, args.wmax, args.amax, args.tau, seed)
    rows = bench_times(lengths, args.n, seed, methods, args.repeats, config)
    out = Path(args.output or "bench.csv")
    with atomic_open(out, newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["length", "method", "seconds"])
        for length, m, sec in rows:
            w.writerow([length, m, _fmt(sec)])
    for length, m, sec in rows:
        print(f"{length:>8}  {m:<10}  {sec:8.3f}s")
    params = {"lengths": lengths, "n": args.n, "methods": methods, "seed": seed, "repeats": args.repeats}
    _write_manifest(out.with_suffix(".manifest.json"), "bench", params, [], [out], started)
    return 0


# parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="RNG seed (random and printed if omitted)")
    common.add_argument("--output", help="output file or directory")
    common.add_argument("--topk", type=int, default=3, help="candidates per series")
    common.add_argument("--wmax", type=int, default=10, help="maximum PAA size")
    common.add_argument("--amax", type=int, default=10, help="maximum alphabet size")
    common.add_argument("--ensemble-size", type=int, default=50, help="ensemble members N")
    common.add_argument("--tau", type=float, default=0.4, help="fraction of members kept")

    parser = argparse.ArgumentParser(prog="egi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", parents=[common], help="detect anomalies in one series")
    p.add_argument("--input", required=True, help="CSV, one value per line")
    p.add_argument("--column", help="column name or index for multi-column CSV")
    p.add_argument("--n", type=int, required=True, help="sliding window length")
    p.add_argument("--method", choices=METHODS, default="ensemble")
    p.add_argument("--w", type=int, help="PAA size for gi-fix (default 4)")
    p.add_argument("--a", type=int, help="alphabet size for gi-fix (default 4)")
    p.add_argument("--curve-out", help="write the density curve as index,value CSV")
    p.add_argument("--no-edge-correction", action="store_true",
                   help="rank minima on the raw curve near the series ends")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("synth", parents=[common], help="plant anomalies into normal instances")
    p.add_argument("--corpus", help="corpus directory with manifest.json")
    p.add_argument("--count", type=int, default=25)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", parents=[common], help="compare methods on synthesized series")
    p.add_argument("--input", help="directory written by 'synth'")
    p.add_argument("--method", help=f"comma list from {','.join(METHODS)} (default all)")
    p.add_argument("--n", type=int, help="window length (default: anomaly length)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", parents=[common], help="time ensemble vs discord on random walks")
    p.add_argument("--lengths", default="10000,20000,40000")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--method", help="comma list (default ensemble,discord)")
    p.add_argument("--repeats", type=int, default=1)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InputTooShortError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # detection failure
        print(f"detection failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
