"""Wall-clock runtime of the ensemble and the exact discord search on random walks.

Usage: python3 scripts/run_benchmark.py [--lengths 10000,20000,40000] [--n 100]
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

from egi.cli import bench_times


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--lengths", default="10000,20000,40000")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--methods", default="ensemble,discord")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="results/benchmark.csv")
    args = p.parse_args(argv)

    lengths = [int(x) for x in args.lengths.split(",")]
    methods = tuple(m.strip() for m in args.methods.split(","))
    rows = bench_times(lengths, args.n, args.seed, methods=methods, repeats=args.repeats)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["length", "method", "seconds"])
        w.writerows((length, m, f"{sec:.4f}") for length, m, sec in rows)
    for m in methods:
        secs = [sec for _, name, sec in rows if name == m]
        print(f"{m:<9} " + "  ".join(f"{length}:{sec:.3f}s" for length, sec in zip(lengths, secs)))
        ratios = [b / a for a, b in zip(secs, secs[1:])]
        if ratios:
            print(f"{m:<9} growth per step: {', '.join(f'{r:.2f}' for r in ratios)}")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
