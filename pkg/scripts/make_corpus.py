"""Write a synthetic instance corpus (CSV files plus manifest.json) for ``egi synth``.

Usage: python3 scripts/make_corpus.py sine corpus/sine [--seed 0]
"""

from __future__ import annotations

import argparse

from egi.evaluation import write_corpus
from egi.synthetic import sine_corpus, square_corpus

FAMILIES = {"sine": sine_corpus, "square": square_corpus}


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("family", choices=sorted(FAMILIES))
    p.add_argument("out")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    corpus = FAMILIES[args.family](seed=args.seed)
    write_corpus(corpus, args.out)
    print(f"wrote {sum(map(len, corpus.values()))} instances to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
