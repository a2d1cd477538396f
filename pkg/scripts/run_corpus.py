#!/usr/bin/env python3
"""Analyze every bundled system and print a result table.

Usage: python scripts/run_corpus.py [--depth N] [--values LO..HI]
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from lctrs.analysis import AnalysisConfig, analyze, ccps, cpcps
from lctrs.logic import ConstraintSolver
from lctrs.parser import parse
from lctrs.rewriting import RewriteConfig

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--values", default="-4..4")
    args = ap.parse_args()
    lo, hi = (int(p) for p in args.values.split(".."))

    rows = []
    for path in sorted(CORPUS.glob("*.lctrs")):
        system = parse(path.read_text())
        solver = ConstraintSolver()
        config = AnalysisConfig(depth=args.depth, rewrite=RewriteConfig(lo=lo, hi=hi))
        t0 = time.time()
        verdict = analyze(system, solver, config)
        elapsed = time.time() - t0
        rows.append(
            (
                path.stem,
                verdict.result,
                verdict.criterion or "-",
                len(ccps(system, solver)),
                len(cpcps(system, solver)),
                f"{elapsed:.2f}s",
            )
        )

    widths = [max(len(str(r[i])) for r in rows + [_HEADER]) for i in range(len(_HEADER))]
    for row in [_HEADER] + rows:
        print("  ".join(str(c).ljust(w) for c, w in zip(row, widths)))
    return 0


_HEADER = ("system", "verdict", "criterion", "ccps", "cpcps", "time")

if __name__ == "__main__":
    sys.exit(main())
