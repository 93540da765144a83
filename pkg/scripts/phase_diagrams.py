"""Optimal-frequency phase diagrams for 0-, 1- and 2-stage chains.

Writes one CSV per stage count (same columns as ``transduce phase-diagram``)
and prints the fraction of the grid occupied by each region.

    python scripts/phase_diagrams.py --out-dir results/phase --n 50
"""

import argparse
import collections
import csv
import time
from pathlib import Path

from transduce.phase import AXES, DEFAULT_C23, MODE_NAMES, grid_axis, phase_diagram


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="results/phase")
    ap.add_argument("--n", type=int, default=50, help="grid points per axis")
    ap.add_argument("--c-min", type=float, default=0.05)
    ap.add_argument("--c-max", type=float, default=50.0)
    ap.add_argument("--c23", type=float, default=DEFAULT_C23)
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    coops = grid_axis(args.c_min, args.c_max, args.n, log=True)
    for n in (0, 1, 2):
        ys = grid_axis(0.1, 10.0, args.n, log=True) if n == 0 else coops
        start = time.perf_counter()
        cells = phase_diagram(n, coops, ys, c_23=args.c23)
        elapsed = time.perf_counter() - start
        path = out / f"phase_{n}stage.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", *AXES[n], "label", "eta_max"] + [f"nu_{m}" for m in MODE_NAMES[n]])
            for c in cells:
                w.writerow([c.index, repr(c.x), repr(c.y), c.label, repr(c.eta_max), *map(repr, c.nu)])
        counts = collections.Counter(c.label for c in cells)
        share = ", ".join(f"{k} {v / len(cells):.0%}" for k, v in sorted(counts.items()))
        print(f"{n} stages: {len(cells)} cells in {elapsed:.2f} s -> {path}  [{share}]")


if __name__ == "__main__":
    main()
