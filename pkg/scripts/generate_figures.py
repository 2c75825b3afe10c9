#!/usr/bin/env python3
"""Write the data series for every supported figure as CSV files.

    python scripts/generate_figures.py --outdir results/figures [--only 2,4,7] [--quick]

``--quick`` shrinks the expensive series (optimiser hops, angle grid, copy caps)
for a smoke run; the default settings reproduce the full series.
"""
import argparse
import time
from pathlib import Path

from qsdbounds import __version__
from qsdbounds.figures import SUPPORTED, FigureOptions, figure_table

QUICK = FigureOptions(n_total_cap=1000, phi_points=13, hops=5, max_iters_per_hop=200)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--outdir", type=Path, default=Path("results/figures"))
    ap.add_argument("--only", type=lambda s: [int(x) for x in s.split(",")], default=list(SUPPORTED))
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    opts = QUICK if args.quick else FigureOptions()
    for n in args.only:
        t0 = time.perf_counter()
        table = figure_table(n, opts)
        table.comments.insert(0, f"qsdbounds {__version__}, figure {n}")
        path = args.outdir / f"figure{n}.csv"
        path.write_text(table.to_csv())
        print(f"figure {n}: {len(table.rows)} rows -> {path} ({time.perf_counter() - t0:.1f} s)")


if __name__ == "__main__":
    main()
