#!/usr/bin/env python3
"""Compare the restricted strategies with the collective bound across block sizes.

    python scripts/strategy_comparison.py --m-max 4 [--v 0.1 --alpha 0.785]
"""
import argparse
import math

from qsdbounds.bounds import helstrom_general
from qsdbounds.states import Example2Params, build_example2
from qsdbounds.strategies import locc_adaptive, optimize_first_local, strategy_helstrom_then_local
from qsdbounds.tables import Table


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--v", type=float, default=0.1)
    ap.add_argument("--alpha", type=float, default=math.pi / 4)
    ap.add_argument("--m-max", type=int, default=4)
    ap.add_argument("--out", help="optional CSV path")
    args = ap.parse_args()

    pair = build_example2(Example2Params(args.v, args.alpha))
    t = Table(["M", "P_H", "first_local", "helstrom_then_local", "LOCC"])
    t.comments.append(f"v={args.v} alpha={args.alpha} q=0.5")
    for m in range(2, args.m_max + 1):
        _, first = optimize_first_local(pair, m)
        t.add(m, helstrom_general(pair, m), first.error_probability,
              strategy_helstrom_then_local(pair, m).error_probability, locc_adaptive(pair, m).error_probability)
    print(t.to_text())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(t.to_csv())


if __name__ == "__main__":
    main()
