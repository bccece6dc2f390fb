"""Large-sample behaviour of the joint and single decision rules.

For p = 5 and s = 2 the script tabulates, across sample sizes, how often each
rule accepts the true hypotheses (H01, H02) and rejects the false ones
(H11, H12). With the sequential tests at levels nu and eta the acceptance
rate of a true ``contains`` hypothesis should approach (1 - nu)(1 - eta)
under the joint rule and 1 - eta under the single rule.
"""

from __future__ import annotations

import argparse

from cotrend.critical_values import default_table
from cotrend.dgp import ALL_METHODS, MC_HYPOTHESES, run_mc
from cotrend.hypotheses import Rule


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=int, nargs="+", default=[250, 500, 1000, 2000])
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--level", type=float, default=0.025, help="nu = eta")
    ap.add_argument("--seed", type=int, default=8)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)

    table = default_table()
    for rule in Rule:
        rep = run_mc(5, args.T, [2], reps=args.reps, seed=args.seed, methods=ALL_METHODS,
                     hypotheses=tuple(MC_HYPOTHESES), nu=args.level, eta=args.level,
                     rule=rule, cvs=table, workers=args.workers)
        print(f"\n{rule.value} rule, acceptance frequency (1 - rejection)")
        print(f"{'hyp':>4} {'T':>5} " + " ".join(f"{m.value:>10}" for m in ALL_METHODS))
        for h in MC_HYPOTHESES:
            for T in args.T:
                cells = " ".join(
                    f"{1 - rep.rejection[(h, T, 2, m.value)]:>10.3f}" for m in ALL_METHODS
                )
                print(f"{h:>4} {T:>5} {cells}")


if __name__ == "__main__":
    main()
