"""Regenerate the critical value table shipped in src/cotrend/data/."""

import argparse
import time
from pathlib import Path

from cotrend.critical_values import DEFAULT_SEED, NormKind, build_table
from cotrend.limitdist import DEFAULT_GRID, DEFAULT_REPS

OUT = Path(__file__).resolve().parents[1] / "src" / "cotrend" / "data" / "critical_values.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-dim", type=int, default=20)
    ap.add_argument("--levels", type=float, nargs="+", default=[0.90, 0.95, 0.975, 0.99])
    ap.add_argument("--reps", type=int, default=DEFAULT_REPS)
    ap.add_argument("--grid", type=int, default=DEFAULT_GRID)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()

    t0 = time.perf_counter()
    table = build_table(
        range(1, args.max_dim + 1),
        (NormKind.ONE, NormKind.INF),
        args.levels,
        grid=args.grid,
        reps=args.reps,
        seed=args.seed,
        workers=args.workers,
    )
    table.save(args.out)
    print(f"wrote {len(table.entries)} entries to {args.out} in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
