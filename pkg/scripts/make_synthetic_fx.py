"""Write a synthetic 20-currency daily panel with a planted attractor space.

The first six columns (a European block) are driven by five random walks and
one white-noise factor, so they carry exactly one cointegrating relation.
The remaining fourteen columns are independent random walks. The full system
therefore has 19 stochastic trends and the European block has 5.

Values are written as exchange-rate levels ``exp(scale * X)`` so that the
analysis path with ``--log --normalize-start`` recovers ``scale * (X_t - X_1)``.
"""

from __future__ import annotations

import argparse
import csv
from datetime import date, timedelta
from pathlib import Path

import numpy as np

EU = ["DEXUSEU", "DEXDNUS", "DEXNOUS", "DEXSDUS", "DEXSZUS", "DEXUSUK"]
NON_EU = [
    "DEXUSAL", "DEXBZUS", "DEXCAUS", "DEXCHUS", "DEXHKUS", "DEXINUS", "DEXJPUS",
    "DEXMAUS", "DEXMXUS", "DEXSIUS", "DEXSFUS", "DEXKOUS", "DEXTAUS", "DEXTHUS",
]


def business_days(start: date, n: int) -> list[date]:
    out, d = [], start
    while len(out) < n:
        if d.weekday() < 5:
            out.append(d)
        d += timedelta(days=1)
    return out


def synthetic_panel(T: int = 667, seed: int = 2021, scale: float = 0.006, rho: float = 0.0):
    """Return ``(X, mixing)`` where ``X`` is T x 20 in log units before scaling."""
    rng = np.random.default_rng(seed)
    walks = np.cumsum(rng.standard_normal((T, 19)), axis=0)
    u = np.empty(T)
    u[0] = rng.standard_normal()
    for t in range(1, T):
        u[t] = rho * u[t - 1] + rng.standard_normal()
    mixing = rng.standard_normal((6, 6)) + 2.0 * np.eye(6)
    eu = np.column_stack([walks[:, :5], u]) @ mixing.T
    X = np.column_stack([eu, walks[:, 5:]])
    return X, mixing


def write_fixture(path: Path, T: int = 667, seed: int = 2021, scale: float = 0.006) -> None:
    X, _ = synthetic_panel(T, seed, scale)
    levels = np.exp(scale * X) * np.linspace(0.5, 5.0, X.shape[1])
    days = business_days(date(2018, 1, 2), T)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["DATE", *EU, *NON_EU])
        for d, row in zip(days, levels):
            w.writerow([d.isoformat(), *(f"{v:.10g}" for v in row)])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parents[1] / "tests" / "data" / "synthetic_fx.csv")
    ap.add_argument("--T", type=int, default=667)
    ap.add_argument("--seed", type=int, default=2021)
    args = ap.parse_args(argv)
    write_fixture(args.out, args.T, args.seed)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
