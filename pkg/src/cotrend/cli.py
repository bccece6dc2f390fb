"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from cotrend import __version__
from cotrend.basis import BasisKind, default_K, design_matrix
from cotrend.cca import SeriesPanel, squared_canonical_correlations
from cotrend.critical_values import (
    CriticalValueTable,
    NormKind,
    build_table,
    default_cache_path,
    ensure_coverage,
    resolve_table,
)
from cotrend.dgp import ALL_METHODS, MC_HYPOTHESES, run_mc
from cotrend.errors import (
    CotrendError,
    DataError,
    DimensionError,
    DomainError,
    NumericalError,
    SingularMomentError,
)
from cotrend.hypotheses import (
    HypothesisKind,
    HypothesisSpec,
    Rule,
    build_aggregation_hypothesis,
    build_autonomy_hypothesis,
    build_balanced_growth_hypothesis,
    decide,
    subsystems,
)
from cotrend.io import file_digest, load_matrix, preprocess, read_panel
from cotrend.limitdist import (
    confidence_stripe,
    simulate_zeta,
    zeta1_cdf,
    zeta1_mean,
    zeta1_pdf,
    zeta1_quantile,
    zeta1_sf,
)
from cotrend.trends import Method, estimate_s, test_statistics

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(CotrendError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- helpers


def _parse_methods(text: str) -> list[Method]:
    try:
        return [Method(m.strip()) for m in text.split(",") if m.strip()]
    except ValueError as exc:
        raise UsageError(f"unknown method in {text!r}; choose from "
                         f"{', '.join(m.value for m in Method)}") from exc


def _parse_int_list(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _column_indices(panel: SeriesPanel, text: str) -> list[int]:
    """Comma-separated column labels or 1-based indices; ranges like 7-20 allowed."""
    out = []
    for part in (p.strip() for p in text.split(",")):
        if not part:
            continue
        if part in panel.labels:
            out.append(panel.labels.index(part) + 1)
            continue
        try:
            out.extend(_parse_int_list(part))
        except ValueError:
            raise UsageError(f"unknown column {part!r}") from None
    return out


def _load(args) -> tuple[SeriesPanel, dict]:
    panel = read_panel(args.input)
    if getattr(args, "columns", None):
        idx = _column_indices(panel, args.columns)
        if any(not 1 <= i <= panel.p for i in idx):
            raise UsageError(f"column index out of range 1..{panel.p}")
        panel = panel.select([i - 1 for i in idx])
    panel = preprocess(panel, log=args.log, normalize_start=args.normalize_start)
    flat = np.ptp(panel.values, axis=0) == 0
    if flat.any():
        # a constant series carries no stochastic information; refuse it
        # before the eigenvalue problem quietly absorbs it into the basis fit
        label = panel.labels[int(np.argmax(flat))]
        raise SingularMomentError("M_yy", math.inf, f"column {label!r} is constant")
    prov = {
        "input": str(args.input),
        "sha256": file_digest(args.input),
        "columns": list(panel.labels),
        "log": bool(args.log),
        "normalize_start": bool(args.normalize_start),
    }
    return panel, prov


def _table(args, p: int, norms, levels) -> tuple[CriticalValueTable, dict]:
    path = Path(args.cv_cache) if args.cv_cache else default_cache_path()
    table = resolve_table(path)
    source = str(path) if path is not None and path.exists() else "packaged"
    if ensure_coverage(table, range(1, p + 1), norms, levels):
        print(f"simulated missing critical values (dims up to {p})", file=sys.stderr)
        if path is not None:
            table.save(path)
            source = str(path)
    return table, {"source": source, **table.provenance}


def _resolve_K(args, T: int) -> int:
    K = args.K if args.K is not None else default_K(T)
    if K > T:
        raise DataError(f"K={K} exceeds the sample size T={T}")
    return K


def _emit(doc: dict, out):
    if out:
        Path(out).write_text(json.dumps(doc, indent=1) + "\n")


# ---------------------------------------------------------------- analyze


@dataclass
class AnalysisReport:
    eigenvalues: list[float]
    s_hat: dict[str, int]
    statistics: dict[str, list[float]]
    critical_values: dict[str, list[float]]
    stripe: dict | None
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def analyze(panel: SeriesPanel, *, K: int, methods, eta: float, table, stripe: bool = False,
            coverage: float = 0.95, stripe_reps: int = 10_000, stripe_grid: int = 1000,
            stripe_seed: int = 0) -> AnalysisReport:
    design = design_matrix(panel.T, K)
    lam = squared_canonical_correlations(panel, design).lambdas
    s_hat, crit = {}, {}
    for m in methods:
        est = estimate_s(lam, m, T=panel.T, K=K, eta=eta, cvs=table)
        s_hat[m.value] = est.s_hat
        if m.sequential:
            crit[m.value] = est.diagnostics["critical_values"]
    stats = {n.value: test_statistics(lam, K, n).tolist() for n in NormKind}
    band = None
    s0 = s_hat.get(Method.MAXGAP.value, next(iter(s_hat.values())))
    if stripe and s0 > 0:
        draws = simulate_zeta(s0, stripe_reps, stripe_grid, stripe_seed)
        st = confidence_stripe(s0, coverage, draws)
        log_stat = np.log(K * math.pi**2 * (1.0 - lam[:s0][::-1]))
        band = {
            "s": s0,
            "coverage": coverage,
            "pointwise": st.pointwise,
            "log_statistic": log_stat.tolist(),
            "lower": st.lower.tolist(),
            "upper": st.upper.tolist(),
            "mean": st.mean.tolist(),
            "inside": st.contains(log_stat).tolist(),
            "reps": stripe_reps,
            "grid": stripe_grid,
            "seed": stripe_seed,
        }
    return AnalysisReport(lam.tolist(), s_hat, stats, crit, band)


def _print_analysis(rep: AnalysisReport, out=None):
    out = out or sys.stdout
    prov = rep.provenance
    print(f"T={prov['T']}  p={prov['p']}  K={prov['K']}  basis={prov['basis']}", file=out)
    print(f"{'i':>3} {'lambda_i':>10} {'K pi^2 |tau|_inf':>17} {'K pi^2 |tau|_1':>15}", file=out)
    for i, lam in enumerate(rep.eigenvalues):
        print(f"{i + 1:>3} {lam:>10.5f} {rep.statistics['inf'][i]:>17.3f} "
              f"{rep.statistics['one'][i]:>15.3f}", file=out)
    print("estimated number of trends:", file=out)
    for m, s in rep.s_hat.items():
        print(f"  {m:<11} {s}", file=out)
    if rep.stripe:
        st = rep.stripe
        print(f"{st['coverage']:.0%} pointwise stripe for log(K pi^2 tau) at s={st['s']}:", file=out)
        for j in range(st["s"]):
            flag = "inside" if st["inside"][j] else "OUTSIDE"
            print(f"  j={j + 1:<3} {st['log_statistic'][j]:>8.3f}  "
                  f"[{st['lower'][j]:.3f}, {st['upper'][j]:.3f}]  {flag}", file=out)


def cmd_analyze(args) -> int:
    panel, prov = _load(args)
    K = _resolve_K(args, panel.T)
    methods = _parse_methods(args.methods)
    levels = [round(1 - args.eta, 12)]
    table, tprov = _table(args, panel.p, [NormKind.ONE, NormKind.INF], levels)
    rep = analyze(panel, K=K, methods=methods, eta=args.eta, table=table, stripe=args.stripe,
                  coverage=args.coverage, stripe_reps=args.stripe_reps,
                  stripe_grid=args.stripe_grid, stripe_seed=args.seed)
    rep.provenance = {
        **prov, "T": panel.T, "p": panel.p, "K": K, "basis": BasisKind.KL.value,
        "eta": args.eta, "methods": [m.value for m in methods],
        "critical_values": tprov, "version": __version__,
    }
    _print_analysis(rep)
    _emit(rep.to_dict(), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- critval


def cmd_critval(args) -> int:
    path = Path(args.cache) if args.cache else default_cache_path()
    if path is None:
        raise UsageError("give --cache or set $COTREND_CACHE_DIR")
    table = CriticalValueTable.load(path) if path.exists() else None
    if table is not None and table.settings() != {"grid": args.grid, "reps": args.reps, "seed": args.seed}:
        raise UsageError(f"{path} was built with {table.provenance}; use another --cache path")
    before = set(table.entries) if table else set()
    table = build_table(_parse_int_list(args.dims), [NormKind(n) for n in args.norms], args.levels,
                        grid=args.grid, reps=args.reps, seed=args.seed,
                        workers=args.workers, table=table)
    table.save(path)
    added = sorted(set(table.entries) - before)
    print(f"{path}: {len(table.entries)} entries ({len(added)} new)")
    for key in sorted(table.entries):
        if key in added or args.verbose:
            print(f"  {key:<16} {table.entries[key]:.5f}")
    return EXIT_OK


# ---------------------------------------------------------------- hypothesis


def _specs(args, panel: SeriesPanel) -> list[HypothesisSpec]:
    p = panel.p
    if args.builder:
        name, *rest = args.builder
        if name == "aggregation":
            return list(build_aggregation_hypothesis(p))
        if args.s_full is None:
            raise UsageError("--s-full is required")
        if name == "autonomy":
            if len(rest) != 1:
                raise UsageError("usage: --builder autonomy COLUMNS")
            return [build_autonomy_hypothesis(p, _column_indices(panel, rest[0]), args.s_full)]
        if name == "balanced":
            if not rest:
                raise UsageError("usage: --builder balanced GROUP [GROUP ...]")
            groups = [_column_indices(panel, g) for g in rest]
            return [build_balanced_growth_hypothesis(p, groups, args.s_full)]
        raise UsageError(f"unknown builder {name!r}")
    if args.s_full is None:
        raise UsageError("--s-full is required")
    kind = HypothesisKind.CONTAINS if args.contains else HypothesisKind.CONTAINED_IN
    path = args.contains or args.contained_in
    return [HypothesisSpec(kind, load_matrix(path, p), args.s_full, str(path))]


def cmd_hypothesis(args) -> int:
    panel, prov = _load(args)
    specs = _specs(args, panel)
    K = _resolve_K(args, panel.T)
    method = Method(args.method)
    table, tprov = None, None
    if method.sequential:
        table, tprov = _table(args, panel.p, [method.norm],
                              sorted({round(1 - args.nu, 12), round(1 - args.eta, 12)}))
    design = design_matrix(panel.T, K)
    results = []
    for spec in specs:
        out = decide(panel, spec, method, nu=args.nu, eta=args.eta, rule=args.rule,
                     cvs=table, design=design)
        sub = subsystems(panel, spec)
        verdict = "not rejected" if out.z else "rejected"
        print(f"{spec.name or spec.kind.value}: {verdict}  (w={out.w}, v={out.v}, z={out.z}, "
              f"rule={out.rule.value}, method={method.value})")
        print(f"  H'X      [{', '.join(sub.h_panel.labels)}]: s_hat={out.s_hat_H}, "
              f"expected {out.expected[0]}")
        hp_labels = ", ".join(sub.hperp_panel.labels) if sub.hperp_panel is not None else ""
        print(f"  H_perp'X [{hp_labels}]: s_hat={out.s_hat_Hperp}, expected {out.expected[1]}")
        results.append({
            "hypothesis": spec.name, "kind": spec.kind.value, "matrix": spec.matrix.tolist(),
            "s_full": spec.s_full, "w": out.w, "v": out.v, "z": out.z,
            "rule": out.rule.value, "method": method.value,
            "s_hat_H": out.s_hat_H, "s_hat_Hperp": out.s_hat_Hperp,
            "expected": list(out.expected), "nu": out.nu, "eta": out.eta,
            "varsigma": out.varsigma,
            "eigenvalues_H": list(out.lambdas_H), "eigenvalues_Hperp": list(out.lambdas_Hperp),
            "labels_H": list(sub.h_panel.labels),
            "labels_Hperp": list(sub.hperp_panel.labels) if sub.hperp_panel is not None else [],
        })
    doc = {
        "decisions": results,
        "provenance": {**prov, "T": panel.T, "p": panel.p, "K": K, "basis": BasisKind.KL.value,
                       "critical_values": tprov, "version": __version__},
    }
    _emit(doc, args.out)
    return EXIT_OK


# ---------------------------------------------------------------- mc


def cmd_mc(args) -> int:
    methods = _parse_methods(args.methods)
    reps = 10_000 if args.full else args.reps
    table, tprov = None, None
    if any(m.sequential for m in methods):
        table, tprov = _table(args, args.p, [m.norm for m in methods if m.sequential],
                              sorted({round(1 - args.nu, 12), round(1 - args.eta, 12)}))
    hyps = args.hypotheses
    unknown = set(hyps) - set(MC_HYPOTHESES)
    if unknown:
        raise UsageError(f"unknown hypotheses {sorted(unknown)}")
    rep = run_mc(args.p, args.T, args.s, reps=reps, seed=args.seed, methods=methods,
                 hypotheses=hyps, nu=args.nu, eta=args.eta, rule=args.rule, cvs=table,
                 workers=args.workers)
    print(rep.format_table())
    if args.out:
        prefix = Path(args.out)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        Path(f"{prefix}.csv").write_text(rep.to_csv())
        doc = json.loads(rep.to_json())
        doc["provenance"]["critical_values"] = tprov
        Path(f"{prefix}.json").write_text(json.dumps(doc, indent=1) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------- dist


def cmd_dist(args) -> int:
    q = args.query
    if q == "mean":
        if args.value is not None:
            raise UsageError("mean takes no argument")
        val = zeta1_mean()
    else:
        if args.value is None:
            raise UsageError(f"{q} needs an argument")
        fn = {"pdf": zeta1_pdf, "cdf": zeta1_cdf, "sf": zeta1_sf, "quantile": zeta1_quantile}[q]
        val = fn(args.value)
    print(f"{val:.5f}" if args.digits is None else f"{val:.{args.digits}f}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_data_args(p, columns=True):
    p.add_argument("input", help="delimited file, header row, optional leading date column")
    if columns:
        p.add_argument("--columns", help="subset of columns: labels or 1-based indices, ranges allowed")
    p.add_argument("--log", action="store_true", help="take natural logs")
    p.add_argument("--normalize-start", action="store_true",
                   help="subtract each column's first observation")
    p.add_argument("--K", type=int, help="number of basis elements (default ceil(T^0.75))")
    p.add_argument("--cv-cache", help="critical value cache file (default $COTREND_CACHE_DIR)")
    p.add_argument("--out", help="write a JSON report here")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cotrend", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="eigenvalues and trend-count estimates for a panel")
    _add_data_args(a)
    a.add_argument("--methods", default=",".join(m.value for m in Method))
    a.add_argument("--eta", type=float, default=0.05, help="significance of sequential tests")
    a.add_argument("--stripe", action="store_true", help="confidence stripe at the max-gap s")
    a.add_argument("--coverage", type=float, default=0.95)
    a.add_argument("--stripe-reps", type=int, default=10_000)
    a.add_argument("--stripe-grid", type=int, default=1000)
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("critval", help="simulate and cache critical values")
    c.add_argument("--dims", default="1-20", help="e.g. 1-5 or 1,2,7")
    c.add_argument("--norms", nargs="+", default=["one", "inf"], choices=["one", "inf"])
    c.add_argument("--levels", nargs="+", type=float, default=[0.95])
    from cotrend.critical_values import DEFAULT_SEED
    from cotrend.limitdist import DEFAULT_GRID, DEFAULT_REPS
    c.add_argument("--reps", type=int, default=DEFAULT_REPS)
    c.add_argument("--grid", type=int, default=DEFAULT_GRID)
    c.add_argument("--seed", type=int, default=DEFAULT_SEED)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--cache", help="cache file (default $COTREND_CACHE_DIR/critical_values.json)")
    c.add_argument("--verbose", action="store_true")
    c.set_defaults(func=cmd_critval)

    h = sub.add_parser("hypothesis", help="test an inclusion hypothesis on the attractor space")
    _add_data_args(h)
    src = h.add_mutually_exclusive_group(required=True)
    src.add_argument("--contains", metavar="MATRIX", help="col a <= col psi, a read from file")
    src.add_argument("--contained-in", metavar="MATRIX", help="col psi <= col A, A read from file")
    src.add_argument("--builder", nargs="+", metavar="ARG",
                     help="aggregation | autonomy COLUMNS | balanced GROUP [GROUP ...]")
    h.add_argument("--s-full", type=int, help="number of trends in the full system")
    h.add_argument("--rule", choices=[r.value for r in Rule], default=Rule.JOINT.value)
    h.add_argument("--method", choices=[m.value for m in Method], default=Method.MAXGAP.value)
    h.add_argument("--nu", type=float, default=0.05, help="significance on the H side")
    h.add_argument("--eta", type=float, default=0.05, help="significance on the complement side")
    h.set_defaults(func=cmd_hypothesis)

    m = sub.add_parser("mc", help="Monte Carlo selection and size/power experiment")
    m.add_argument("--p", type=int, default=20)
    m.add_argument("--T", type=int, nargs="+", default=[150, 300])
    m.add_argument("--s", type=int, nargs="+", default=[1, 10, 19])
    m.add_argument("--reps", type=int, default=500)
    m.add_argument("--full", action="store_true", help="10000 replications")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--methods", default=",".join(x.value for x in ALL_METHODS))
    m.add_argument("--hypotheses", nargs="*", default=list(MC_HYPOTHESES))
    m.add_argument("--rule", choices=[r.value for r in Rule], default=Rule.JOINT.value)
    m.add_argument("--nu", type=float, default=0.05)
    m.add_argument("--eta", type=float, default=0.05)
    m.add_argument("--workers", type=int, default=1)
    m.add_argument("--cv-cache")
    m.add_argument("--out", help="output prefix; writes PREFIX.csv and PREFIX.json")
    m.set_defaults(func=cmd_mc)

    d = sub.add_parser("dist", help="exact law of the statistic with one trend")
    d.add_argument("query", choices=["pdf", "cdf", "sf", "quantile", "mean"])
    d.add_argument("value", nargs="?", type=float)
    d.add_argument("--digits", type=int)
    d.set_defaults(func=cmd_dist)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"cotrend: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, DimensionError, OSError) as exc:
        print(f"cotrend: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"cotrend: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"cotrend: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
