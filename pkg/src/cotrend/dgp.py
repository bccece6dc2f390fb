"""Cointegrated VAR(1) simulator and Monte Carlo experiments.

The DGP is ``dX_t = alpha beta' X_{t-1} + eps_t`` with ``beta = (0, I_{p-s})'``,
``alpha = -beta`` and ``X_0 = 0``, so the first ``s`` coordinates are random
walks and the remaining ones are white noise.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from cotrend.basis import default_K, design_matrix
from cotrend.cca import SeriesPanel, squared_canonical_correlations
from cotrend.critical_values import CriticalValueTable
from cotrend.errors import DomainError
from cotrend.hypotheses import (
    HypothesisKind,
    HypothesisSpec,
    Rule,
    decide_from_lambdas,
    subsystems,
)
from cotrend.trends import Method, estimate_s


@dataclass(frozen=True)
class DgpConfig:
    p: int
    s: int
    T: int
    seed: int = 0

    def __post_init__(self):
        if self.p < 1 or not 0 <= self.s <= self.p or self.T < 2:
            raise DomainError(f"invalid DGP configuration {self}")


def loadings(p: int, s: int) -> tuple[np.ndarray, np.ndarray]:
    """``(beta, psi)`` of the DGP: ``beta = (0, I_{p-s})'``, ``psi = (I_s, 0)'``."""
    eye = np.eye(p)
    return eye[:, s:], eye[:, :s]


def simulate_var1(cfg: DgpConfig) -> SeriesPanel:
    """Draw ``X_1, ..., X_T`` from the error-correction recursion."""
    rng = np.random.default_rng(cfg.seed)
    eps = rng.standard_normal((cfg.T, cfg.p))
    beta, _ = loadings(cfg.p, cfg.s)
    alpha = -beta
    Pi = alpha @ beta.T
    X = np.empty((cfg.T, cfg.p))
    prev = np.zeros(cfg.p)
    for t in range(cfg.T):
        prev = prev + Pi @ prev + eps[t]
        X[t] = prev
    return SeriesPanel(X)


def replication_seed(seed: int, *key: int) -> int:
    """Independent per-replication seed derived from a master seed and a key."""
    return int(np.random.SeedSequence(seed, spawn_key=key).generate_state(1, np.uint64)[0])


# The four hypotheses of the simulation study; each maps (p, s) to a spec.
def _h01(p, s):
    return HypothesisSpec(HypothesisKind.CONTAINED_IN, np.eye(p)[:, : p - 1], s, "H01")


def _h02(p, s):
    return HypothesisSpec(HypothesisKind.CONTAINS, np.eye(p)[:, :1], s, "H02")


def _h11(p, s):
    return HypothesisSpec(HypothesisKind.CONTAINED_IN, np.eye(p)[:, 1:], s, "H11")


def _h12(p, s):
    return HypothesisSpec(HypothesisKind.CONTAINS, np.eye(p)[:, p - 1 :], s, "H12")


MC_HYPOTHESES: dict[str, Callable[[int, int], HypothesisSpec]] = {
    "H01": _h01,
    "H02": _h02,
    "H11": _h11,
    "H12": _h12,
}
NULL_HYPOTHESES = ("H01", "H02")
ALL_METHODS = (Method.MAXGAP, Method.ARGMAX_ALT, Method.SEQ_INF, Method.SEQ_ONE)


@lru_cache(maxsize=8)
def _design(T, K):
    return design_matrix(T, K)


def _applicable(p, s):
    return [name for name in MC_HYPOTHESES if 1 <= s <= p - 1]


@dataclass
class McReport:
    """Monte Carlo frequencies.

    ``selection[(T, s, method)]`` is the frequency of ``s_hat != s``;
    ``rejection[(hypothesis, T, s, method)]`` the frequency of ``z = 0``.
    """

    p: int
    reps: int
    seed: int
    rule: str
    nu: float
    eta: float
    K: dict[int, int]
    methods: tuple[str, ...]
    selection: dict = field(default_factory=dict)
    rejection: dict = field(default_factory=dict)

    def provenance(self) -> dict:
        return {
            "p": self.p, "reps": self.reps, "seed": self.seed, "rule": self.rule,
            "nu": self.nu, "eta": self.eta, "K": {str(t): k for t, k in self.K.items()},
            "methods": list(self.methods),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["panel", "hypothesis", "T", "s", "method", "frequency"])
        for (T, s, m), f in sorted(self.selection.items()):
            w.writerow(["incorrect selection", "", T, s, m, repr(f)])
        for (h, T, s, m), f in sorted(self.rejection.items()):
            w.writerow(["rejection", h, T, s, m, repr(f)])
        return buf.getvalue()

    def to_json(self) -> str:
        """Nested layout: panel -> T -> s -> method (rows s, columns methods)."""
        sel: dict = {}
        for (T, s, m), f in sorted(self.selection.items()):
            sel.setdefault(f"T={T}", {}).setdefault(f"s={s}", {})[m] = f
        rej: dict = {}
        for (h, T, s, m), f in sorted(self.rejection.items()):
            rej.setdefault(h, {}).setdefault(f"T={T}", {}).setdefault(f"s={s}", {})[m] = f
        doc = {"provenance": self.provenance(), "incorrect_selection": sel, "rejection": rej}
        return json.dumps(doc, indent=1) + "\n"

    def format_table(self) -> str:
        lines = []
        Ts = sorted({k[0] for k in self.selection})
        ss = sorted({k[1] for k in self.selection})
        head = f"{'':>6} {'s':>3} | " + " | ".join(
            " ".join(f"{m:>10}" for m in self.methods) for _ in Ts
        )
        lines.append("        " + "   ".join(f"T={T}".center(11 * len(self.methods)) for T in Ts))
        lines.append(head)
        lines.append("incorrect selection of s")
        for s in ss:
            cells = [" ".join(f"{self.selection[(T, s, m)]:>10.3f}" for m in self.methods) for T in Ts]
            lines.append(f"{'':>6} {s:>3} | " + " | ".join(cells))
        hyps = sorted({k[0] for k in self.rejection})
        for h in hyps:
            lines.append(f"rejection frequency {h}")
            for s in ss:
                if (h, Ts[0], s, self.methods[0]) not in self.rejection:
                    continue
                cells = [
                    " ".join(f"{self.rejection[(h, T, s, m)]:>10.3f}" for m in self.methods)
                    for T in Ts
                ]
                lines.append(f"{h:>6} {s:>3} | " + " | ".join(cells))
        return "\n".join(lines)


def _one_replication(args):
    p, s, T, K, rep_seed, methods, hyps, nu, eta, rule, cvs = args
    x = simulate_var1(DgpConfig(p, s, T, rep_seed))
    d = _design(T, K)
    lam = squared_canonical_correlations(x, d).lambdas
    sel = [estimate_s(lam, m, T=T, K=K, eta=eta, cvs=cvs).s_hat for m in methods]
    dec = []
    for name in hyps:
        spec = MC_HYPOTHESES[name](p, s) if isinstance(name, str) else name
        sub = subsystems(x, spec)
        lam_H = squared_canonical_correlations(sub.h_panel, d).lambdas
        lam_P = (
            squared_canonical_correlations(sub.hperp_panel, d).lambdas
            if sub.hperp_panel is not None
            else np.empty(0)
        )
        dec.append([
            decide_from_lambdas(
                lam_H, lam_P, spec, m, T=T, K=K, nu=nu, eta=eta, rule=rule, cvs=cvs
            ).z
            for m in methods
        ])
    return sel, dec


def run_mc(
    p: int,
    T_list: Sequence[int],
    s_list: Sequence[int],
    *,
    reps: int,
    seed: int = 0,
    methods=ALL_METHODS,
    hypotheses=tuple(MC_HYPOTHESES),
    nu: float = 0.05,
    eta: float = 0.05,
    rule=Rule.JOINT,
    cvs: CriticalValueTable | None = None,
    K_rule: Callable[[int], int] = default_K,
    workers: int = 1,
) -> McReport:
    """Simulate ``reps`` panels per (T, s) cell and tabulate selection and rejection.

    ``hypotheses`` holds names from :data:`MC_HYPOTHESES` or ready-made specs.
    Named hypotheses are skipped in cells where they are not defined (s = 0 or
    s = p). Replication ``r`` of cell (T, s) draws from
    ``replication_seed(seed, p, s, T, r)``, so results do not depend on
    ``workers``.
    """
    methods = tuple(Method(m) for m in methods)
    rule = Rule(rule)
    if any(m.sequential for m in methods) and cvs is None:
        raise DomainError("sequential methods need a critical value table")
    report = McReport(
        p, reps, seed, rule.value, nu, eta, {}, tuple(m.value for m in methods)
    )
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for T in T_list:
            K = K_rule(T)
            report.K[T] = K
            for s in s_list:
                hyps = [
                    h for h in hypotheses
                    if not isinstance(h, str) or h in _applicable(p, s)
                ]
                tasks = [
                    (p, s, T, K, replication_seed(seed, p, s, T, r), methods, hyps, nu, eta, rule, cvs)
                    for r in range(reps)
                ]
                results = list(pool.map(_one_replication, tasks, chunksize=16)) if pool else [
                    _one_replication(t) for t in tasks
                ]
                sel = np.array([r[0] for r in results])
                for j, m in enumerate(methods):
                    report.selection[(T, s, m.value)] = float(np.mean(sel[:, j] != s))
                if hyps:
                    z = np.array([r[1] for r in results])
                    for i, h in enumerate(hyps):
                        name = h if isinstance(h, str) else (h.name or f"spec{i}")
                        for j, m in enumerate(methods):
                            report.rejection[(name, T, s, m.value)] = float(np.mean(z[:, i, j] == 0))
    finally:
        if pool:
            pool.shutdown()
    return report


def mc_selection(p, T_list, s_list, *, reps, seed=0, methods=ALL_METHODS, eta=0.05,
                 cvs=None, K_rule=default_K, workers=1) -> McReport:
    """Frequency of ``s_hat != s`` per (T, s, method)."""
    return run_mc(p, T_list, s_list, reps=reps, seed=seed, methods=methods, hypotheses=(),
                  eta=eta, cvs=cvs, K_rule=K_rule, workers=workers)


def mc_hypothesis(p, T_list, s_list, hypotheses=tuple(MC_HYPOTHESES), *, reps, seed=0,
                  methods=ALL_METHODS, rule=Rule.JOINT, nu=0.05, eta=0.05, cvs=None,
                  K_rule=default_K, workers=1) -> McReport:
    """Rejection frequency of each hypothesis per (T, s, method)."""
    return run_mc(p, T_list, s_list, reps=reps, seed=seed, methods=methods,
                  hypotheses=hypotheses, nu=nu, eta=eta, rule=rule, cvs=cvs,
                  K_rule=K_rule, workers=workers)
