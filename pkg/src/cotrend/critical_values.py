"""Critical values of the trend-count test statistics and their on-disk cache."""

from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from cotrend.basis import BasisKind
from cotrend.errors import DomainError, MissingCriticalValueError
from cotrend.limitdist import (
    DEFAULT_GRID,
    DEFAULT_REPS,
    ZetaDraws,
    simulate_zeta,
    simulate_zeta_nested,
    zeta1_quantile,
)

DEFAULT_SEED = 20240830
CACHE_ENV = "COTREND_CACHE_DIR"
CACHE_FILE = "critical_values.json"
FORMAT_VERSION = 1


class NormKind(str, enum.Enum):
    ONE = "one"
    INF = "inf"


def vector_norm(values, norm) -> np.ndarray:
    """Norm of nonnegative vectors along the last axis (sum or maximum)."""
    values = np.asarray(values, dtype=float)
    if NormKind(norm) is NormKind.ONE:
        return values.sum(axis=-1)
    return values.max(axis=-1)


def _level_key(level: float) -> str:
    level = float(level)
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level!r}")
    # 1 - 0.05 and 0.95 must share an entry
    return repr(round(level, 12))


def entry_key(dim: int, norm, level: float) -> str:
    if int(dim) != dim or dim < 1:
        raise DomainError(f"dimension must be a positive integer, got {dim!r}")
    return f"{int(dim)}/{NormKind(norm).value}/{_level_key(level)}"


@dataclass
class CriticalValueTable:
    """Quantiles of ``||zeta^(dim)||_norm`` at probability ``level``.

    ``provenance`` records the simulation settings (grid, reps, seed, basis)
    so that a stale cache can be told apart from a current one.
    """

    provenance: dict = field(
        default_factory=lambda: {
            "grid": DEFAULT_GRID,
            "reps": DEFAULT_REPS,
            "seed": DEFAULT_SEED,
            "basis": BasisKind.KL.value,
        }
    )
    entries: dict[str, float] = field(default_factory=dict)

    def __contains__(self, key) -> bool:
        return entry_key(*key) in self.entries

    def lookup(self, dim: int, norm, level: float) -> float:
        key = entry_key(dim, norm, level)
        try:
            return self.entries[key]
        except KeyError:
            raise MissingCriticalValueError(f"no critical value for {key}") from None

    def set(self, dim: int, norm, level: float, value: float) -> None:
        self.entries[entry_key(dim, norm, level)] = float(value)

    def covers(self, dims, norm, level) -> bool:
        return all((d, norm, level) in self for d in dims)

    def settings(self) -> dict:
        return {k: self.provenance[k] for k in ("grid", "reps", "seed")}

    def to_json(self) -> str:
        doc = {
            "format": FORMAT_VERSION,
            "provenance": dict(sorted(self.provenance.items())),
            "entries": {k: self.entries[k] for k in sorted(self.entries, key=_sort_key)},
        }
        return json.dumps(doc, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CriticalValueTable":
        doc = json.loads(text)
        if doc.get("format") != FORMAT_VERSION:
            raise DomainError(f"unsupported critical value format {doc.get('format')!r}")
        return cls(dict(doc["provenance"]), {k: float(v) for k, v in doc["entries"].items()})

    def save(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(self.to_json())
        os.replace(tmp, path)

    @classmethod
    def load(cls, path) -> "CriticalValueTable":
        return cls.from_json(Path(path).read_text())


def _sort_key(key: str):
    dim, norm, level = key.split("/")
    return (int(dim), norm, float(level))


def default_table() -> CriticalValueTable:
    """The table shipped with the package (defaults for grid, reps, seed)."""
    text = resources.files("cotrend").joinpath("data").joinpath(CACHE_FILE).read_text()
    return CriticalValueTable.from_json(text)


def default_cache_path() -> Path | None:
    root = os.environ.get(CACHE_ENV)
    return Path(root) / CACHE_FILE if root else None


def resolve_table(path=None) -> CriticalValueTable:
    """Load ``path``, else the cache under ``$COTREND_CACHE_DIR``, else the shipped table."""
    if path is None:
        path = default_cache_path()
    if path is not None and Path(path).exists():
        return CriticalValueTable.load(path)
    return default_table()


def quantile_of_draws(draws: ZetaDraws, norm, level: float) -> float:
    return float(np.quantile(vector_norm(draws.values, norm), level))


def critical_value(
    dim: int,
    norm,
    level: float,
    table: CriticalValueTable | None = None,
    *,
    grid: int = DEFAULT_GRID,
    reps: int = DEFAULT_REPS,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> float:
    """``level``-quantile of the norm of the limit spectrum of dimension ``dim``.

    For one trend both norms coincide and the exact quantile is returned.
    With a ``table`` the lookup is exact-key; a miss is simulated with the
    table's own settings and stored back into it.
    """
    key = entry_key(dim, norm, level)
    if table is not None and key in table.entries:
        return table.entries[key]
    if dim == 1:
        value = zeta1_quantile(level)
    else:
        if table is not None:
            grid, reps, seed = (int(v) for v in table.settings().values())
        draws = simulate_zeta(dim, reps, grid, seed, workers)
        value = quantile_of_draws(draws, norm, level)
    if table is not None:
        table.entries[key] = value
    return value


def build_table(
    dims,
    norms=(NormKind.ONE, NormKind.INF),
    levels=(0.95,),
    *,
    grid: int = DEFAULT_GRID,
    reps: int = DEFAULT_REPS,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    table: CriticalValueTable | None = None,
) -> CriticalValueTable:
    """Fill (or extend) a table from one nested simulation over ``dims``."""
    provenance = {"grid": grid, "reps": reps, "seed": seed, "basis": BasisKind.KL.value}
    if table is None:
        table = CriticalValueTable(provenance)
    elif table.provenance != provenance:
        raise DomainError(
            f"table was built with {table.provenance}, requested {provenance}"
        )
    norms = [NormKind(n) for n in norms]
    dims = sorted({int(d) for d in dims})
    todo = [d for d in dims if d > 1 and not all((d, n, lv) in table for n in norms for lv in levels)]
    for lv in levels:
        for n in norms:
            if 1 in dims:
                table.set(1, n, lv, zeta1_quantile(lv))
    if todo:
        draws = simulate_zeta_nested(todo, reps, grid, seed, workers)
        for d in todo:
            for n in norms:
                for lv in levels:
                    table.set(d, n, lv, quantile_of_draws(draws[d], n, lv))
    return table


def ensure_coverage(table: CriticalValueTable, dims, norms, levels, workers: int = 1) -> bool:
    """Simulate any missing entries with the table's own settings.

    Returns True when the table was extended.
    """
    norms = [NormKind(n) for n in norms]
    missing = sorted({int(d) for d in dims for n in norms for lv in levels if (d, n, lv) not in table})
    if not missing:
        return False
    s = table.settings()
    build_table(missing, norms, levels, grid=int(s["grid"]), reps=int(s["reps"]),
                seed=int(s["seed"]), workers=workers, table=table)
    return True
