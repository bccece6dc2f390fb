import json

import numpy as np
import pytest

from cotrend.critical_values import (
    CACHE_ENV,
    CriticalValueTable,
    NormKind,
    build_table,
    critical_value,
    default_cache_path,
    default_table,
    ensure_coverage,
    entry_key,
    resolve_table,
    vector_norm,
)
from cotrend.errors import DomainError, MissingCriticalValueError
from cotrend.limitdist import zeta1_quantile

SMALL = dict(grid=200, reps=1000, seed=11)


def test_vector_norms():
    v = np.array([[3.0, 1.0], [2.0, 2.0]])
    np.testing.assert_array_equal(vector_norm(v, NormKind.ONE), [4.0, 4.0])
    np.testing.assert_array_equal(vector_norm(v, "inf"), [3.0, 2.0])


def test_entry_key_is_stable():
    assert entry_key(3, "one", 0.95) == entry_key(3, NormKind.ONE, 0.9500000000000001)
    assert entry_key(3, "one", 0.95) != entry_key(3, "inf", 0.95)


def test_packaged_table_contents(cv_table):
    assert cv_table.settings() == {"grid": 2000, "reps": 100_000, "seed": 20240830}
    for norm in NormKind:
        assert cv_table.covers(range(1, 21), norm, 0.95)
        assert cv_table.lookup(1, norm, 0.95) == pytest.approx(17.71180, abs=1e-4)


@pytest.mark.parametrize("norm", list(NormKind))
@pytest.mark.parametrize("level", [0.9, 0.95, 0.975, 0.99])
def test_packaged_table_monotone(cv_table, norm, level):
    vals = [cv_table.lookup(d, norm, level) for d in range(1, 21)]
    assert np.all(np.diff(vals) > 0)


@pytest.mark.parametrize("dim", [2, 5, 20])
def test_packaged_table_levels_and_norms_ordered(cv_table, dim):
    for norm in NormKind:
        vals = [cv_table.lookup(dim, norm, lv) for lv in (0.9, 0.95, 0.975, 0.99)]
        assert np.all(np.diff(vals) > 0)
    assert cv_table.lookup(dim, "one", 0.95) > cv_table.lookup(dim, "inf", 0.95)


def test_missing_entry_raises():
    table = CriticalValueTable(dict(SMALL, basis="KL"))
    with pytest.raises(MissingCriticalValueError):
        table.lookup(2, "one", 0.95)


def test_dim_one_uses_exact_quantile():
    table = build_table([1, 2], ["one", "inf"], [0.95], **SMALL)
    assert table.lookup(1, "one", 0.95) == zeta1_quantile(0.95)
    assert table.lookup(1, "inf", 0.95) == zeta1_quantile(0.95)


def test_json_round_trip(tmp_path):
    table = build_table([1, 2, 3], ["one", "inf"], [0.9, 0.95], **SMALL)
    path = tmp_path / "cv.json"
    table.save(path)
    again = CriticalValueTable.load(path)
    assert again.entries == table.entries
    assert again.provenance == table.provenance
    assert json.loads(path.read_text())["provenance"]["seed"] == 11


def test_rebuild_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    build_table([1, 2, 3], ["one"], [0.95], **SMALL).save(a)
    build_table([1, 2, 3], ["one"], [0.95], **SMALL).save(b)
    assert a.read_bytes() == b.read_bytes()


def test_extension_matches_direct_build():
    part = build_table([1, 2], ["one", "inf"], [0.95], **SMALL)
    extended = build_table([3, 4], ["one", "inf"], [0.95], table=part, **SMALL)
    direct = build_table([1, 2, 3, 4], ["one", "inf"], [0.95], **SMALL)
    assert extended.entries == direct.entries


def test_five_dims_three_levels_adds_six_entries():
    table = build_table([5], ["one", "inf"], [0.9, 0.95, 0.99], **SMALL)
    assert len(table.entries) == 6
    assert set(table.provenance) >= {"grid", "reps", "seed", "basis"}


def test_provenance_mismatch_rejected():
    table = build_table([2], ["one"], [0.95], **SMALL)
    with pytest.raises(DomainError):
        build_table([3], ["one"], [0.95], grid=200, reps=2000, seed=11, table=table)


def test_critical_value_fills_cache_on_miss():
    table = CriticalValueTable(dict(SMALL, basis="KL"))
    v = critical_value(3, "inf", 0.95, table)
    assert (3, "inf", 0.95) in table
    assert table.lookup(3, "inf", 0.95) == v


def test_ensure_coverage_reports_work():
    table = build_table([1, 2], ["one"], [0.95], **SMALL)
    assert not ensure_coverage(table, [1, 2], ["one"], [0.95])
    assert ensure_coverage(table, [1, 2, 3], ["one"], [0.95])
    assert table.covers([1, 2, 3], "one", 0.95)


def test_simulated_quantiles_close_to_packaged(cv_table):
    small = build_table([3], ["one", "inf"], [0.95], grid=500, reps=4000, seed=1)
    for norm in NormKind:
        assert small.lookup(3, norm, 0.95) == pytest.approx(cv_table.lookup(3, norm, 0.95), rel=0.06)


def test_cache_path_from_environment(monkeypatch, tmp_path):
    assert default_cache_path() is None
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    assert default_cache_path() == tmp_path / "critical_values.json"
    # missing cache file falls back to the packaged table
    assert resolve_table().entries == default_table().entries
