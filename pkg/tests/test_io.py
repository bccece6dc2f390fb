import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cotrend.cca import SeriesPanel
from cotrend.errors import DataError, DimensionError
from cotrend.io import file_digest, load_matrix, preprocess, read_panel, write_panel


def _write(tmp_path, text, name="panel.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_read_with_date_column(tmp_path):
    path = _write(tmp_path, "DATE,a,b\n2020-01-01,1.0,2.0\n2020-01-02,1.5,2.5\n")
    panel = read_panel(path)
    assert panel.labels == ("a", "b")
    assert panel.index == ("2020-01-01", "2020-01-02")
    np.testing.assert_array_equal(panel.values, [[1.0, 2.0], [1.5, 2.5]])


def test_read_tab_separated_without_index(tmp_path):
    path = _write(tmp_path, "# comment\nx\ty\tz\n1\t2\t3\n4\t5\t6\n", "panel.tsv")
    panel = read_panel(path)
    assert panel.index is None
    assert panel.values.shape == (2, 3)


@pytest.mark.parametrize(
    "text, row, column",
    [
        ("d,a,b\n2020,1,2\n2021,.,3\n", 3, "a"),
        ("d,a,b\nx,1,2\ny,1,NA\n", 3, "b"),
        ("a,b\n1,2\n3,abc\n", None, None),
    ],
)
def test_missing_and_bad_values_located(tmp_path, text, row, column):
    with pytest.raises(DataError) as info:
        read_panel(_write(tmp_path, text))
    if row is not None:
        assert (info.value.row, info.value.column) == (row, column)


@pytest.mark.parametrize(
    "text",
    ["1,2\n3,4\n", "a,b\n", "d,a\nx,1\n", "a,b\n1,2,3\n", "", "a,b\n1,inf\n"],
)
def test_malformed_files(tmp_path, text):
    with pytest.raises(DataError):
        read_panel(_write(tmp_path, text))


def test_preprocess_log_and_start(tmp_path):
    panel = SeriesPanel(np.array([[1.0, np.e], [np.e, 1.0]]))
    out = preprocess(panel, log=True, normalize_start=True)
    np.testing.assert_allclose(out.values, [[0.0, 0.0], [1.0, -1.0]])
    with pytest.raises(DataError):
        preprocess(SeriesPanel(np.array([[1.0, 0.0]])), log=True)


@settings(max_examples=25)
@given(st.lists(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=2), min_size=1, max_size=20))
def test_normalize_start_zeroes_first_row(rows):
    out = preprocess(SeriesPanel(np.array(rows)), normalize_start=True)
    assert np.all(out.values[0] == 0.0)


def test_write_read_round_trip(tmp_path, rng):
    panel = SeriesPanel(rng.standard_normal((5, 3)), ("a", "b", "c"), tuple(f"t{i}" for i in range(5)))
    path = tmp_path / "out.csv"
    write_panel(path, panel)
    back = read_panel(path)
    np.testing.assert_array_equal(back.values, panel.values)
    assert back.labels == panel.labels and back.index == panel.index


def test_load_matrix(tmp_path):
    path = _write(tmp_path, "1,0\n0,1\n0,0\n", "a.csv")
    np.testing.assert_array_equal(load_matrix(path, 3), np.eye(3)[:, :2])
    with pytest.raises(DimensionError):
        load_matrix(path, 4)
    with pytest.raises(DimensionError):
        load_matrix(_write(tmp_path, "1,0\n0\n", "b.csv"))
    with pytest.raises(DataError):
        load_matrix(_write(tmp_path, "1,x\n0,1\n", "c.csv"))


def test_file_digest_changes_with_content(tmp_path):
    a = _write(tmp_path, "a,b\n1,2\n", "a.csv")
    b = _write(tmp_path, "a,b\n1,3\n", "b.csv")
    assert file_digest(a) != file_digest(b)
    assert len(file_digest(a)) == 64
