import pytest

from qcbench.results import (
    HIDDEN_INVERSE_COLUMNS,
    RESULTS_COLUMNS,
    STATE_KEYS,
    format_value,
    read_table,
    write_results_csv,
    write_table,
)

FROZEN_HEADER = (
    "distance,energy_g,energy_1,energy_2,energy_3,energy_g_max,energy_1_max,"
    "energy_3_max,stderr_g,stderr_1,stderr_2,stderr_3,stderr_g_max,"
    "stderr_1_max,stderr_3_max,exact_g,exact_1,exact_2,exact_3,exact_g_max,"
    "exact_1_max,exact_3_max,molecule"
)


def sweep_row(molecule, distance, fill=0.0):
    row = {"molecule": molecule, "distance": distance}
    for key in STATE_KEYS:
        row[f"energy_{key}"] = fill
        row[f"stderr_{key}"] = fill
        row[f"exact_{key}"] = fill
    return row


def test_header_is_frozen():
    assert ",".join(RESULTS_COLUMNS) == FROZEN_HEADER


def test_write_read_roundtrip(tmp_path):
    path = tmp_path / "t.csv"
    write_table(path, ("a", "b"), [{"a": 1.25, "b": "x"}, {"a": 3e-17, "b": "y"}])
    rows = read_table(path)
    assert rows == [{"a": "1.25", "b": "x"}, {"a": "3e-17", "b": "y"}]


def test_rewrite_is_byte_identical(tmp_path):
    rows = [sweep_row("NaH", 2.0, 0.123456789012345), sweep_row("LiH", 1.0)]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    write_results_csv(first, rows)
    write_results_csv(second, list(reversed(rows)))
    assert first.read_bytes() == second.read_bytes()
    assert first.read_text().splitlines()[0] == FROZEN_HEADER


def test_rows_sorted_by_molecule_then_distance(tmp_path):
    rows = [sweep_row("NaH", 0.5), sweep_row("LiH", 2.0), sweep_row("LiH", 0.5)]
    path = tmp_path / "t.csv"
    write_results_csv(path, rows)
    got = [(r["molecule"], r["distance"]) for r in read_table(path)]
    assert got == [("LiH", "0.5"), ("LiH", "2"), ("NaH", "0.5")]


def test_missing_column_raises(tmp_path):
    with pytest.raises(KeyError):
        write_table(tmp_path / "t.csv", ("a", "b"), [{"a": 1.0}])


def test_format_value():
    assert format_value(0.1) == "0.1"
    assert format_value(20) == "20"
    assert format_value("LiH") == "LiH"
    assert format_value(1.0 / 3.0) == "0.333333333333"
    with pytest.raises(TypeError):
        format_value(True)


def test_hidden_inverse_columns():
    assert HIDDEN_INVERSE_COLUMNS == (
        "epsilon", "variant", "mean_abs_error", "std_abs_error", "trials",
    )
