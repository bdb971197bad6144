"""Delimited result tables shared by the drivers and the CLI.

Every table writer here is deterministic: fixed column order, fixed row
order, and ``%.12g`` float formatting, so a rerun with the same inputs
produces a byte-identical file.
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path
from typing import Dict, List, Mapping, Sequence, Union

#: Per-row state labels of the dissociation sweep, in column order.  ``g`` is
#: the two-electron singlet ground state, ``1`` and ``3`` the one- and
#: three-electron sector ground states, ``2`` the parameter-free triplet, and
#: the ``_max`` variants are the in-sector energy maximizations.
STATE_KEYS = ("g", "1", "2", "3", "g_max", "1_max", "3_max")

RESULTS_COLUMNS = (
    ("distance",)
    + tuple(f"energy_{k}" for k in STATE_KEYS)
    + tuple(f"stderr_{k}" for k in STATE_KEYS)
    + tuple(f"exact_{k}" for k in STATE_KEYS)
    + ("molecule",)
)

HIDDEN_INVERSE_COLUMNS = (
    "epsilon", "variant", "mean_abs_error", "std_abs_error", "trials",
)

#: ``series`` separates the per-step imaginary-time energies ("qite") from
#: the one-row Krylov estimate ("krylov") written at the last step it uses.
QITE_TRACE_COLUMNS = (
    "molecule", "distance", "sector", "direction", "series",
    "step", "beta", "energy", "exact",
)

MITIGATION_DEMO_COLUMNS = ("quantity", "value", "stderr", "reference")


def format_value(value: Union[str, int, float]) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans have no place in a results table")
    return "%.12g" % value


def write_table(
    path: Union[str, Path],
    columns: Sequence[str],
    rows: Sequence[Mapping[str, Union[str, int, float]]],
) -> None:
    """Write rows (in the given order) under a fixed header.

    ``path`` of ``-`` streams to standard output instead of a file.
    """
    lines = [",".join(columns)]
    for row in rows:
        missing = [c for c in columns if c not in row]
        if missing:
            raise KeyError(f"row is missing columns {missing}")
        lines.append(",".join(format_value(row[c]) for c in columns))
    text = "\n".join(lines) + "\n"
    if str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="\n")


def read_table(path: Union[str, Path]) -> List[Dict[str, str]]:
    """Rows as string dicts; callers convert the fields they need."""
    with open(path, newline="") as fh:
        return [dict(r) for r in csv.DictReader(fh)]


def write_results_csv(
    path: Union[str, Path],
    rows: Sequence[Mapping[str, Union[str, int, float]]],
) -> None:
    """Dissociation sweep table, sorted by molecule then bond distance."""
    ordered = sorted(rows, key=lambda r: (str(r["molecule"]), float(r["distance"])))
    write_table(path, RESULTS_COLUMNS, ordered)
