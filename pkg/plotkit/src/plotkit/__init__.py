"""Static figure rendering for the eigensolver benchmark CSVs."""

from .render import (
    CHEMICAL_ACCURACY,
    ColumnError,
    PLOT_KINDS,
    PlotSpec,
    dump_table,
    render,
)

__all__ = [
    "CHEMICAL_ACCURACY",
    "ColumnError",
    "PLOT_KINDS",
    "PlotSpec",
    "dump_table",
    "render",
]
