"""Render the benchmark CSVs into static figures.

The input contract is the CSV layout of the benchmark command-line tool;
nothing here imports that package, the column names are the interface.
All numeric handling stays on string copies of the data so ``dump_table``
can re-emit exactly what was plotted, byte for byte.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd

#: Dashed threshold drawn on the error plots, in Hartree.
CHEMICAL_ACCURACY = 1.5e-3

STATE_KEYS = ("g", "1", "2", "3", "g_max", "1_max", "3_max")

#: Legend text per state series, in the sector notation of the figures.
SECTOR_LEGEND = {
    "g": "$N_e=2,\\,s_z=0$",
    "1": "$N_e=1,\\,s_z=+1/2$",
    "2": "$N_e=2,\\,s_z=0$ triplet",
    "3": "$N_e=3,\\,s_z=+1/2$",
    "g_max": "$N_e=2,\\,s_z=0$ max",
    "1_max": "$N_e=1,\\,s_z=+1/2$ max",
    "3_max": "$N_e=3,\\,s_z=+1/2$ max",
}

SCAN_COLUMNS = (
    ("distance",)
    + tuple(f"energy_{k}" for k in STATE_KEYS)
    + tuple(f"stderr_{k}" for k in STATE_KEYS)
    + tuple(f"exact_{k}" for k in STATE_KEYS)
    + ("molecule",)
)

TRACE_COLUMNS = (
    "molecule", "distance", "sector", "direction", "series",
    "step", "beta", "energy", "exact",
)

HIDDEN_INVERSE_COLUMNS = (
    "epsilon", "variant", "mean_abs_error", "std_abs_error", "trials",
)

PLOT_KINDS = ("dissociation", "errors", "qite", "hidden-inverse")

_SCHEMA = {
    "dissociation": SCAN_COLUMNS,
    "errors": SCAN_COLUMNS,
    "qite": TRACE_COLUMNS,
    "hidden-inverse": HIDDEN_INVERSE_COLUMNS,
}


class ColumnError(ValueError):
    """The input CSV lacks columns the plot kind needs."""


@dataclass
class PlotSpec:
    source: Union[str, Path]
    kind: str
    out: Union[str, Path] = "figure.png"
    molecule: Optional[str] = None
    sector: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in PLOT_KINDS:
            raise ValueError(f"kind must be one of {PLOT_KINDS}")


def _load(spec: PlotSpec) -> pd.DataFrame:
    frame = pd.read_csv(spec.source, dtype=str, keep_default_na=False)
    required = _SCHEMA[spec.kind]
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise ColumnError(f"missing columns: {', '.join(missing)}")
    unknown = [c for c in frame.columns if c not in required]
    if unknown:
        warnings.warn(f"ignoring unknown columns: {', '.join(unknown)}")
    if spec.molecule is not None and "molecule" in frame.columns:
        frame = frame[frame["molecule"] == spec.molecule]
    if spec.sector is not None and "sector" in frame.columns:
        frame = frame[frame["sector"] == spec.sector]
    if frame.empty:
        raise ValueError("no rows left to plot after filtering")
    return frame


def dump_table(spec: PlotSpec) -> str:
    """The exact rows and values a render would use, as CSV text.

    With no filters this reproduces the input file byte for byte; with
    filters it is the matching subset, still verbatim.
    """
    frame = _load(spec)
    lines = [",".join(frame.columns)]
    for _, row in frame.iterrows():
        lines.append(",".join(row[c] for c in frame.columns))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# the four kinds
# ---------------------------------------------------------------------------

def _molecule_axes(frame: pd.DataFrame) -> Tuple[plt.Figure, List]:
    molecules = sorted(frame["molecule"].unique())
    cols = min(2, len(molecules))
    rows = (len(molecules) + cols - 1) // cols
    fig, axes = plt.subplots(
        rows, cols, figsize=(5.2 * cols, 3.8 * rows), squeeze=False
    )
    for ax in axes.flat[len(molecules):]:
        ax.axis("off")
    return fig, list(zip(axes.flat, molecules))


def _render_dissociation(frame: pd.DataFrame) -> plt.Figure:
    fig, panels = _molecule_axes(frame)
    for ax, molecule in panels:
        sub = frame[frame["molecule"] == molecule].copy()
        sub["_x"] = sub["distance"].astype(float)
        sub = sub.sort_values("_x")
        x = sub["_x"].to_numpy()
        for key in STATE_KEYS:
            exact = sub[f"exact_{key}"].astype(float).to_numpy()
            energy = sub[f"energy_{key}"].astype(float).to_numpy()
            stderr = sub[f"stderr_{key}"].astype(float).to_numpy()
            (line,) = ax.plot(x, exact, "-", lw=1.2, label=SECTOR_LEGEND[key])
            ax.errorbar(
                x, energy, yerr=stderr, fmt="o", ms=4,
                color=line.get_color(), capsize=2, lw=0.8,
            )
        ax.set_title(molecule)
        ax.set_xlabel("bond distance [$\\mathrm{\\AA}$]")
        ax.set_ylabel("energy [Ha]")
    panels[0][0].legend(fontsize=7, ncols=2)
    fig.tight_layout()
    return fig


def _render_errors(frame: pd.DataFrame) -> plt.Figure:
    fig, panels = _molecule_axes(frame)
    for ax, molecule in panels:
        sub = frame[frame["molecule"] == molecule].copy()
        sub["_x"] = sub["distance"].astype(float)
        sub = sub.sort_values("_x")
        x = sub["_x"].to_numpy()
        for key in STATE_KEYS:
            error = (
                sub[f"energy_{key}"].astype(float)
                - sub[f"exact_{key}"].astype(float)
            ).abs().to_numpy()
            ax.plot(x, error, "o-", ms=4, lw=0.9, label=SECTOR_LEGEND[key])
        ax.axhline(
            CHEMICAL_ACCURACY, color="k", ls="--", lw=1.0,
            label="chemical accuracy",
        )
        ax.set_yscale("log")
        ax.set_title(molecule)
        ax.set_xlabel("bond distance [$\\mathrm{\\AA}$]")
        ax.set_ylabel("|energy error| [Ha]")
    panels[0][0].legend(fontsize=7, ncols=2)
    fig.tight_layout()
    return fig


def _render_qite(frame: pd.DataFrame) -> plt.Figure:
    panels = sorted(
        frame[["sector", "direction"]].drop_duplicates().itertuples(index=False)
    )
    cols = min(2, len(panels))
    rows = (len(panels) + cols - 1) // cols
    fig, axes = plt.subplots(
        rows, cols, figsize=(5.2 * cols, 3.4 * rows), squeeze=False
    )
    for ax in axes.flat[len(panels):]:
        ax.axis("off")
    for ax, (sector, direction) in zip(axes.flat, panels):
        sub = frame[(frame["sector"] == sector) & (frame["direction"] == direction)]
        groups = sorted(
            sub[["molecule", "distance"]].drop_duplicates().itertuples(index=False)
        )
        for molecule, distance in groups:
            curve = sub[
                (sub["molecule"] == molecule) & (sub["distance"] == distance)
            ].copy()
            trace = curve[curve["series"] == "qite"].copy()
            trace["_s"] = trace["step"].astype(int)
            trace = trace.sort_values("_s")
            (line,) = ax.plot(
                trace["beta"].astype(float),
                trace["energy"].astype(float),
                "-", lw=1.0, label=f"{molecule} {distance}",
            )
            ax.axhline(
                float(curve["exact"].iloc[0]),
                color=line.get_color(), ls=":", lw=0.8, alpha=0.7,
            )
            marks = curve[curve["series"] == "krylov"]
            ax.plot(
                marks["beta"].astype(float),
                marks["energy"].astype(float),
                "*", ms=10, color=line.get_color(), zorder=5,
            )
        ax.set_title(f"{sector}, {direction}", fontsize=9)
        ax.set_xlabel("$\\beta$")
        ax.set_ylabel("energy [Ha]")
        ax.legend(fontsize=6)
    fig.tight_layout()
    return fig


def _render_hidden_inverse(frame: pd.DataFrame) -> plt.Figure:
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    for variant, marker in (("native", "o"), ("hidden-inverse", "s")):
        sub = frame[frame["variant"] == variant].copy()
        sub["_x"] = sub["epsilon"].astype(float)
        sub = sub.sort_values("_x")
        ax.errorbar(
            sub["_x"].to_numpy(),
            sub["mean_abs_error"].astype(float).to_numpy(),
            yerr=sub["std_abs_error"].astype(float).to_numpy(),
            marker=marker, ms=4, capsize=2, label=variant,
        )
    ax.set_yscale("log")
    ax.set_xlabel("over-rotation magnitude $\\epsilon$")
    ax.set_ylabel("mean $|\\Delta E|$ [Ha]")
    ax.legend()
    fig.tight_layout()
    return fig


_RENDERERS = {
    "dissociation": _render_dissociation,
    "errors": _render_errors,
    "qite": _render_qite,
    "hidden-inverse": _render_hidden_inverse,
}


def render(spec: PlotSpec) -> Path:
    """Write the figure for ``spec`` and return its path."""
    frame = _load(spec)
    fig = _RENDERERS[spec.kind](frame)
    out = Path(spec.out)
    # a fixed metadata block keeps identical inputs producing identical bytes
    fig.savefig(out, dpi=150, metadata={"Software": "plotkit"})
    plt.close(fig)
    return out
