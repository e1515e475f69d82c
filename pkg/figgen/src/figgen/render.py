"""Rendering of precision curves and density maps from CSV tables.

Rendering is a pure function of the CSV content: nothing is recomputed,
smoothed or fitted here.  Required columns are validated up front and a
missing one raises SchemaError naming it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["SchemaError", "FigureSpec", "render"]

KINDS = ("precision_vs_eps", "density_map")
OUTPUT_SUFFIXES = (".png", ".svg")


class SchemaError(ValueError):
    """The input CSV does not carry the columns the figure kind needs."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: figure kind, input CSV paths, output image path."""

    kind: str
    inputs: tuple[str, ...]
    output: str
    param: str = "eps"      # precision figures: which parameter column family
    logy: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise SchemaError("at least one input CSV is required")
        if Path(self.output).suffix.lower() not in OUTPUT_SUFFIXES:
            raise SchemaError(
                f"unsupported output format {Path(self.output).suffix!r}; use .png or .svg"
            )
        if self.param not in ("eps", "x0"):
            raise SchemaError(f"param must be 'eps' or 'x0', got {self.param!r}")


def _read_table(path) -> tuple[list[str], list[dict]]:
    try:
        with open(path, newline="") as f:
            reader = csv.DictReader(f)
            rows = list(reader)
            header = reader.fieldnames or []
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return header, rows


def _require(header: list[str], columns: list[str], path) -> None:
    for col in columns:
        if col not in header:
            raise SchemaError(f"{path}: missing column: {col}")


def _fval(row: dict, col: str) -> float:
    raw = (row.get(col) or "").strip()
    if raw == "":
        return math.nan
    try:
        return float(raw)
    except ValueError:
        raise SchemaError(f"column {col}: not a number: {raw!r}") from None


def _render_precision(spec: FigureSpec):
    p = spec.param
    value_col = f"inv_var_{p}"
    se_col = f"inv_var_{p}_se"
    crb_col = f"crb_{p}"
    qcrb_col = f"qcrb_{p}"

    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    qcrb_curve: dict[float, float] = {}
    for path in spec.inputs:
        header, rows = _read_table(path)
        _require(header, ["eps", "strategy", value_col, crb_col, qcrb_col], path)
        has_se = se_col in header
        has_vis = "visibility" in header

        groups: dict[tuple, list[dict]] = {}
        for row in rows:
            key = (row["strategy"], row["visibility"] if has_vis else None)
            groups.setdefault(key, []).append(row)
            qcrb = _fval(row, qcrb_col)
            if math.isfinite(qcrb):
                qcrb_curve[_fval(row, "eps")] = qcrb

        for (strategy, vis), grp in sorted(groups.items(), key=lambda kv: kv[0]):
            grp = sorted(grp, key=lambda r: _fval(r, "eps"))
            eps = np.array([_fval(r, "eps") for r in grp])
            val = np.array([_fval(r, value_col) for r in grp])
            keep = np.isfinite(val)
            if not keep.any():
                continue
            label = strategy if vis is None else f"{strategy} (V={vis})"
            if has_se:
                se = np.array([_fval(r, se_col) for r in grp])
                se = np.where(np.isfinite(se), se, 0.0)
                ax.errorbar(eps[keep], val[keep], yerr=se[keep], fmt="o-",
                            capsize=2.5, markersize=3.5, label=label)
            else:
                ax.plot(eps[keep], val[keep], "o-", markersize=3.5, label=label)
            crb = np.array([_fval(r, crb_col) for r in grp])
            keep_crb = np.isfinite(crb)
            # overlay the bound prediction only when it is not the curve itself
            if keep_crb.any() and not np.allclose(crb[keep_crb], val[keep_crb], equal_nan=True):
                ax.plot(eps[keep_crb], crb[keep_crb], "--", linewidth=1.0, alpha=0.7,
                        color=ax.get_lines()[-1].get_color())

    if qcrb_curve:
        e = np.array(sorted(qcrb_curve))
        ax.plot(e, [qcrb_curve[v] for v in e], "k-.", linewidth=1.2, label="qCRB")

    ax.set_xlabel("source separation eps (units of sigma)")
    name = "eps" if p == "eps" else "x0"
    ax.set_ylabel(f"inverse variance per photon, {name}")
    if spec.logy:
        ax.set_yscale("log")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _read_grid(path):
    header, rows = _read_table(path)
    if not header or header[0] != "x":
        raise SchemaError(f"{path}: missing column: x")
    x2 = np.array([float(v) for v in header[1:]])
    x1 = np.array([_fval(r, "x") for r in rows])
    vals = np.array([[_fval(r, c) for c in header[1:]] for r in rows])
    if vals.shape != (len(x1), len(x2)):
        raise SchemaError(f"{path}: ragged grid")
    return x1, x2, vals


def _render_density(spec: FigureSpec):
    if len(spec.inputs) != 2:
        raise SchemaError("density_map takes exactly two inputs: the pc grid and the pd grid")
    fig, axes = plt.subplots(1, 2, figsize=(9.2, 4.0))
    titles = ("cross-coincidences p_c", "double events p_d")
    for ax, path, title in zip(axes, spec.inputs, titles):
        x1, x2, vals = _read_grid(path)
        mesh = ax.pcolormesh(x2, x1, vals, shading="auto", cmap="inferno")
        ax.set_title(title, fontsize=10)
        ax.set_xlabel("x2")
        ax.set_ylabel("x1")
        ax.set_aspect("equal")
        fig.colorbar(mesh, ax=ax, shrink=0.85)
    fig.tight_layout()
    return fig


def render(spec: FigureSpec):
    """Draw the figure and write it to spec.output; returns the Figure."""
    if spec.kind == "precision_vs_eps":
        fig = _render_precision(spec)
    else:
        fig = _render_density(spec)
    fig.savefig(spec.output, dpi=150)
    plt.close(fig)
    return fig
