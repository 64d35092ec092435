"""Figure rendering for postproj outputs.

Reads only the published file schemas: density-grid CSVs with columns
``point, density, atom_c_mass, atom_d_mass`` (atom columns constant, grid
anchored at the constraint bounds) and report JSON documents with top-level
``{command, seed, config, results}``.  Boundary atoms are drawn as vertical
segments at the first/last grid point, matching the convention of the
density figures; all numbers come from the input files, never from here.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["PlotSpec", "RenderSummary", "SchemaError", "render", "main", "entry"]

KINDS = ("density", "contraction", "intervals", "autocorr")

DENSITY_COLUMNS = ["point", "density", "atom_c_mass", "atom_d_mass"]


class SchemaError(ValueError):
    """An input file does not conform to the published postproj schema."""


@dataclass(frozen=True)
class PlotSpec:
    inputs: list[Path]
    kind: str
    out: Path
    title: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input file is required")
        for path in self.inputs:
            if not Path(path).exists():
                raise FileNotFoundError(f"input file does not exist: {path}")


@dataclass
class RenderSummary:
    """What was drawn; lets tests check spike behavior without pixel peeking."""

    kind: str
    out: Path
    panels: list[dict] = field(default_factory=list)


def read_density_csv(path: Path) -> dict:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file")
        for column in DENSITY_COLUMNS:
            if column not in header:
                raise SchemaError(f"{path}: missing required column {column!r}")
        idx = {column: header.index(column) for column in DENSITY_COLUMNS}
        points, density = [], []
        atom_c = atom_d = None
        for row in reader:
            points.append(float(row[idx["point"]]))
            density.append(float(row[idx["density"]]))
            atom_c = float(row[idx["atom_c_mass"]])
            atom_d = float(row[idx["atom_d_mass"]])
    if not points:
        raise SchemaError(f"{path}: no data rows")
    return {
        "points": np.asarray(points),
        "density": np.asarray(density),
        "atom_c_mass": atom_c,
        "atom_d_mass": atom_d,
        "name": Path(path).stem,
    }


def read_report_json(path: Path) -> dict:
    try:
        document = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    for key in ("command", "seed", "config", "results"):
        if key not in document:
            raise SchemaError(f"{path}: missing required key {key!r}")
    if "report" not in document["results"]:
        raise SchemaError(f"{path}: results carry no 'report' entry")
    return document


def _render_density(spec: PlotSpec, summary: RenderSummary) -> plt.Figure:
    grids = [read_density_csv(path) for path in spec.inputs]
    fig, axes = plt.subplots(1, len(grids), figsize=(4.2 * len(grids), 3.4), squeeze=False)
    for ax, grid in zip(axes[0], grids):
        ax.plot(grid["points"], grid["density"], color="tab:blue", lw=1.4)
        spikes = 0
        if grid["atom_c_mass"] > 0.0:
            ax.vlines(grid["points"][0], 0.0, grid["atom_c_mass"], color="tab:red", lw=2.5)
            spikes += 1
        if grid["atom_d_mass"] > 0.0:
            ax.vlines(grid["points"][-1], 0.0, grid["atom_d_mass"], color="tab:red", lw=2.5)
            spikes += 1
        ax.set_xlabel("parameter")
        ax.set_ylabel("density / atom mass")
        ax.set_title(grid["name"], fontsize=9)
        summary.panels.append(
            {
                "name": grid["name"],
                "atom_c_mass": grid["atom_c_mass"],
                "atom_d_mass": grid["atom_d_mass"],
                "spikes_drawn": spikes,
            }
        )
    return fig


def _render_contraction(spec: PlotSpec, summary: RenderSummary) -> plt.Figure:
    document = read_report_json(spec.inputs[0])
    report = document["results"]["report"]
    for key in ("n_values", "mass_outside_unconstrained", "mass_outside_projected"):
        if key not in report:
            raise SchemaError(f"{spec.inputs[0]}: report lacks {key!r}; not a contraction report")
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    n_values = report["n_values"]
    ax.plot(n_values, report["mass_outside_unconstrained"], "o-", label="unconstrained")
    ax.plot(n_values, report["mass_outside_projected"], "s-", label="projected")
    ax.set_xscale("log")
    ax.set_xlabel("sample size n")
    ax.set_ylabel(f"mass outside ball of radius {report.get('M', '?')} / sqrt(n)")
    ax.legend()
    summary.panels.append({"n_values": n_values})
    return fig


def _summary_report(path: Path) -> dict:
    document = read_report_json(path)
    report = document["results"]["report"]
    if "parameters" not in report:
        raise SchemaError(f"{path}: report lacks 'parameters'; not a summary report")
    return report


def _render_intervals(spec: PlotSpec, summary: RenderSummary) -> plt.Figure:
    report = _summary_report(spec.inputs[0])
    names = list(report["parameters"])
    widths = [report["parameters"][k]["ci_upper"] - report["parameters"][k]["ci_lower"] for k in names]
    truncated = report.get("extras", {}).get("truncated_parameters")
    fig, ax = plt.subplots(figsize=(max(5.0, 0.45 * len(names)), 3.8))
    positions = np.arange(len(names))
    bar_width = 0.38 if truncated else 0.7
    ax.bar(positions, widths, bar_width, label="projected")
    if truncated:
        t_widths = [
            truncated[k]["ci_upper"] - truncated[k]["ci_lower"] if k in truncated else 0.0
            for k in names
        ]
        ax.bar(positions + bar_width, t_widths, bar_width, label="truncated")
    ax.set_xticks(positions)
    ax.set_xticklabels(names, rotation=90, fontsize=7)
    ax.set_ylabel("credible interval width")
    ax.legend()
    summary.panels.append({"parameters": names, "truncated_included": bool(truncated)})
    return fig


def _render_autocorr(spec: PlotSpec, summary: RenderSummary) -> plt.Figure:
    report = _summary_report(spec.inputs[0])
    names = list(report["parameters"])
    rhos = [report["parameters"][k].get("lag1_autocorr") for k in names]
    rhos = [0.0 if r is None else r for r in rhos]
    fig, ax = plt.subplots(figsize=(max(5.0, 0.45 * len(names)), 3.6))
    positions = np.arange(len(names))
    ax.bar(positions, rhos, 0.7)
    n_draws = report.get("extras", {}).get("n_draws")
    if n_draws:
        band = 3.0 / np.sqrt(float(n_draws))
        ax.axhline(band, color="tab:red", ls="--", lw=0.9)
        ax.axhline(-band, color="tab:red", ls="--", lw=0.9)
    ax.set_xticks(positions)
    ax.set_xticklabels(names, rotation=90, fontsize=7)
    ax.set_ylabel("lag-1 autocorrelation")
    summary.panels.append({"parameters": names, "band": bool(n_draws)})
    return fig


_RENDERERS = {
    "density": _render_density,
    "contraction": _render_contraction,
    "intervals": _render_intervals,
    "autocorr": _render_autocorr,
}


def render(spec: PlotSpec) -> RenderSummary:
    """Draw the requested figure and write it to ``spec.out``."""
    summary = RenderSummary(kind=spec.kind, out=Path(spec.out))
    fig = _RENDERERS[spec.kind](spec, summary)
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    fig.savefig(spec.out, dpi=130)
    plt.close(fig)
    return summary


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="postproj-plot", description=__doc__)
    parser.add_argument("--input", action="append", required=True, help="input file; repeatable")
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--title", default=None)
    try:
        args = parser.parse_args(list(sys.argv[1:]) if argv is None else list(argv))
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        spec = PlotSpec(
            inputs=[Path(p) for p in args.input],
            kind=args.kind,
            out=Path(args.out),
            title=args.title,
        )
        summary = render(spec)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {summary.out}")
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
