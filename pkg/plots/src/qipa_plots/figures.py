"""Render figures from solver CSV artifacts.

Three figure kinds are supported:

  convergence_overlay   energy vs iteration for several runs (trace.csv)
  dissociation_curve    energy + |error| vs bond length (sweep.csv)
  amplitude_bars        top basis-state magnitudes per run (solutions.csv)

Each render writes the image plus a sidecar ``<image>.manifest.json``
describing exactly what was plotted, so a pipeline can verify figure
contents without pixel inspection.  Output is deterministic for
identical inputs.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# Column contracts of the producing CLI.  Kept verbatim rather than
# imported: schema drift between packages must fail loudly here.
TRACE_COLUMNS = [
    "step", "tau", "E1", "E2", "C_norm", "cg_iters", "cg_residual", "fidelity",
]
SWEEP_COLUMNS = [
    "value", "status", "exit_code", "final_energy", "error_vs_exact", "steps",
    "artifacts",
]
SOLUTIONS_COLUMNS = ["basis_index", "amplitude", "label"]

KINDS = ("convergence_overlay", "dissociation_curve", "amplitude_bars")

# Per-format metadata to suppress: timestamps and tool versions are the
# only non-deterministic bytes matplotlib emits.
_STRIP_METADATA = {".svg": {"Date": None}, ".png": {"Software": None}}


class SchemaError(ValueError):
    """A CSV input does not match its documented column contract."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: what to draw, from which files, to where."""

    kind: str
    inputs: tuple[str, ...]
    out: str
    labels: tuple[str, ...] = ()
    title: str = ""
    log_errors: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r} (one of {KINDS})")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")
        if self.labels and len(self.labels) != len(self.inputs):
            raise ValueError(
                f"{len(self.labels)} labels for {len(self.inputs)} inputs"
            )


def read_rows(path, expected_columns) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path}: no such file")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        if header != expected_columns:
            raise SchemaError(
                f"{path}: columns {header} do not match the documented schema "
                f"{expected_columns}; refusing to guess"
            )
        return list(reader)


def _labels(spec: FigureSpec) -> list[str]:
    if spec.labels:
        return list(spec.labels)
    return [Path(p).resolve().parent.name for p in spec.inputs]


def _numeric_value(raw: str) -> float:
    """Sweep 'value' entries are numbers for dtau/flux grids but file paths
    for bond sweeps; in the latter case the bond length is the number
    embedded in the file name (e.g. h2_r0.74.txt)."""
    try:
        return float(raw)
    except ValueError:
        numbers = re.findall(r"\d+(?:\.\d+)?", Path(raw).stem)
        if numbers:
            return float(numbers[-1])
        raise SchemaError(f"cannot extract a numeric sweep value from {raw!r}")


def _new_figure(n_axes: int):
    fig, axes = plt.subplots(
        1, n_axes, figsize=(4.8 * n_axes, 3.6), constrained_layout=True
    )
    return fig, ([axes] if n_axes == 1 else list(axes))


def _convergence_overlay(spec: FigureSpec):
    fig, (ax,) = _new_figure(1)
    series = []
    for path, label in zip(spec.inputs, _labels(spec)):
        rows = read_rows(path, TRACE_COLUMNS)
        steps = [int(r["step"]) for r in rows]
        e1 = [float(r["E1"]) for r in rows]
        ax.plot(steps, e1, label=label, linewidth=1.5)
        series.append({"label": label, "source": str(path), "n_points": len(rows)})
    ax.set_xlabel("iteration")
    ax.set_ylabel("energy $E_1$")
    ax.legend()
    return fig, series


def _dissociation_curve(spec: FigureSpec):
    if len(spec.inputs) != 1:
        raise ValueError("dissociation_curve takes exactly one sweep.csv")
    (path,) = spec.inputs
    rows = read_rows(path, SWEEP_COLUMNS)
    points, skipped = [], []
    for r in rows:
        try:
            x = _numeric_value(r["value"])
            e = float(r["final_energy"])
            err = abs(float(r["error_vs_exact"]))
        except (SchemaError, ValueError):
            skipped.append(r["value"])
            continue
        points.append((x, e, err))
    if not points:
        raise SchemaError(f"{path}: no plottable rows (all failed or non-numeric)")
    points.sort()
    xs, es, errs = zip(*points)

    fig, (ax_e, ax_err) = _new_figure(2)
    label = _labels(spec)[0]
    ax_e.plot(xs, es, "o-", label=label)
    ax_e.set_xlabel("bond length")
    ax_e.set_ylabel("final energy")
    ax_err.plot(xs, errs, "s-", color="tab:red", label="|error| vs dense ground")
    ax_err.set_xlabel("bond length")
    ax_err.set_ylabel("absolute error")
    if spec.log_errors:
        ax_err.set_yscale("log")
    ax_e.legend()
    ax_err.legend()
    series = [
        {
            "label": label,
            "source": str(path),
            "n_points": len(points),
            "skipped_rows": skipped,
        }
    ]
    return fig, series


def _amplitude_bars(spec: FigureSpec):
    runs = []
    for path, label in zip(spec.inputs, _labels(spec)):
        rows = read_rows(path, SOLUTIONS_COLUMNS)
        runs.append(
            (
                label,
                str(path),
                {int(r["basis_index"]): (float(r["amplitude"]), r["label"]) for r in rows},
            )
        )
    indices = sorted({i for _, _, data in runs for i in data})
    width = 0.8 / len(runs)

    fig, (ax,) = _new_figure(1)
    series = []
    for j, (label, source, data) in enumerate(runs):
        xs = [k + j * width for k in range(len(indices))]
        ys = [data.get(i, (0.0, ""))[0] for i in indices]
        ax.bar(xs, ys, width=width, label=label)
        series.append({"label": label, "source": source, "n_points": len(data)})
    ticks, names = [], []
    for k, i in enumerate(indices):
        decoded = next(
            (data[i][1] for _, _, data in runs if i in data and data[i][1]), ""
        )
        ticks.append(k + 0.4 - width / 2)
        names.append(f"|{i}⟩" + (f"\n{decoded}" if decoded else ""))
    ax.set_xticks(ticks, names)
    ax.set_ylabel("amplitude magnitude")
    ax.legend()
    return fig, series


_RENDERERS = {
    "convergence_overlay": _convergence_overlay,
    "dissociation_curve": _dissociation_curve,
    "amplitude_bars": _amplitude_bars,
}


def render(spec: FigureSpec) -> Path:
    """Draw the figure, write image + manifest, return the image path."""
    plt.rcParams["svg.hashsalt"] = "qipa-plots"
    fig, series = _RENDERERS[spec.kind](spec)
    if spec.title:
        fig.suptitle(spec.title)
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150, metadata=_STRIP_METADATA.get(out.suffix.lower(), {}))
    plt.close(fig)
    manifest = {
        "kind": spec.kind,
        "image": out.name,
        "title": spec.title,
        "log_errors": spec.log_errors,
        "series": series,
    }
    Path(str(out) + ".manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n"
    )
    return out
