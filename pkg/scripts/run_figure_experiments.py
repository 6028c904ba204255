#!/usr/bin/env python3
"""Produce the CSV artifacts behind the three standard figures.

Writes under --outdir (default runs/):
  convergence/{qipa,qite}/trace.csv   -- H15 at equal dtau, for the overlay
  amplitudes/point_*/solutions.csv    -- H15 top-2 amplitudes across a dtau grid
  dissociation/sweep.csv              -- H2/STO-3G energy and error vs bond length

The companion plotting tool consumes these files; it never imports this
package, so the artifacts are the entire interface.
"""

import argparse
import subprocess
import sys
from pathlib import Path

from qipa.cli import ExperimentConfig, run_sweep, run_experiment

REPO = Path(__file__).resolve().parent.parent

H15_BASE = {
    "problem": {"kind": "biprime", "N": 15},
    "ansatz": {"family": "Y", "layers": 4, "theta0": "plus-perturbed"},
    "method": "qipa_exact",
    "solver": {
        "dtau": 0.05,
        "tau_total": 60.0,
        "energy_shift": "auto",
        "flow_scale": "auto",
        "convergence": {"kind": "energy_threshold", "threshold": 0.5},
    },
}


def convergence_traces(outdir: Path) -> None:
    for method in ("qipa_exact", "qite"):
        cfg = dict(H15_BASE, method=method, output=str(outdir / "convergence" / method))
        run_experiment(ExperimentConfig.from_dict(cfg))


def amplitude_grid(outdir: Path) -> None:
    cfg = dict(H15_BASE, output=str(outdir / "amplitudes"))
    cfg["solver"] = dict(
        cfg["solver"],
        tau_total=14.0,
        convergence={"kind": "energy_change", "eps_step": 1e-12, "window": 5},
    )
    run_sweep(ExperimentConfig.from_dict(cfg), "dtau", [0.35, 0.1, 0.01])


def dissociation(outdir: Path, bonds) -> None:
    files = []
    for r in bonds:
        subprocess.run(
            [
                sys.executable,
                str(REPO / "scripts" / "make_h2_hamiltonian.py"),
                "--bond",
                f"{r}",
                "--outdir",
                str(outdir / "h2"),
            ],
            check=True,
        )
        files.append(str(outdir / "h2" / f"h2_r{r:.2f}.txt"))
    cfg = {
        "problem": {"kind": "pauli_file", "path": files[0]},
        "ansatz": {"family": "Y", "layers": 3, "theta0": "plus-perturbed"},
        "method": "qipa_exact",
        "solver": {
            "dtau": 0.02,
            "tau_total": 40.0,
            "energy_shift": "auto",
            "flow_scale": "auto",
            "convergence": {"kind": "energy_change", "eps_step": 1e-10, "window": 5},
        },
        "output": str(outdir / "dissociation"),
    }
    run_sweep(ExperimentConfig.from_dict(cfg), "bond_file", files)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default=str(REPO / "runs"))
    ap.add_argument(
        "--bonds",
        type=float,
        nargs="+",
        default=[0.5, 0.6, 0.74, 0.9, 1.1, 1.4],
        help="H2 bond lengths in angstrom",
    )
    args = ap.parse_args()
    outdir = Path(args.outdir)
    convergence_traces(outdir)
    amplitude_grid(outdir)
    dissociation(outdir, args.bonds)
    print(f"artifacts under {outdir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
