"""Configuration-driven experiment harness.

Subcommands: run, sweep, dump-encoding, estimate-resources,
build-hamiltonian.  Exit codes: 0 converged, 1 finished without meeting
the convergence criterion, 2 config error, 3 diverged.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .circuits import AnsatzCircuit, apply, build_ansatz
from .encoding import (
    BiprimeSpec,
    EncodingScheme,
    LevelEncoding,
    TransmonSpec,
    biprime_decode,
    build_biprime,
    build_transmon,
    cos_phi_matrix,
    encode_level_operator,
    jordan_wigner,
    load_integral_file,
    number_operator_matrix,
    sin_phi_matrix,
)
from .mclachlan import EvaluationMode, OracleSpec, estimate_resources
from .pauli import DenseLimitError, Observable, format_pauli_text, load_pauli_file
from .solver import (
    ConvergenceRule,
    EvolutionTrace,
    Method,
    SolverConfig,
    TerminalStatus,
    evolve,
    extract_solutions,
    theta_history_json,
    trace_to_csv,
)

EXIT_OK = 0
EXIT_UNCONVERGED = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3

DENSE_ORACLE_LIMIT = 12


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    problem: dict
    ansatz: dict = field(default_factory=lambda: {"family": "Y", "layers": 2, "theta0": "plus"})
    method: str = "qite"
    oracle: dict | None = None  # {"n": ..., "a": [...]} for method "general"
    solver: dict = field(default_factory=dict)
    output: str = "runs/out"
    shots: int | None = None
    seed: int = 0
    top_k: int = 2

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        known = {f for f in ExperimentConfig.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "problem" not in data:
            raise ConfigError("config requires a 'problem' section")
        return ExperimentConfig(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def load_config(path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return ExperimentConfig.from_dict(data)


def _scheme(name: str) -> EncodingScheme:
    try:
        return EncodingScheme(name.lower())
    except ValueError:
        raise ConfigError(f"unknown encoding scheme {name!r}") from None


def build_problem(problem: dict):
    """Returns (observable, basis-index decoder or None, description)."""
    kind = problem.get("kind")
    if kind == "biprime":
        try:
            spec = BiprimeSpec(int(problem["N"]))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad biprime problem: {exc}") from exc
        h = build_biprime(spec)
        return h, (lambda i: biprime_decode(spec, i)), f"biprime N={spec.N}"
    if kind == "transmon":
        try:
            spec = TransmonSpec(
                EC=float(problem.get("EC", 1.0)),
                EJ=float(problem.get("EJ", 1.0)),
                f=float(problem.get("f", 0.0)),
                d=int(problem.get("d", 4)),
            )
            enc = LevelEncoding(_scheme(problem.get("encoding", "gray")), spec.d)
        except ValueError as exc:
            raise ConfigError(f"bad transmon problem: {exc}") from exc
        return build_transmon(spec, enc), None, f"transmon f={spec.f} d={spec.d}"
    if kind == "pauli_file":
        path = problem.get("path")
        if not path or not Path(path).exists():
            raise ConfigError(f"pauli_file not found: {path}")
        return load_pauli_file(path), None, f"pauli_file {path}"
    if kind == "fermion_file":
        path = problem.get("path")
        if not path or not Path(path).exists():
            raise ConfigError(f"fermion_file not found: {path}")
        try:
            n_orb = int(problem["n_orbitals"])
        except (KeyError, ValueError) as exc:
            raise ConfigError("fermion_file requires n_orbitals") from exc
        fop = load_integral_file(path, n_orb)
        h = jordan_wigner(fop, n_orb)
        constant = float(problem.get("constant", 0.0))
        if constant:
            h = (h + Observable.identity(n_orb, constant)).simplify()
        return h, None, f"fermion_file {path}"
    raise ConfigError(f"unknown problem kind {kind!r}")


def resolve_ansatz(ansatz: dict, n_qubits: int) -> tuple[AnsatzCircuit, np.ndarray]:
    family = ansatz.get("family", "Y")
    layers = int(ansatz.get("layers", 2))
    try:
        circ = build_ansatz(family, n_qubits, layers)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    policy = ansatz.get("theta0", "plus")
    theta0 = np.zeros(circ.n_params)
    if policy == "zeros":
        pass
    elif policy == "plus":
        # first rotation layer at pi/2 prepares the uniform superposition
        theta0[:n_qubits] = np.pi / 2
    elif policy == "plus-perturbed":
        theta0[:n_qubits] = np.pi / 2
        sigma = float(ansatz.get("sigma", 0.01))
        seed = int(ansatz.get("perturb_seed", 7))
        theta0 += np.random.default_rng(seed).normal(0.0, sigma, circ.n_params)
    elif isinstance(policy, list):
        if len(policy) != circ.n_params:
            raise ConfigError(f"theta0 list needs {circ.n_params} entries")
        theta0 = np.asarray(policy, dtype=float)
    else:
        raise ConfigError(f"unknown theta0 policy {policy!r}")
    return circ, theta0


def resolve_solver(cfg: ExperimentConfig) -> SolverConfig:
    raw = dict(cfg.solver)
    conv = raw.pop("convergence", None)
    known = set(SolverConfig.__dataclass_fields__) - {"convergence", "mode", "oracle"}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown solver keys: {sorted(extra)}")
    kwargs = dict(raw)
    if conv is not None:
        kwargs["convergence"] = ConvergenceRule(**conv)
    if cfg.shots is not None:
        kwargs["mode"] = EvaluationMode.hadamard_shots(int(cfg.shots), cfg.seed)
    if cfg.method == "general":
        if not cfg.oracle:
            raise ConfigError("method 'general' requires an oracle section")
        kwargs["oracle"] = OracleSpec(int(cfg.oracle["n"]), tuple(cfg.oracle["a"]))
    kwargs["seed"] = cfg.seed
    try:
        return SolverConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad solver config: {exc}") from exc


def run_experiment(cfg: ExperimentConfig) -> int:
    h, decoder, description = build_problem(cfg.problem)
    circ, theta0 = resolve_ansatz(cfg.ansatz, h.n_qubits)
    solver_cfg = resolve_solver(cfg)
    try:
        method = Method(cfg.method)
    except ValueError:
        raise ConfigError(f"unknown method {cfg.method!r}") from None

    outdir = Path(cfg.output)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")

    trace = evolve(h, circ, theta0, solver_cfg, method)
    (outdir / "trace.csv").write_text(trace_to_csv(trace))
    (outdir / "theta_history.json").write_text(theta_history_json(trace))

    state = apply(circ, trace.final_theta)
    solutions = extract_solutions(state, cfg.top_k, decoder)
    if h.n_qubits <= DENSE_ORACLE_LIMIT:
        exact_ground = float(np.linalg.eigvalsh(h.to_dense()).min())
    else:
        exact_ground = None
    summary = {
        "problem": description,
        "method": method.value,
        "status": trace.status.value,
        "steps": trace.n_steps,
        "final_energy": trace.final_energy,
        "exact_ground_energy": exact_ground if exact_ground is not None else "no oracle",
        "error_vs_exact": (trace.final_energy - exact_ground) if exact_ground is not None else "no oracle",
        "top_states": [
            {"basis_index": i, "amplitude": m, "label": None if lab is None else list(lab)}
            for i, m, lab in solutions
        ],
    }
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    with open(outdir / "solutions.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["basis_index", "amplitude", "label"])
        for i, m, lab in solutions:
            if lab is None:
                text = ""
            elif isinstance(lab, tuple) and len(lab) == 2:
                text = f"{lab[0]}x{lab[1]}"
            else:
                text = str(lab)
            writer.writerow([i, f"{m:.12g}", text])

    if trace.status == TerminalStatus.DIVERGED:
        return EXIT_DIVERGED
    if trace.status == TerminalStatus.CONVERGED:
        return EXIT_OK
    return EXIT_UNCONVERGED


# -- sweep --------------------------------------------------------------------

SWEEP_VARIABLES = {"dtau", "flux", "bond_file"}


def _apply_sweep_value(cfg: ExperimentConfig, variable: str, value) -> ExperimentConfig:
    if variable == "dtau":
        solver = dict(cfg.solver)
        solver["dtau"] = float(value)
        return replace(cfg, solver=solver)
    if variable == "flux":
        problem = dict(cfg.problem)
        problem["f"] = float(value)
        return replace(cfg, problem=problem)
    if variable == "bond_file":
        problem = dict(cfg.problem)
        problem["path"] = str(value)
        return replace(cfg, problem=problem)
    raise ConfigError(f"unknown sweep variable {variable!r} (one of {sorted(SWEEP_VARIABLES)})")


def _sweep_point(args):
    cfg, variable, value, outdir = args
    point_cfg = replace(
        _apply_sweep_value(cfg, variable, value), output=str(outdir)
    )
    try:
        code = run_experiment(point_cfg)
        summary = json.loads((Path(outdir) / "summary.json").read_text())
        return {
            "value": value,
            "status": summary["status"],
            "exit_code": code,
            "final_energy": summary["final_energy"],
            "error_vs_exact": summary["error_vs_exact"],
            "steps": summary["steps"],
            "artifacts": str(outdir),
        }
    except (ConfigError, OSError, DenseLimitError) as exc:
        return {
            "value": value, "status": f"Error: {exc}", "exit_code": EXIT_CONFIG,
            "final_energy": "", "error_vs_exact": "", "steps": "",
            "artifacts": str(outdir),
        }


def run_sweep(cfg: ExperimentConfig, variable: str, values, workers: int = 1) -> int:
    if not values:
        raise ConfigError("sweep requires at least one value")
    base = Path(cfg.output)
    base.mkdir(parents=True, exist_ok=True)
    jobs = [
        (cfg, variable, v, base / f"point_{i:03d}") for i, v in enumerate(values)
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    columns = ["value", "status", "exit_code", "final_energy", "error_vs_exact", "steps", "artifacts"]
    with open(base / "sweep.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return EXIT_OK if all(r["exit_code"] in (EXIT_OK, EXIT_UNCONVERGED) for r in rows) else EXIT_UNCONVERGED


# -- lightweight subcommands ----------------------------------------------------

_LEVEL_OPERATORS = {
    "N": number_operator_matrix,
    "cos": cos_phi_matrix,
    "sin": sin_phi_matrix,
}


def dump_encoding(operator: str, d: int, scheme: str) -> str:
    if operator not in _LEVEL_OPERATORS:
        raise ConfigError(f"operator must be one of {sorted(_LEVEL_OPERATORS)}")
    if d < 2 or d > 64 or d & (d - 1):
        raise ConfigError(f"d must be a power of two in [2, 64], got {d}")
    enc = LevelEncoding(_scheme(scheme), d)
    obs = encode_level_operator(_LEVEL_OPERATORS[operator](d), enc).simplify()
    return format_pauli_text(obs)


def build_hamiltonian_text(problem: dict) -> str:
    h, _, _ = build_problem(problem)
    return format_pauli_text(h)


# -- argument parsing -------------------------------------------------------------


def _add_config_arg(sub):
    sub.add_argument("config", help="JSON experiment config file")
    sub.add_argument("--output", help="override output directory")
    sub.add_argument("--method", help="override method")
    sub.add_argument("--dtau", type=float, help="override solver dtau")
    sub.add_argument("--seed", type=int, help="override seed")


def _load_with_overrides(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    if args.output:
        cfg = replace(cfg, output=args.output)
    if args.method:
        cfg = replace(cfg, method=args.method)
    if args.dtau is not None:
        solver = dict(cfg.solver)
        solver["dtau"] = args.dtau
        cfg = replace(cfg, solver=solver)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qipa", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    run_p = subs.add_parser("run", help="run one experiment from a config file")
    _add_config_arg(run_p)

    sweep_p = subs.add_parser("sweep", help="run an experiment over a grid of values")
    _add_config_arg(sweep_p)
    sweep_p.add_argument("--variable", required=True, choices=sorted(SWEEP_VARIABLES))
    sweep_p.add_argument("--values", required=True, nargs="+")
    sweep_p.add_argument("--workers", type=int, default=1)

    dump_p = subs.add_parser("dump-encoding", help="print a level-operator encoding as Pauli text")
    dump_p.add_argument("operator", choices=sorted(_LEVEL_OPERATORS))
    dump_p.add_argument("d", type=int)
    dump_p.add_argument("scheme", choices=[s.value for s in EncodingScheme])

    est_p = subs.add_parser("estimate-resources", help="Hadamard-test circuit counts per time step")
    est_p.add_argument("--n-params", type=int, required=True)
    est_p.add_argument("--n-terms", type=int, required=True)
    est_p.add_argument("--taylor-order", type=int, default=2)

    build_p = subs.add_parser("build-hamiltonian", help="write a problem Hamiltonian as Pauli text")
    build_p.add_argument("config", help="JSON file holding a problem section (or full config)")
    build_p.add_argument("--out", help="output path (default stdout)")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return run_experiment(_load_with_overrides(args))
        if args.command == "sweep":
            cfg = _load_with_overrides(args)
            values = [v for v in args.values]
            if args.variable == "dtau" or args.variable == "flux":
                values = [float(v) for v in values]
            return run_sweep(cfg, args.variable, values, workers=args.workers)
        if args.command == "dump-encoding":
            sys.stdout.write(dump_encoding(args.operator, args.d, args.scheme))
            return EXIT_OK
        if args.command == "estimate-resources":
            counts = estimate_resources(args.n_params, args.n_terms, args.taylor_order)
            sys.stdout.write(json.dumps(counts, indent=2) + "\n")
            return EXIT_OK
        if args.command == "build-hamiltonian":
            data = json.loads(Path(args.config).read_text())
            problem = data.get("problem", data)
            text = build_hamiltonian_text(problem)
            if args.out:
                Path(args.out).write_text(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DenseLimitError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
