"""Conjugate-gradient solution of A theta_dot = C, Euler stepping,
convergence criteria, and the full evolution driver."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .circuits import AnsatzCircuit, apply
from .mclachlan import (
    EvaluationMode,
    OracleSpec,
    assemble_A,
    assemble_C_exact,
    assemble_C_qipa,
    assemble_C_qite,
    energy,
    exact_propagate,
    oracle_energy,
    spectral_norm_bound,
)
from .pauli import DEFAULT_DENSE_LIMIT, Observable

__all__ = [
    "Method",
    "ConvergenceRule",
    "SolverConfig",
    "StepRecord",
    "EvolutionTrace",
    "TerminalStatus",
    "cg_solve",
    "CGResult",
    "euler_step",
    "evolve",
    "extract_solutions",
    "trace_to_csv",
    "trace_from_csv",
]


class Method(str, Enum):
    QITE = "qite"
    QIPA = "qipa"  # Taylor-truncated C
    QIPA_EXACT = "qipa_exact"  # dense-oracle C, double exponential
    GENERAL = "general"  # dense-oracle C, arbitrary OracleSpec


class TerminalStatus(str, Enum):
    CONVERGED = "Converged"
    MAX_STEPS = "MaxSteps"
    DIVERGED = "Diverged"


@dataclass(frozen=True)
class ConvergenceRule:
    """Stop when the energy change over a trailing window stays below
    eps_step, or when E1 drops below an absolute threshold."""

    kind: str = "energy_change"  # energy_change | energy_threshold | max_steps
    eps_step: float = 1e-6
    window: int = 5
    threshold: float | None = None

    def met(self, e1_history: list[float]) -> bool:
        if self.kind == "max_steps":
            return False
        if self.kind == "energy_threshold":
            return bool(e1_history) and e1_history[-1] <= self.threshold
        if len(e1_history) <= self.window:
            return False
        recent = e1_history[-(self.window + 1) :]
        return max(recent) - min(recent) < self.eps_step


@dataclass
class SolverConfig:
    dtau: float = 0.01
    tau_total: float = 10.0
    cg_tol: float = 1e-6
    cg_max_iter: int | None = None  # default 10 * n_params
    regularization: float = 0.0
    convergence: ConvergenceRule = field(default_factory=ConvergenceRule)
    taylor_order: int = 2
    oracle: OracleSpec = field(default_factory=OracleSpec.double_exponential)
    mode: EvaluationMode = field(default_factory=EvaluationMode.direct)
    seed: int = 0
    energy_shift: float | str = 0.0  # "auto" = identity coefficient of H
    flow_scale: float | str = 1.0  # "auto" = 1 / coefficient-norm of shifted H
    track_fidelity: bool = False
    dense_limit: int = DEFAULT_DENSE_LIMIT

    def __post_init__(self):
        if self.dtau <= 0:
            raise ValueError("dtau must be positive")
        if self.tau_total < self.dtau:
            raise ValueError("tau_total must be at least one step")

    @property
    def n_steps(self) -> int:
        return math.ceil(self.tau_total / self.dtau - 1e-12)


@dataclass
class StepRecord:
    step: int
    tau: float
    theta: np.ndarray
    E1: float
    E2: float | None
    C_norm: float | None
    cg_iters: int | None
    cg_residual: float | None
    fidelity: float | None


@dataclass
class EvolutionTrace:
    records: list[StepRecord]
    status: TerminalStatus
    method: Method
    config: SolverConfig

    @property
    def final_theta(self) -> np.ndarray:
        return self.records[-1].theta

    @property
    def final_energy(self) -> float:
        return self.records[-1].E1

    @property
    def n_steps(self) -> int:
        return len(self.records) - 1

    def steps_to_threshold(self, threshold: float) -> int | None:
        for rec in self.records:
            if rec.E1 <= threshold:
                return rec.step
        return None

    def energies(self) -> np.ndarray:
        return np.array([r.E1 for r in self.records])


@dataclass
class CGResult:
    x: np.ndarray
    residual: float
    iterations: int
    stagnated: bool = False


def cg_solve(
    a: np.ndarray,
    c: np.ndarray,
    tol: float = 1e-6,
    max_iter: int | None = None,
    lam: float = 0.0,
) -> CGResult:
    """Conjugate gradients on (A + lam I) x = C; never forms an inverse.

    Returns the best iterate with its recomputed residual; flags stagnation
    when the residual fails to improve over len(C) consecutive iterations."""
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    if a.shape[0] != a.shape[1] or a.shape[0] != c.shape[0]:
        raise ValueError("shape mismatch")
    if not np.allclose(a, a.T, atol=1e-10):
        raise ValueError("A must be symmetric")
    if lam < 0:
        raise ValueError("regularization must be non-negative")
    if not (np.isfinite(a).all() and np.isfinite(c).all()):
        raise ValueError("non-finite entries in CG inputs")
    n = c.shape[0]
    if max_iter is None:
        max_iter = 10 * n

    def matvec(v):
        return a @ v + lam * v

    x = np.zeros(n)
    r = c - matvec(x)
    p = r.copy()
    rs = float(r @ r)
    target = tol * max(1.0, float(np.linalg.norm(c)))
    best_x, best_res = x.copy(), math.sqrt(rs)
    since_improvement = 0
    iters = 0
    for iters in range(1, max_iter + 1):
        if math.sqrt(rs) <= target:
            iters -= 1
            break
        ap = matvec(p)
        denom = float(p @ ap)
        if denom <= 0.0:  # direction of (numerically) zero curvature
            break
        alpha = rs / denom
        x = x + alpha * p
        r = r - alpha * ap
        rs_new = float(r @ r)
        res = math.sqrt(rs_new)
        if res < best_res:
            best_x, best_res = x.copy(), res
            since_improvement = 0
        else:
            since_improvement += 1
            if since_improvement >= n:
                return CGResult(best_x, _true_residual(a, lam, best_x, c), iters, True)
        p = r + (rs_new / rs) * p
        rs = rs_new
    return CGResult(best_x, _true_residual(a, lam, best_x, c), iters, False)


def _true_residual(a, lam, x, c) -> float:
    return float(np.linalg.norm(a @ x + lam * x - c))


def euler_step(theta: np.ndarray, xi: np.ndarray, dtau: float) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if theta.shape != xi.shape:
        raise ValueError("length mismatch")
    return theta + xi * dtau


def _resolve_shift(h: Observable, shift: float | str) -> float:
    if shift == "auto":
        return float(h.identity_coefficient().real)
    return float(shift)


def evolve(
    h: Observable,
    circuit: AnsatzCircuit,
    theta0,
    config: SolverConfig,
    method: Method | str = Method.QITE,
) -> EvolutionTrace:
    """Run the Hadamard-test / CG / Euler loop until convergence or tau_total.

    E1 is always reported for the unshifted Hamiltonian; the configured
    energy shift only affects the flow's C vector (it cancels exactly for
    the single-exponential method)."""
    method = Method(method)
    if h.n_qubits != circuit.n_qubits:
        raise ValueError("Hamiltonian and ansatz qubit counts differ")
    theta = np.asarray(theta0, dtype=float).copy()
    if theta.shape != (circuit.n_params,):
        raise ValueError("theta0 length mismatch")

    shift = _resolve_shift(h, config.energy_shift)
    h_flow = (h - Observable.identity(h.n_qubits, shift)).simplify() if shift else h
    scale = config.flow_scale
    if scale == "auto":
        scale = 1.0 / max(spectral_norm_bound(h_flow), 1e-300)
    if scale <= 0:
        raise ValueError("flow_scale must be positive")
    if scale != 1.0:
        h_flow = (scale * h_flow).simplify()
    track_e2 = method != Method.QITE
    psi0 = apply(circuit, theta) if config.track_fidelity else None

    def c_vector(th, tau):
        if method == Method.QITE:
            return assemble_C_qite(circuit, th, h_flow, config.mode)
        if method == Method.QIPA:
            return assemble_C_qipa(
                circuit, th, h_flow, tau, config.taylor_order, config.mode
            )
        oracle = (
            OracleSpec.double_exponential()
            if method == Method.QIPA_EXACT
            else config.oracle
        )
        return assemble_C_exact(
            circuit, th, h_flow, tau, oracle, dense_limit=config.dense_limit
        )

    def fidelity(th, tau):
        if psi0 is None or tau == 0.0:
            return 1.0 if psi0 is not None else None
        oracle = (
            OracleSpec.qite()
            if method == Method.QITE
            else (
                config.oracle
                if method == Method.GENERAL
                else OracleSpec.double_exponential()
            )
        )
        ref = exact_propagate(h_flow, psi0, tau, oracle, config.dense_limit)
        return float(abs(np.vdot(apply(circuit, th), ref)))

    records: list[StepRecord] = []
    e1_history: list[float] = []
    status = TerminalStatus.MAX_STEPS
    tau = 0.0
    pending_theta = False  # theta advanced past the last recorded point
    for step in range(config.n_steps):
        e1 = energy(circuit, theta, h)
        e2 = (
            oracle_energy(circuit, theta, h_flow, tau, config.dense_limit)
            if track_e2
            else None
        )
        if not np.isfinite(e1):
            status = TerminalStatus.DIVERGED
            break
        c = c_vector(theta, tau)
        a = assemble_A(circuit, theta, config.mode)
        if not (np.isfinite(a).all() and np.isfinite(c).all()):
            records.append(
                StepRecord(step, tau, theta.copy(), e1, e2, None, None, None,
                           fidelity(theta, tau))
            )
            status = TerminalStatus.DIVERGED
            break
        cg = cg_solve(
            a, c, tol=config.cg_tol, max_iter=config.cg_max_iter,
            lam=config.regularization,
        )
        if cg.stagnated or cg.residual > config.cg_tol * max(1.0, float(np.linalg.norm(c))):
            # A is only positive semi-definite; retry with a small ridge
            cg = cg_solve(
                a, c, tol=config.cg_tol, max_iter=config.cg_max_iter,
                lam=max(config.regularization, 1e-8),
            )
        records.append(
            StepRecord(
                step, tau, theta.copy(), e1, e2,
                float(np.linalg.norm(c)), cg.iterations, cg.residual,
                fidelity(theta, tau),
            )
        )
        pending_theta = False
        e1_history.append(e1)
        if config.convergence.met(e1_history):
            status = TerminalStatus.CONVERGED
            break
        theta = euler_step(theta, cg.x, config.dtau)
        tau += config.dtau
        pending_theta = True

    if status != TerminalStatus.DIVERGED and pending_theta:
        e1 = energy(circuit, theta, h)
        if not np.isfinite(e1):
            status = TerminalStatus.DIVERGED
        else:
            e2 = (
                oracle_energy(circuit, theta, h_flow, tau, config.dense_limit)
                if track_e2
                else None
            )
            records.append(
                StepRecord(
                    len(records), tau, theta.copy(), e1, e2, None, None, None,
                    fidelity(theta, tau),
                )
            )
            e1_history.append(e1)
            if status == TerminalStatus.MAX_STEPS and config.convergence.met(e1_history):
                status = TerminalStatus.CONVERGED
    return EvolutionTrace(records, status, method, config)


def extract_solutions(
    state: np.ndarray, top_k: int = 2, decoder=None
) -> list[tuple[int, float, object]]:
    """Basis states by descending amplitude magnitude; ties break toward
    the lower basis index.  ``decoder`` maps an index to a label."""
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    mags = np.abs(np.asarray(state))
    order = sorted(range(mags.size), key=lambda i: (-mags[i], i))[:top_k]
    return [
        (i, float(mags[i]), decoder(i) if decoder is not None else None)
        for i in order
    ]


# -- trace serialization --------------------------------------------------------

CSV_COLUMNS = ["step", "tau", "E1", "E2", "C_norm", "cg_iters", "cg_residual", "fidelity"]


def trace_to_csv(trace: EvolutionTrace) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in trace.records:
        writer.writerow(
            [
                r.step,
                f"{r.tau:.12g}",
                f"{r.E1:.15g}",
                "" if r.E2 is None else f"{r.E2:.15g}",
                "" if r.C_norm is None else f"{r.C_norm:.15g}",
                "" if r.cg_iters is None else r.cg_iters,
                "" if r.cg_residual is None else f"{r.cg_residual:.6g}",
                "" if r.fidelity is None else f"{r.fidelity:.12g}",
            ]
        )
    return buf.getvalue()


def trace_from_csv(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_COLUMNS:
        raise ValueError(f"unexpected trace columns: {reader.fieldnames}")
    rows = []
    for row in reader:
        rows.append(
            {
                "step": int(row["step"]),
                "tau": float(row["tau"]),
                "E1": float(row["E1"]),
                "E2": float(row["E2"]) if row["E2"] else None,
                "C_norm": float(row["C_norm"]) if row["C_norm"] else None,
                "cg_iters": int(row["cg_iters"]) if row["cg_iters"] else None,
                "cg_residual": float(row["cg_residual"]) if row["cg_residual"] else None,
                "fidelity": float(row["fidelity"]) if row["fidelity"] else None,
            }
        )
    return rows


def theta_history_json(trace: EvolutionTrace) -> str:
    return json.dumps(
        {
            "status": trace.status.value,
            "method": trace.method.value,
            "theta": [r.theta.tolist() for r in trace.records],
            "tau": [r.tau for r in trace.records],
        },
        indent=2,
    )
