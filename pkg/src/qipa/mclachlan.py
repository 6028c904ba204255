"""Assembly of the A matrix and C vector for imaginary-time (single
exponential) and iterative-power (concatenated exponential) flows, plus the
exact dense-matrix oracle propagator for the whole oracle family."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .circuits import (
    AnsatzCircuit,
    HadamardVariant,
    apply,
    build_hadamard_test_A,
    build_hadamard_test_C,
    derivative_state,
    simulate_hadamard_test,
)
from .pauli import DEFAULT_DENSE_LIMIT, Observable

__all__ = [
    "OracleSpec",
    "EvaluationMode",
    "McLachlanSystem",
    "assemble_A",
    "assemble_C_qite",
    "assemble_C_qipa",
    "assemble_C_exact",
    "exact_propagate",
    "energy",
    "oracle_energy",
    "estimate_resources",
    "spectral_norm_bound",
]


@dataclass(frozen=True)
class OracleSpec:
    """Concatenated-exponential cooling function of depth n.

    n=1, a=(1,) is plain imaginary time evolution; n=2, a=(1,1) is the
    double exponential."""

    n: int = 2
    a: tuple[float, ...] = (1.0, 1.0)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("oracle depth must be >= 1")
        if len(self.a) != self.n:
            raise ValueError("need one constant per nesting level")
        if any(c == 0.0 for c in self.a):
            raise ValueError("oracle constants must be nonzero")

    @staticmethod
    def qite() -> "OracleSpec":
        return OracleSpec(1, (1.0,))

    @staticmethod
    def double_exponential() -> "OracleSpec":
        return OracleSpec(2, (1.0, 1.0))

    def alpha_scalar(self, y: np.ndarray) -> np.ndarray:
        """alpha_n evaluated elementwise on real arguments."""
        val = np.asarray(y, dtype=float)
        with np.errstate(over="ignore"):
            for ak in self.a:
                val = np.exp(ak * val)
        return val

    def log_alpha_scalar(self, y: np.ndarray) -> np.ndarray:
        """log(alpha_n(y)); the outermost exponential is kept in log space."""
        val = np.asarray(y, dtype=float)
        with np.errstate(over="ignore"):
            for ak in self.a[:-1]:
                val = np.exp(ak * val)
        return self.a[-1] * val

    def inner_sum_scalar(self, y: np.ndarray) -> np.ndarray:
        """S_{n-1}(y) = sum_{k=1..n-1} a_k alpha_{k-1}(y)."""
        val = np.asarray(y, dtype=float)
        total = np.zeros_like(val)
        alpha = val  # alpha_0
        with np.errstate(over="ignore"):
            for k in range(self.n - 1):
                total = total + self.a[k] * alpha
                alpha = np.exp(self.a[k] * alpha)
        return total

    def product_a(self) -> float:
        return float(np.prod(self.a))


class EvaluationMode:
    """How A/C entries are computed.

    DIRECT uses inner products of derivative statevectors; HADAMARD_EXACT
    uses exact Born probabilities of the Hadamard-test circuits;
    hadamard_shots(shots, seed) samples them."""

    DIRECT = "direct"
    HADAMARD_EXACT = "hadamard_exact"

    def __init__(self, kind: str, shots: int | None = None, seed: int = 0):
        self.kind = kind
        self.shots = shots
        self.seed = seed

    @staticmethod
    def direct() -> "EvaluationMode":
        return EvaluationMode(EvaluationMode.DIRECT)

    @staticmethod
    def hadamard_exact() -> "EvaluationMode":
        return EvaluationMode(EvaluationMode.HADAMARD_EXACT)

    @staticmethod
    def hadamard_shots(shots: int, seed: int = 0) -> "EvaluationMode":
        return EvaluationMode("hadamard_shots", shots=shots, seed=seed)

    @property
    def uses_hadamard(self) -> bool:
        return self.kind != EvaluationMode.DIRECT


@dataclass
class McLachlanSystem:
    """One time step's linear system and diagnostics."""

    A: np.ndarray
    C: np.ndarray
    E1: float
    E2: float | None
    tau: float

    def condition_estimate(self) -> float:
        w = np.linalg.eigvalsh(self.A)
        lo = max(w.min(), 1e-300)
        return float(w.max() / lo)

    def to_record(self) -> dict:
        return {
            "tau": self.tau,
            "E1": self.E1,
            "E2": self.E2,
            "A": self.A.tolist(),
            "C": self.C.tolist(),
            "condition_estimate": self.condition_estimate(),
        }


def _derivative_states(circuit: AnsatzCircuit, theta) -> np.ndarray:
    return np.stack(
        [derivative_state(circuit, theta, k) for k in range(circuit.n_params)]
    )


def assemble_A(
    circuit: AnsatzCircuit, theta, mode: EvaluationMode | None = None
) -> np.ndarray:
    """A_{k,m} = Re <d_k phi | d_m phi>; symmetric, PSD, diagonal 1/4 for
    Pauli-generated rotations.  Only k <= m entries are evaluated."""
    mode = mode or EvaluationMode.direct()
    nt = circuit.n_params
    if not mode.uses_hadamard:
        d = _derivative_states(circuit, theta)
        a = np.real(d.conj() @ d.T)
        return (a + a.T) / 2.0
    a = np.full((nt, nt), 0.0)
    seed = mode.seed
    for k in range(nt):
        a[k, k] = 0.25  # generator is a Pauli word: Ubar_k = Ubar_k
        for m in range(k + 1, nt):
            htc = build_hadamard_test_A(circuit, theta, k, m)
            p0 = simulate_hadamard_test(htc, shots=mode.shots, seed=seed)
            seed += 1
            a[k, m] = a[m, k] = 0.25 * (2.0 * p0 - 1.0)
    return a


def _assemble_C_for_operator(
    circuit: AnsatzCircuit, theta, op: Observable, mode: EvaluationMode
) -> np.ndarray:
    """C_k = -Re <d_k phi| op |phi> for a Hermitian operator given as a
    simplified Pauli sum."""
    nt = circuit.n_params
    if not mode.uses_hadamard:
        phi = apply(circuit, theta)
        w = op.apply_state(phi)
        d = _derivative_states(circuit, theta)
        return -np.real(d.conj() @ w)
    c = np.zeros(nt)
    seed = mode.seed + 10_000_019
    for k in range(nt):
        acc = 0.0
        for coeff, word in op.terms:
            htc = build_hadamard_test_C(
                circuit, theta, k, word, HadamardVariant.IMAGINARY
            )
            p0 = simulate_hadamard_test(htc, shots=mode.shots, seed=seed)
            seed += 1
            acc += coeff.real * (2.0 * p0 - 1.0)
        c[k] = 0.5 * acc
    return c


def assemble_C_qite(
    circuit: AnsatzCircuit, theta, h: Observable, mode: EvaluationMode | None = None
) -> np.ndarray:
    """C_k = -Re <d_k phi| H |phi> = -(1/2) dE/d theta_k."""
    if h.n_qubits != circuit.n_qubits:
        raise ValueError("Hamiltonian and circuit qubit counts differ")
    if not h.is_hermitian():
        raise ValueError("Hamiltonian must be Hermitian")
    return _assemble_C_for_operator(circuit, theta, h, mode or EvaluationMode.direct())


def taylor_operator(h: Observable, tau: float, taylor_order: int) -> Observable:
    """H * sum_{j<=order} (-H tau)^j / j!, simplified: the truncated
    H e^{-H tau} used by the double-exponential C vector."""
    if taylor_order not in (1, 2, 3):
        raise ValueError("taylor_order must be 1, 2, or 3")
    out = Observable.zero(h.n_qubits)
    power = h  # H^{j+1}
    fact = 1.0
    for j in range(taylor_order + 1):
        if j > 0:
            fact *= j
            power = (power @ h).simplify()
        out = out + ((-tau) ** j / fact) * power
    return out.simplify()


def assemble_C_qipa(
    circuit: AnsatzCircuit,
    theta,
    h: Observable,
    tau: float,
    taylor_order: int = 2,
    mode: EvaluationMode | None = None,
) -> np.ndarray:
    """C_k = -Re <d_k phi| H T(tau) |phi> with T the Taylor truncation of
    e^{-H tau}; identical to the plain imaginary-time C at tau = 0."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    if h.n_qubits != circuit.n_qubits:
        raise ValueError("Hamiltonian and circuit qubit counts differ")
    if not h.is_hermitian():
        raise ValueError("Hamiltonian must be Hermitian")
    norm_bound = spectral_norm_bound(h)
    if norm_bound * tau >= 2.0:
        warnings.warn(
            f"order-{taylor_order} Taylor expansion of exp(-H tau) is unreliable "
            f"for |H|*tau = {norm_bound * tau:.3g} >= 2; consider assemble_C_exact "
            "or an energy shift",
            RuntimeWarning,
            stacklevel=2,
        )
    op = taylor_operator(h, tau, taylor_order)
    return _assemble_C_for_operator(circuit, theta, op, mode or EvaluationMode.direct())


def spectral_norm_bound(h: Observable) -> float:
    """Cheap upper bound on the spectral norm: sum of |coefficients|."""
    return float(sum(abs(c) for c, _ in h.terms))


def _dense_eig(h: Observable, dense_limit: int):
    mat = h.to_dense(dense_limit)
    w, v = np.linalg.eigh(mat)
    return w, v


def assemble_C_exact(
    circuit: AnsatzCircuit,
    theta,
    h: Observable,
    tau: float,
    oracle: OracleSpec,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> np.ndarray:
    """Ground-truth C vector for the full oracle family, via dense
    eigendecomposition: C_k = -(prod a) Re <d_k phi| H exp(S_{n-1}(-H tau)) |phi>."""
    if not h.is_hermitian():
        raise ValueError("Hamiltonian must be Hermitian")
    w, v = _dense_eig(h, dense_limit)
    weights = w * np.exp(oracle.inner_sum_scalar(-w * tau))
    phi = apply(circuit, theta)
    op_phi = v @ (weights * (v.conj().T @ phi))
    d = _derivative_states(circuit, theta)
    return -oracle.product_a() * np.real(d.conj() @ op_phi)


def exact_propagate(
    h: Observable,
    psi0: np.ndarray,
    tau: float,
    oracle: OracleSpec,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> np.ndarray:
    """alpha_n(-H tau)|psi0>, normalized, via eigendecomposition.

    The outermost exponential is evaluated in log space so that strongly
    amplified components do not overflow before normalization."""
    w, v = _dense_eig(h, dense_limit)
    coeffs = v.conj().T @ np.asarray(psi0, dtype=complex)
    log_weights = oracle.log_alpha_scalar(-w * tau)
    finite = np.isfinite(log_weights)
    if not finite.any():
        raise FloatingPointError("oracle weights overflowed for every eigenvalue")
    if not finite.all():
        # limit case: overflowed components dominate everything else
        scaled = np.where(finite, 0.0, 1.0)
    else:
        scaled = np.exp(log_weights - log_weights.max())
    out = v @ (scaled * coeffs)
    norm = np.linalg.norm(out)
    if norm == 0.0:
        raise ValueError("initial state has no overlap with surviving eigenspace")
    ground = np.abs(coeffs[np.isclose(w, w.min(), atol=1e-12)]).max()
    if ground < 1e-12:
        warnings.warn(
            "initial state has (near-)zero overlap with the ground space; "
            "the oracle flow cannot reach the global minimum",
            RuntimeWarning,
            stacklevel=2,
        )
    return out / norm


def energy(circuit: AnsatzCircuit, theta, h: Observable) -> float:
    """E1 = <phi|H|phi>."""
    if not h.is_hermitian():
        raise ValueError("Hamiltonian must be Hermitian")
    phi = apply(circuit, theta)
    return float(h.expectation(phi).real)


def oracle_energy(
    circuit: AnsatzCircuit,
    theta,
    h: Observable,
    tau: float,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> float:
    """E2 = <phi| H e^{-H tau} |phi>, evaluated exactly via the dense oracle."""
    if not h.is_hermitian():
        raise ValueError("Hamiltonian must be Hermitian")
    w, v = _dense_eig(h, dense_limit)
    phi = apply(circuit, theta)
    coeffs = v.conj().T @ phi
    with np.errstate(over="ignore"):
        weights = w * np.exp(-w * tau)
    return float(np.real(np.sum(np.abs(coeffs) ** 2 * weights)))


def assemble_system(
    circuit: AnsatzCircuit,
    theta,
    h: Observable,
    tau: float,
    c_vector: np.ndarray,
    mode: EvaluationMode | None = None,
    with_e2: bool = False,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> McLachlanSystem:
    a = assemble_A(circuit, theta, mode)
    e1 = energy(circuit, theta, h)
    e2 = oracle_energy(circuit, theta, h, tau, dense_limit) if with_e2 else None
    return McLachlanSystem(A=a, C=np.asarray(c_vector, dtype=float), E1=e1, E2=e2, tau=tau)


def estimate_resources(n_theta: int, n_h: int, taylor_order: int = 2) -> dict:
    """Measurement and gate-count lower bounds for one time step."""
    if n_theta < 1 or n_h < 1:
        raise ValueError("inputs must be positive")
    if taylor_order not in (1, 2, 3):
        raise ValueError("taylor_order must be 1, 2, or 3")
    g_c = sum(n_h**j for j in range(1, taylor_order + 2)) + n_theta
    return {
        "N_A_measurements": n_theta * (n_theta - 1) // 2,
        "N_C_measurements": n_theta,
        "G_NA_lower_bound": n_theta,
        "G_NC_lower_bound": g_c,
        "asymptotics": {
            "N_A": "O(N^d)",
            "N_C": "O(N^max(3h,d))",
            "note": "N_H = O(N^h) Hamiltonian words, N_theta = O(N^d) parameters",
        },
    }
