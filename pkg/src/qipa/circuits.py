"""Parameterized ansatz circuits, statevector simulation, derivative states,
and ancilla-based Hadamard-test circuits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .pauli import PauliWord

__all__ = [
    "Gate",
    "AnsatzCircuit",
    "AnsatzFamily",
    "HadamardVariant",
    "HadamardTestCircuit",
    "apply",
    "derivative_state",
    "build_ansatz",
    "build_factor15_demo_ansatz",
    "build_hadamard_test_A",
    "build_hadamard_test_C",
    "simulate_hadamard_test",
    "emit_circuit",
]

_ROT_GENERATOR = {"RX": "X", "RY": "Y", "RZ": "Z"}


@dataclass(frozen=True)
class Gate:
    """One circuit element.

    Rotation kinds (RX/RY/RZ/PROT) carry exactly one parameter slot;
    CNOT/CZ/H/X carry none.  PROT is a Pauli-word rotation
    exp(-i*theta/2 * word); GPHASE multiplies by a fixed global phase
    (diagnostic use only).
    """

    kind: str
    targets: tuple[int, ...]
    param_slot: int | None = None
    word: PauliWord | None = None
    angle: float | None = None  # fixed angle for GPHASE

    def __post_init__(self):
        parameterized = self.kind in ("RX", "RY", "RZ", "PROT")
        if parameterized and self.param_slot is None:
            raise ValueError(f"{self.kind} gate requires a parameter slot")
        if not parameterized and self.param_slot is not None:
            raise ValueError(f"{self.kind} gate cannot take a parameter slot")
        if self.kind == "PROT" and self.word is None:
            raise ValueError("PROT gate requires a Pauli word")

    def generator(self) -> PauliWord:
        """The Pauli word g with gate = exp(-i*theta/2*g)."""
        if self.kind in _ROT_GENERATOR:
            return PauliWord.single(self.targets[0], _ROT_GENERATOR[self.kind])
        if self.kind == "PROT":
            return self.word
        raise ValueError(f"{self.kind} gate has no rotation generator")


class AnsatzFamily(str, Enum):
    Y = "Y"
    YZ = "YZ"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class AnsatzCircuit:
    n_qubits: int
    gates: tuple[Gate, ...]
    n_params: int
    family: AnsatzFamily = AnsatzFamily.CUSTOM

    def __post_init__(self):
        slots = [g.param_slot for g in self.gates if g.param_slot is not None]
        if sorted(slots) != list(range(self.n_params)):
            raise ValueError("each parameter slot must appear exactly once")

    def gate_position(self, slot: int) -> int:
        for i, g in enumerate(self.gates):
            if g.param_slot == slot:
                return i
        raise IndexError(f"no gate carries parameter slot {slot}")


# -- statevector engine -----------------------------------------------------


def zero_state(n_qubits: int) -> np.ndarray:
    state = np.zeros(2**n_qubits, dtype=complex)
    state[0] = 1.0
    return state


def _apply_single(state: np.ndarray, u: np.ndarray, q: int, n: int) -> np.ndarray:
    v = state.reshape(2 ** (n - 1 - q), 2, 2**q)
    return np.einsum("ab,ibj->iaj", u, v).reshape(-1)


def _rot_matrix(axis: str, theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    if axis == "X":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if axis == "Y":
        return np.array([[c, -s], [s, c]])
    return np.array([[c - 1j * s, 0], [0, c + 1j * s]])


_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_SDG = np.array([[1, 0], [0, -1j]], dtype=complex)


def apply_gate(state: np.ndarray, gate: Gate, theta: np.ndarray, n: int) -> np.ndarray:
    kind = gate.kind
    if kind in _ROT_GENERATOR:
        u = _rot_matrix(_ROT_GENERATOR[kind], float(theta[gate.param_slot]))
        return _apply_single(state, u, gate.targets[0], n)
    if kind == "H":
        return _apply_single(state, _H, gate.targets[0], n)
    if kind == "X":
        return _apply_single(state, _X, gate.targets[0], n)
    if kind == "SDG":
        return _apply_single(state, _SDG, gate.targets[0], n)
    if kind == "CNOT":
        c, t = gate.targets
        idx = np.arange(state.size)
        mask = (idx >> c) & 1 == 1
        out = state.copy()
        out[idx[mask]] = state[idx[mask] ^ (1 << t)]
        return out
    if kind == "CZ":
        c, t = gate.targets
        idx = np.arange(state.size)
        both = ((idx >> c) & 1) & ((idx >> t) & 1)
        out = state.copy()
        out[both == 1] *= -1.0
        return out
    if kind == "PROT":
        th = float(theta[gate.param_slot])
        wv = gate.word.apply_state(state, n)
        return math.cos(th / 2.0) * state - 1j * math.sin(th / 2.0) * wv
    if kind == "GPHASE":
        return state * np.exp(1j * gate.angle)
    raise ValueError(f"unknown gate kind {kind}")


def apply(circuit: AnsatzCircuit, theta) -> np.ndarray:
    """U(theta)|0...0> as a normalized statevector."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (circuit.n_params,):
        raise ValueError(
            f"expected {circuit.n_params} parameters, got shape {theta.shape}"
        )
    state = zero_state(circuit.n_qubits)
    for gate in circuit.gates:
        state = apply_gate(state, gate, theta, circuit.n_qubits)
    return state


def derivative_state(circuit: AnsatzCircuit, theta, n: int) -> np.ndarray:
    """Unnormalized d|phi>/d theta_n, built by inserting the rotation
    generator at the gate's position; carries the -i/2 prefactor."""
    theta = np.asarray(theta, dtype=float)
    if not 0 <= n < circuit.n_params:
        raise IndexError(f"parameter index {n} out of range")
    pos = circuit.gate_position(n)
    gen = circuit.gates[pos].generator()
    state = zero_state(circuit.n_qubits)
    for i, gate in enumerate(circuit.gates):
        if i == pos:
            state = gen.apply_state(state, circuit.n_qubits)
        state = apply_gate(state, gate, theta, circuit.n_qubits)
    return -0.5j * state


# -- ansatz builders ----------------------------------------------------------


def build_ansatz(family: AnsatzFamily | str, n_qubits: int, layers: int) -> AnsatzCircuit:
    """Hardware-efficient ansatz: per layer a rotation block (RY, plus RZ for
    the YZ family) followed by a linear CNOT chain, with a trailing rotation
    block after the last entangler."""
    family = AnsatzFamily(family)
    if layers < 1:
        raise ValueError("layers must be >= 1")
    if family == AnsatzFamily.CUSTOM:
        raise ValueError("build_ansatz only constructs the Y and YZ families")
    gates: list[Gate] = []
    slot = 0

    def rotation_block():
        nonlocal slot
        for q in range(n_qubits):
            gates.append(Gate("RY", (q,), param_slot=slot))
            slot += 1
        if family == AnsatzFamily.YZ:
            for q in range(n_qubits):
                gates.append(Gate("RZ", (q,), param_slot=slot))
                slot += 1

    for _ in range(layers):
        rotation_block()
        for q in range(n_qubits - 1):
            gates.append(Gate("CNOT", (q, q + 1)))
    rotation_block()
    return AnsatzCircuit(n_qubits, tuple(gates), slot, family)


def build_factor15_demo_ansatz() -> AnsatzCircuit:
    """10-parameter, 3-qubit demo ansatz used for the shipped A_{4,9}
    Hadamard-test golden circuit: two Y layers plus a final RZ on qubit 0."""
    base = build_ansatz(AnsatzFamily.Y, 3, 2)
    gates = base.gates + (Gate("RZ", (0,), param_slot=9),)
    return AnsatzCircuit(3, gates, 10, AnsatzFamily.CUSTOM)


# -- Hadamard-test circuits ---------------------------------------------------


class HadamardVariant(str, Enum):
    REAL = "real"
    IMAGINARY = "imaginary"


@dataclass(frozen=True)
class HadamardTestCircuit:
    """An (n_system + 1)-qubit interference circuit.

    The ancilla is the highest qubit index.  ``ops`` is the fully bound
    gate sequence; CWORD entries apply a Pauli word to the system register
    conditioned on the ancilla being in the given control value.
    """

    n_system: int
    ops: tuple[tuple, ...]  # ("GATE", Gate) | ("CWORD", PauliWord, control_value)
    variant: HadamardVariant
    theta: tuple[float, ...]

    @property
    def n_qubits(self) -> int:
        return self.n_system + 1


def _controlled_word(state: np.ndarray, word: PauliWord, control_value: int,
                     anc: int, n_total: int) -> np.ndarray:
    idx = np.arange(state.size)
    mask = ((idx >> anc) & 1) == control_value
    flipped = word.apply_state(state, n_total)
    out = state.copy()
    out[mask] = flipped[mask]
    return out


def _build_interference(
    circuit: AnsatzCircuit,
    theta,
    insertions: list[tuple[int, PauliWord, int]],
    post_words: list[tuple[PauliWord, int]],
    variant: HadamardVariant,
) -> HadamardTestCircuit:
    theta = tuple(float(t) for t in np.asarray(theta, dtype=float))
    anc = circuit.n_qubits
    ops: list[tuple] = [("GATE", Gate("H", (anc,)))]
    by_pos: dict[int, list[tuple[PauliWord, int]]] = {}
    for pos, word, ctl in insertions:
        by_pos.setdefault(pos, []).append((word, ctl))
    for i, gate in enumerate(circuit.gates):
        for word, ctl in by_pos.get(i, []):
            ops.append(("CWORD", word, ctl))
        ops.append(("GATE", gate))
    for word, ctl in by_pos.get(len(circuit.gates), []):
        ops.append(("CWORD", word, ctl))
    for word, ctl in post_words:
        ops.append(("CWORD", word, ctl))
    if variant == HadamardVariant.IMAGINARY:
        ops.append(("GATE", Gate("SDG", (anc,))))
    ops.append(("GATE", Gate("H", (anc,))))
    return HadamardTestCircuit(circuit.n_qubits, tuple(ops), variant, theta)


def build_hadamard_test_A(
    circuit: AnsatzCircuit, theta, k: int, m: int
) -> HadamardTestCircuit:
    """Interference circuit whose ancilla-0 probability encodes
    Re<0|Ubar_k^dag Ubar_m|0> = 2*P0 - 1."""
    if not 0 <= k <= m < circuit.n_params:
        raise IndexError("require 0 <= k <= m < n_params")
    pk, pm = circuit.gate_position(k), circuit.gate_position(m)
    gk = circuit.gates[pk].generator()
    gm = circuit.gates[pm].generator()
    insertions = [(pk, gk, 0), (pm, gm, 1)]
    return _build_interference(circuit, theta, insertions, [], HadamardVariant.REAL)


def build_hadamard_test_C(
    circuit: AnsatzCircuit,
    theta,
    k: int,
    word: PauliWord,
    variant: HadamardVariant = HadamardVariant.IMAGINARY,
) -> HadamardTestCircuit:
    """Interference circuit whose ancilla-0 probability encodes
    Re or Im of <0|Ubar_k^dag h U|0> (2*P0 - 1)."""
    if not 0 <= k < circuit.n_params:
        raise IndexError("parameter index out of range")
    pk = circuit.gate_position(k)
    gk = circuit.gates[pk].generator()
    return _build_interference(
        circuit, theta, [(pk, gk, 0)], [(word, 1)], HadamardVariant(variant)
    )


def simulate_hadamard_test(
    htc: HadamardTestCircuit, shots: int | None = None, seed: int = 0
) -> float:
    """Probability of finding the ancilla in 0: exact Born value, or a
    reproducible binomial estimate when shots are requested."""
    n = htc.n_qubits
    anc = htc.n_system
    state = zero_state(n)
    state = apply_gate(state, Gate("H", (anc,)), np.empty(0), n)
    theta = np.asarray(htc.theta, dtype=float)
    for op in htc.ops[1:]:
        if op[0] == "GATE":
            state = apply_gate(state, op[1], theta, n)
        else:
            _, word, ctl = op
            state = _controlled_word(state, word, ctl, anc, n)
    probs = np.abs(state) ** 2
    idx = np.arange(state.size)
    p0 = float(probs[((idx >> anc) & 1) == 0].sum())
    p0 = min(max(p0, 0.0), 1.0)
    if shots is None:
        return p0
    rng = np.random.default_rng(seed)
    return rng.binomial(shots, p0) / shots


# -- circuit emission ----------------------------------------------------------
#
# One gate per line, e.g. `RY q0 theta[3]`, `CNOT q0 q1`, `C-Y anc q2`,
# with header lines `qubits N` and (for Hadamard tests) `ancilla 1`.


def _emit_gate(gate: Gate) -> str:
    if gate.kind in ("RX", "RY", "RZ"):
        return f"{gate.kind} q{gate.targets[0]} theta[{gate.param_slot}]"
    if gate.kind == "PROT":
        body = " ".join(f"{p}{q}" for q, p in gate.word.ops)
        return f"R({body}) theta[{gate.param_slot}]"
    if gate.kind in ("CNOT", "CZ"):
        return f"{gate.kind} q{gate.targets[0]} q{gate.targets[1]}"
    return f"{gate.kind} q{gate.targets[0]}"


def emit_circuit(obj: AnsatzCircuit | HadamardTestCircuit) -> str:
    lines = []
    if isinstance(obj, AnsatzCircuit):
        lines.append(f"qubits {obj.n_qubits}")
        lines.extend(_emit_gate(g) for g in obj.gates)
    else:
        lines.append(f"qubits {obj.n_system}")
        lines.append("ancilla 1")
        for op in obj.ops:
            if op[0] == "GATE":
                gate = op[1]
                if gate.targets == (obj.n_system,):
                    lines.append(f"{gate.kind} anc")
                else:
                    lines.append(_emit_gate(gate))
            else:
                _, word, ctl = op
                ctl_tag = "anc" if ctl == 1 else "anc0"
                for q, p in word.ops:
                    lines.append(f"C-{p} {ctl_tag} q{q}")
                if not word.ops:
                    lines.append(f"C-I {ctl_tag}")
    return "\n".join(lines) + "\n"
