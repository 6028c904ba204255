"""Exact symbolic algebra for weighted sums of Pauli words.

Convention used throughout the package: qubit 0 is the least-significant
bit of the basis-state integer label.  The dense matrix of a word on
``n`` qubits is therefore ``kron(op[n-1], ..., op[1], op[0])``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PauliWord",
    "Observable",
    "word_multiply",
    "observable_multiply",
    "parse_pauli_text",
    "format_pauli_text",
]

DEFAULT_DROP_TOL = 1e-12
DEFAULT_DENSE_LIMIT = 12

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# (a, b) -> (phase, product letter); same-letter products are identity.
_PROD = {
    ("X", "Y"): (1j, "Z"),
    ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("X", "Z"): (-1j, "Y"),
}


class DenseLimitError(ValueError):
    """Raised when a dense expansion would exceed the configured qubit limit."""


@dataclass(frozen=True)
class PauliWord:
    """A tensor product of single-qubit Paulis with a tracked phase.

    ``ops`` is a sorted tuple of ``(qubit, letter)`` pairs; absent qubits
    carry the identity.  ``phase`` is one of ``{1, -1, 1j, -1j}``.
    """

    ops: tuple[tuple[int, str], ...] = ()
    phase: complex = field(default=1.0 + 0j)

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(sorted(self.ops)))
        object.__setattr__(self, "phase", complex(self.phase))
        seen = set()
        for q, p in self.ops:
            if q < 0:
                raise ValueError(f"negative qubit index {q}")
            if p not in ("X", "Y", "Z"):
                raise ValueError(f"unknown Pauli letter {p!r}")
            if q in seen:
                raise ValueError(f"duplicate qubit index {q}")
            seen.add(q)
        if not cmath.isclose(abs(self.phase), 1.0, abs_tol=1e-15):
            raise ValueError(f"phase must be unimodular, got {self.phase}")

    @staticmethod
    def identity() -> "PauliWord":
        return PauliWord()

    @staticmethod
    def single(qubit: int, letter: str) -> "PauliWord":
        return PauliWord(((qubit, letter.upper()),))

    @staticmethod
    def from_dict(ops: dict[int, str], phase: complex = 1.0) -> "PauliWord":
        return PauliWord(tuple((q, p.upper()) for q, p in ops.items()), phase)

    @property
    def is_identity(self) -> bool:
        return not self.ops

    def max_qubit(self) -> int:
        return max((q for q, _ in self.ops), default=-1)

    def bare(self) -> "PauliWord":
        """The same word with phase reset to +1."""
        return PauliWord(self.ops)

    def to_dense(self, n_qubits: int) -> np.ndarray:
        if self.max_qubit() >= n_qubits:
            raise ValueError("word acts outside the qubit register")
        opmap = dict(self.ops)
        mat = np.array([[self.phase]], dtype=complex)
        for q in range(n_qubits - 1, -1, -1):
            mat = np.kron(mat, _SINGLE[opmap.get(q, "I")])
        return mat

    def apply_state(self, state: np.ndarray, n_qubits: int) -> np.ndarray:
        """Apply the word to a statevector without building a dense matrix."""
        x_mask = 0
        zy_mask = 0
        n_y = 0
        for q, p in self.ops:
            if p in ("X", "Y"):
                x_mask |= 1 << q
            if p in ("Z", "Y"):
                zy_mask |= 1 << q
            if p == "Y":
                n_y += 1
        idx = np.arange(state.size)
        signs = 1 - 2 * (_popcount(idx & zy_mask) & 1)
        out = state[idx ^ x_mask] * signs
        return out * (self.phase * (-1j) ** n_y)

    def __mul__(self, other: "PauliWord") -> "PauliWord":
        return word_multiply(self, other)

    def __str__(self) -> str:
        body = " ".join(f"{p}{q}" for q, p in self.ops) or "I"
        pre = {1: "", -1: "-", 1j: "i", -1j: "-i"}.get(
            complex(round(self.phase.real), round(self.phase.imag)), f"({self.phase})"
        )
        return f"{pre}{body}"


def _popcount(arr: np.ndarray) -> np.ndarray:
    out = np.zeros_like(arr)
    a = arr.copy()
    while a.any():
        out += a & 1
        a >>= 1
    return out


def word_multiply(a: PauliWord, b: PauliWord) -> PauliWord:
    """Product ``a @ b`` as a single Pauli word with exact phase."""
    ops_a = dict(a.ops)
    ops_b = dict(b.ops)
    phase = a.phase * b.phase
    ops = {}
    for q in sorted(set(ops_a) | set(ops_b)):
        pa, pb = ops_a.get(q), ops_b.get(q)
        if pa is None:
            ops[q] = pb
        elif pb is None:
            ops[q] = pa
        elif pa == pb:
            pass  # squares to identity
        else:
            ph, letter = _PROD[(pa, pb)]
            phase *= ph
            ops[q] = letter
    return PauliWord.from_dict(ops, phase)


class Observable:
    """A complex-weighted sum of Pauli words on a fixed register.

    Terms are keyed by the phase-free word; word phases are folded into
    coefficients, so no two stored terms ever share a word.
    """

    __slots__ = ("_terms", "n_qubits")

    def __init__(self, terms=None, n_qubits: int | None = None):
        acc: dict[tuple, complex] = {}
        max_q = -1
        for coeff, word in terms or []:
            if not isinstance(word, PauliWord):
                word = PauliWord(word)
            c = complex(coeff) * word.phase
            acc[word.ops] = acc.get(word.ops, 0.0 + 0j) + c
            max_q = max(max_q, word.max_qubit())
        if n_qubits is None:
            n_qubits = max_q + 1 if max_q >= 0 else 1
        if max_q >= n_qubits:
            raise ValueError("term acts outside the declared register")
        self._terms = acc
        self.n_qubits = int(n_qubits)

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def zero(n_qubits: int) -> "Observable":
        return Observable([], n_qubits)

    @staticmethod
    def identity(n_qubits: int, coeff: complex = 1.0) -> "Observable":
        return Observable([(coeff, PauliWord.identity())], n_qubits)

    @staticmethod
    def from_word(coeff: complex, word: PauliWord, n_qubits: int) -> "Observable":
        return Observable([(coeff, word)], n_qubits)

    # -- views ----------------------------------------------------------------

    @property
    def terms(self) -> list[tuple[complex, PauliWord]]:
        """Terms in canonical order (shorter words first, then lexicographic)."""
        keys = sorted(self._terms, key=lambda ops: (len(ops), ops))
        return [(self._terms[k], PauliWord(k)) for k in keys]

    @property
    def n_terms(self) -> int:
        return len(self._terms)

    def coefficient(self, word: PauliWord) -> complex:
        return self._terms.get(word.bare().ops, 0.0 + 0j) * word.phase.conjugate()

    def identity_coefficient(self) -> complex:
        return self._terms.get((), 0.0 + 0j)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    # -- algebra ----------------------------------------------------------------

    def simplify(self, drop_tol: float = DEFAULT_DROP_TOL) -> "Observable":
        out = Observable.zero(self.n_qubits)
        out._terms = {k: c for k, c in self._terms.items() if abs(c) > drop_tol}
        return out

    def __add__(self, other: "Observable") -> "Observable":
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit-count mismatch")
        out = Observable.zero(self.n_qubits)
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, 0.0 + 0j) + c
        out._terms = acc
        return out

    def __sub__(self, other: "Observable") -> "Observable":
        return self + (-1.0) * other

    def __rmul__(self, scalar: complex) -> "Observable":
        out = Observable.zero(self.n_qubits)
        out._terms = {k: complex(scalar) * c for k, c in self._terms.items()}
        return out

    def __matmul__(self, other: "Observable") -> "Observable":
        return observable_multiply(self, other)

    def power(self, exponent: int, drop_tol: float = DEFAULT_DROP_TOL) -> "Observable":
        if exponent < 0:
            raise ValueError("exponent must be non-negative")
        out = Observable.identity(self.n_qubits)
        for _ in range(exponent):
            out = observable_multiply(out, self, drop_tol=drop_tol)
        return out

    # -- numeric ----------------------------------------------------------------

    def to_dense(self, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
        if self.n_qubits > dense_limit:
            raise DenseLimitError(
                f"{self.n_qubits} qubits exceeds dense limit {dense_limit}"
            )
        dim = 2**self.n_qubits
        mat = np.zeros((dim, dim), dtype=complex)
        for coeff, word in self.terms:
            mat += coeff * word.to_dense(self.n_qubits)
        return mat

    def apply_state(self, state: np.ndarray) -> np.ndarray:
        out = np.zeros_like(state, dtype=complex)
        for coeff, word in self.terms:
            out += coeff * word.apply_state(state, self.n_qubits)
        return out

    def expectation(self, state: np.ndarray) -> complex:
        return np.vdot(state, self.apply_state(state))

    def diagonal(self) -> np.ndarray:
        """Diagonal of the dense matrix; cheap for Z-only observables."""
        dim = 2**self.n_qubits
        diag = np.zeros(dim, dtype=complex)
        idx = np.arange(dim)
        for coeff, word in self.terms:
            if any(p != "Z" for _, p in word.ops):
                raise ValueError("diagonal() requires a Z-only observable")
            mask = 0
            for q, _ in word.ops:
                mask |= 1 << q
            diag += coeff * (1 - 2 * (_popcount(idx & mask) & 1))
        return diag

    def __eq__(self, other) -> bool:
        if not isinstance(other, Observable):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def __repr__(self) -> str:
        parts = ", ".join(f"{c:.6g}*{w}" for c, w in self.terms[:6])
        more = "" if self.n_terms <= 6 else f", ... ({self.n_terms} terms)"
        return f"Observable({parts}{more}; n_qubits={self.n_qubits})"


def observable_multiply(
    a: Observable, b: Observable, drop_tol: float = DEFAULT_DROP_TOL
) -> Observable:
    """Operator product with term-by-term word multiplication, simplified."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit-count mismatch")
    out = Observable.zero(a.n_qubits)
    acc: dict[tuple, complex] = {}
    for ka, ca in a._terms.items():
        wa = PauliWord(ka)
        for kb, cb in b._terms.items():
            w = word_multiply(wa, PauliWord(kb))
            acc[w.ops] = acc.get(w.ops, 0.0 + 0j) + ca * cb * w.phase
    out._terms = {k: c for k, c in acc.items() if abs(c) > drop_tol}
    return out


# -- text format ----------------------------------------------------------------
#
# One term per line: `<real-coeff> [<P><index>]*`, e.g. `-52.0 Z2` or
# `128.0 Z0 Z1 Z2`; a bare number is an identity term.  `#` starts a comment.


def parse_pauli_text(text: str, n_qubits: int | None = None) -> Observable:
    terms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            coeff = float(fields[0])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad coefficient {fields[0]!r}") from exc
        ops = {}
        for tok in fields[1:]:
            letter, idx = tok[0].upper(), tok[1:]
            if letter not in ("X", "Y", "Z") or not idx.isdigit():
                raise ValueError(f"line {lineno}: bad Pauli factor {tok!r}")
            q = int(idx)
            if q in ops:
                raise ValueError(f"line {lineno}: repeated qubit {q}")
            ops[q] = letter
        terms.append((coeff, PauliWord.from_dict(ops)))
    return Observable(terms, n_qubits=n_qubits)


def _fmt_coeff(c: complex) -> str:
    if abs(c.imag) > 1e-12:
        raise ValueError(f"pauli text requires real coefficients, got {c}")
    return format(c.real, ".12g")


def format_pauli_text(obs: Observable) -> str:
    lines = []
    for coeff, word in obs.terms:
        body = " ".join(f"{p}{q}" for q, p in word.ops)
        lines.append(f"{_fmt_coeff(coeff)} {body}".rstrip())
    return "\n".join(lines) + ("\n" if lines else "")


def load_pauli_file(path, n_qubits: int | None = None) -> Observable:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_pauli_text(fh.read(), n_qubits=n_qubits)
