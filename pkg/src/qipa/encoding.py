"""Problem Hamiltonians as Observables.

Covers the Jordan-Wigner mapping of second-quantized operators, d-level
operator encodings (standard binary and Gray) for the truncated transmon,
and symbolic biprime-factorization Hamiltonians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .pauli import Observable, PauliWord, observable_multiply

__all__ = [
    "FermionOperator",
    "EncodingScheme",
    "LevelEncoding",
    "TransmonSpec",
    "BiprimeSpec",
    "jordan_wigner",
    "encode_level_operator",
    "number_operator_matrix",
    "cos_phi_matrix",
    "sin_phi_matrix",
    "build_transmon",
    "build_biprime",
    "biprime_decode",
    "load_test_hamiltonian_15",
    "load_integral_file",
]


@dataclass(frozen=True)
class FermionOperator:
    """Sum of ladder-operator strings: (coefficient, ((orbital, dagger), ...))."""

    terms: tuple[tuple[complex, tuple[tuple[int, bool], ...]], ...]

    @staticmethod
    def from_terms(terms) -> "FermionOperator":
        canon = tuple(
            (complex(c), tuple((int(j), bool(d)) for j, d in seq)) for c, seq in terms
        )
        return FermionOperator(canon)

    def max_orbital(self) -> int:
        return max(
            (j for _, seq in self.terms for j, _ in seq),
            default=-1,
        )


def _ladder_observable(orbital: int, dagger: bool, n_orbitals: int) -> Observable:
    # a_j -> (prod_{l<j} -Z_l) (X_j + iY_j)/2, a^dag with the -i sign.
    sign = (-1) ** orbital
    y_coeff = -0.5j if dagger else 0.5j
    z_tail = tuple((l, "Z") for l in range(orbital))
    return Observable(
        [
            (0.5 * sign, PauliWord(z_tail + ((orbital, "X"),))),
            (y_coeff * sign, PauliWord(z_tail + ((orbital, "Y"),))),
        ],
        n_qubits=n_orbitals,
    )


def jordan_wigner(op: FermionOperator, n_orbitals: int) -> Observable:
    """Map a fermionic operator to a qubit Observable, simplified."""
    if op.max_orbital() >= n_orbitals:
        raise ValueError("orbital index out of range")
    total = Observable.zero(n_orbitals)
    for coeff, seq in op.terms:
        prod = Observable.identity(n_orbitals, coeff)
        for orbital, dagger in seq:
            prod = observable_multiply(prod, _ladder_observable(orbital, dagger, n_orbitals))
        total = total + prod
    return total.simplify()


class EncodingScheme(str, Enum):
    STANDARD_BINARY = "binary"
    GRAY = "gray"


@dataclass(frozen=True)
class LevelEncoding:
    """Bijection between d levels and k-bit codewords, d = 2^k."""

    scheme: EncodingScheme
    d: int

    def __post_init__(self):
        if self.d < 2 or self.d & (self.d - 1):
            raise ValueError(f"d must be a power of two >= 2, got {self.d}")

    @property
    def k(self) -> int:
        return self.d.bit_length() - 1

    def codeword(self, level: int) -> int:
        if not 0 <= level < self.d:
            raise ValueError(f"level {level} outside 0..{self.d - 1}")
        if self.scheme == EncodingScheme.GRAY:
            return level ^ (level >> 1)
        return level

    def level(self, codeword: int) -> int:
        if self.scheme == EncodingScheme.GRAY:
            level = codeword
            shift = 1
            while level >> shift:
                level ^= level >> shift
                shift <<= 1
            return level
        return codeword


# single-bit encodings of |a><b| as [(coeff, letter-or-None), ...]
_BIT_OPS = {
    (0, 0): ((0.5, None), (0.5, "Z")),
    (1, 1): ((0.5, None), (-0.5, "Z")),
    (0, 1): ((0.5, "X"), (0.5j, "Y")),
    (1, 0): ((0.5, "X"), (-0.5j, "Y")),
}


def encode_level_operator(
    op: np.ndarray, enc: LevelEncoding, drop_tol: float = 1e-12
) -> Observable:
    """Encode a dense d x d operator on k qubits under the given level map.

    Each matrix element |m><n| expands as a tensor product of single-qubit
    transition/projector encodings over the codeword bits.
    """
    op = np.asarray(op, dtype=complex)
    if op.shape != (enc.d, enc.d):
        raise ValueError(f"operator shape {op.shape} does not match d={enc.d}")
    k = enc.k
    acc: dict[tuple, complex] = {}

    def expand(bit: int, coeff: complex, ops: tuple, a: int, b: int):
        if abs(coeff) < drop_tol * 1e-3:
            return
        if bit == k:
            acc[ops] = acc.get(ops, 0.0 + 0j) + coeff
            return
        for c, letter in _BIT_OPS[((a >> bit) & 1, (b >> bit) & 1)]:
            nxt = ops if letter is None else ops + ((bit, letter),)
            expand(bit + 1, coeff * c, nxt, a, b)

    for m in range(enc.d):
        for n in range(enc.d):
            if abs(op[m, n]) < drop_tol:
                continue
            expand(0, op[m, n], (), enc.codeword(m), enc.codeword(n))

    out = Observable.zero(k)
    out._terms = {
        tuple(sorted(ops)): c for ops, c in acc.items() if abs(c) > drop_tol
    }
    return out


def number_operator_matrix(d: int) -> np.ndarray:
    """Charge-number operator with spectrum n - d/2."""
    return np.diag(np.arange(d) - d / 2).astype(complex)


def cos_phi_matrix(d: int) -> np.ndarray:
    mat = np.zeros((d, d), dtype=complex)
    for n in range(d - 1):
        mat[n, n + 1] = 0.5
        mat[n + 1, n] = 0.5
    return mat


def sin_phi_matrix(d: int) -> np.ndarray:
    mat = np.zeros((d, d), dtype=complex)
    for n in range(d - 1):
        mat[n, n + 1] = 0.5j
        mat[n + 1, n] = -0.5j
    return mat


@dataclass(frozen=True)
class TransmonSpec:
    """Truncated flux-tunable transmon: EC*N^2 - 2*EJ*|cos(2 pi f)|*cos(phi)."""

    EC: float = 1.0
    EJ: float = 1.0
    f: float = 0.0
    d: int = 16

    def __post_init__(self):
        if self.d < 2 or self.d & (self.d - 1):
            raise ValueError("d must be a power of two >= 2")


def build_transmon(spec: TransmonSpec, enc: LevelEncoding) -> Observable:
    if enc.d != spec.d:
        raise ValueError("encoding truncation does not match spec")
    n_mat = number_operator_matrix(spec.d)
    n_sq = encode_level_operator(n_mat @ n_mat, enc)
    cos_op = encode_level_operator(cos_phi_matrix(spec.d), enc)
    josephson = 2.0 * spec.EJ * abs(math.cos(2.0 * math.pi * spec.f))
    h = spec.EC * n_sq - josephson * cos_op
    if not h.is_hermitian():
        raise ValueError("transmon Hamiltonian failed Hermiticity check")
    return h.simplify()


@dataclass(frozen=True)
class BiprimeSpec:
    """Factorization target N = q* x p* with odd factors."""

    N: int

    def __post_init__(self):
        if self.N % 2 == 0:
            raise ValueError("N must be odd (even N has the trivial factor 2)")
        if self.N < 9:
            raise ValueError("N must be at least 9")

    @property
    def L(self) -> int:
        # Free bits per factor; bit 0 of each factor is pinned to 1, so a
        # factor spans L+1 bits and is at most 2^(L+1) - 1 < N.
        return int(math.floor(math.log2(self.N / 2)))

    @property
    def n_spins(self) -> int:
        return 2 * self.L


def _factor_observable(spec: BiprimeSpec, offset: int) -> Observable:
    # 2^L + sum_j s_j 2^(j-1) with spin s_j on qubit offset + j - 1.
    L = spec.L
    terms = [(float(2**L), PauliWord.identity())]
    for j in range(1, L + 1):
        terms.append((float(2 ** (j - 1)), PauliWord.single(offset + j - 1, "Z")))
    return Observable(terms, n_qubits=spec.n_spins)


def build_biprime(spec: BiprimeSpec) -> Observable:
    """Diagonal Hamiltonian (N - q*p)^2 over spin-encoded factor bits.

    Spin variable s_l lives on qubit l-1; qubits 0..L-1 encode q and
    qubits L..2L-1 encode p.
    """
    n = spec.n_spins
    q_obs = _factor_observable(spec, 0)
    p_obs = _factor_observable(spec, spec.L)
    d_obs = Observable.identity(n, float(spec.N)) - observable_multiply(q_obs, p_obs)
    h = observable_multiply(d_obs, d_obs).simplify()
    if not h.is_hermitian():
        raise AssertionError("biprime Hamiltonian must be real")
    return h


def biprime_decode(spec: BiprimeSpec, basis_index: int) -> tuple[int, int]:
    """Inverse of the spin map: basis state -> candidate factors (q, p)."""
    L = spec.L
    q = 2**L
    p = 2**L
    for j in range(1, L + 1):
        s = 1 - 2 * ((basis_index >> (j - 1)) & 1)
        q += s * 2 ** (j - 1)
        s = 1 - 2 * ((basis_index >> (L + j - 1)) & 1)
        p += s * 2 ** (j - 1)
    return q, p


def load_test_hamiltonian_15() -> Observable:
    """3-qubit factorization test Hamiltonian with a unique ground state."""
    z = PauliWord.single
    zz = lambda a, b: PauliWord(((a, "Z"), (b, "Z")))
    terms = [
        (196.0, PauliWord.identity()),
        (-52.0, z(2, "Z")),
        (-52.0, z(0, "Z")),
        (-56.0, zz(0, 2)),
        (-96.0, z(1, "Z")),
        (-48.0, zz(1, 2)),
        (16.0, zz(0, 1)),
        (128.0, PauliWord(((0, "Z"), (1, "Z"), (2, "Z")))),
    ]
    return Observable(terms, n_qubits=3)


def load_integral_file(path, n_orbitals: int) -> FermionOperator:
    """Read `h i j v` / `V i j k l v` lines into a FermionOperator.

    One-body terms enter as h_ij a^dag_i a_j and two-body terms as
    V_ijkl a^dag_i a^dag_k a_l a_j.
    """
    terms = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            kind = fields[0].lower()
            if kind == "h" and len(fields) == 4:
                i, j = int(fields[1]), int(fields[2])
                v = float(fields[3])
                terms.append((v, ((i, True), (j, False))))
            elif kind == "v" and len(fields) == 6:
                i, j, k, l = (int(x) for x in fields[1:5])
                v = float(fields[5])
                terms.append((v, ((i, True), (k, True), (l, False), (j, False))))
            else:
                raise ValueError(f"line {lineno}: unrecognized integral line {raw!r}")
    op = FermionOperator.from_terms(terms)
    if op.max_orbital() >= n_orbitals:
        raise ValueError("integral file references orbital beyond n_orbitals")
    return op
