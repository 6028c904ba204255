import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qipa.encoding import (
    BiprimeSpec,
    EncodingScheme,
    FermionOperator,
    LevelEncoding,
    TransmonSpec,
    biprime_decode,
    build_biprime,
    build_transmon,
    cos_phi_matrix,
    encode_level_operator,
    jordan_wigner,
    load_integral_file,
    load_test_hamiltonian_15,
    number_operator_matrix,
    sin_phi_matrix,
)
from qipa.pauli import Observable

DATA = Path(__file__).resolve().parent.parent / "src" / "qipa" / "data"


# -- level encodings ------------------------------------------------------------


@given(st.sampled_from([2, 4, 8, 16, 32]), st.data())
def test_codeword_level_bijection(d, data):
    for scheme in EncodingScheme:
        enc = LevelEncoding(scheme, d)
        level = data.draw(st.integers(0, d - 1))
        assert enc.level(enc.codeword(level)) == level
    assert sorted(LevelEncoding(EncodingScheme.GRAY, d).codeword(n) for n in range(d)) == list(range(d))


@given(st.sampled_from([4, 8, 16, 32]), st.data())
def test_gray_neighbours_differ_in_one_bit(d, data):
    enc = LevelEncoding(EncodingScheme.GRAY, d)
    n = data.draw(st.integers(0, d - 2))
    diff = enc.codeword(n) ^ enc.codeword(n + 1)
    assert bin(diff).count("1") == 1


def test_bad_truncation_rejected():
    with pytest.raises(ValueError):
        LevelEncoding(EncodingScheme.GRAY, 12)
    with pytest.raises(ValueError):
        LevelEncoding(EncodingScheme.STANDARD_BINARY, 1)


def codeword_permutation(enc: LevelEncoding) -> np.ndarray:
    """Matrix P with P|level> = |codeword>."""
    p = np.zeros((enc.d, enc.d))
    for n in range(enc.d):
        p[enc.codeword(n), n] = 1.0
    return p


@pytest.mark.parametrize("scheme", list(EncodingScheme))
@pytest.mark.parametrize("d", [2, 4, 8, 16])
def test_encoded_operator_reproduces_matrix(scheme, d):
    rng = np.random.default_rng(d)
    mat = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    mat = mat + mat.conj().T
    enc = LevelEncoding(scheme, d)
    obs = encode_level_operator(mat, enc)
    p = codeword_permutation(enc)
    assert np.allclose(obs.to_dense(), p @ mat @ p.T, atol=1e-10)


def test_level_operator_matrices():
    n4 = number_operator_matrix(4)
    assert np.allclose(np.diag(n4), [-2, -1, 0, 1])  # spectrum n - d/2
    c4 = cos_phi_matrix(4)
    assert np.allclose(c4, c4.T)
    assert c4[0, 1] == pytest.approx(0.5)
    s4 = sin_phi_matrix(4)
    assert np.allclose(s4, s4.T.conj())
    assert s4[0, 1] == pytest.approx(0.5j) or s4[0, 1] == pytest.approx(-0.5j)


@pytest.mark.parametrize(
    "name",
    ["n_binary", "n_gray", "cos_binary", "cos_gray", "sin_binary", "sin_gray"],
)
def test_d16_encodings_match_reference_files(name):
    op, tag = name.split("_")
    build = {"n": number_operator_matrix, "cos": cos_phi_matrix, "sin": sin_phi_matrix}[op]
    scheme = EncodingScheme.STANDARD_BINARY if tag == "binary" else EncodingScheme.GRAY
    obs = encode_level_operator(build(16), LevelEncoding(scheme, 16)).simplify()
    from qipa.pauli import format_pauli_text

    assert format_pauli_text(obs) == (DATA / f"table1_{name}.txt").read_text()


def test_gray_number_operator_has_five_terms():
    obs = encode_level_operator(
        number_operator_matrix(16), LevelEncoding(EncodingScheme.GRAY, 16)
    ).simplify()
    assert len(obs.terms) == 5


# -- transmon ---------------------------------------------------------------------


@pytest.mark.parametrize("f", [0.0, 0.1, 0.25])
@pytest.mark.parametrize("d", [4, 16])
def test_transmon_spectrum_matches_level_model(f, d):
    spec = TransmonSpec(EC=1.0, EJ=1.0, f=f, d=d)
    enc = LevelEncoding(EncodingScheme.GRAY, spec.d)
    obs = build_transmon(spec, enc)
    assert obs.is_hermitian()
    n_mat = number_operator_matrix(d)
    level_h = spec.EC * n_mat @ n_mat - 2.0 * spec.EJ * abs(
        math.cos(2 * math.pi * f)
    ) * cos_phi_matrix(d)
    assert np.allclose(
        np.linalg.eigvalsh(obs.to_dense()), np.linalg.eigvalsh(level_h), atol=1e-10
    )


def test_transmon_sweet_spot_is_diagonal():
    spec = TransmonSpec(f=0.25, d=4)
    obs = build_transmon(spec, LevelEncoding(EncodingScheme.GRAY, 4))
    assert all(all(p == "Z" for _, p in w.ops) for _, w in obs.terms)


# -- jordan-wigner ------------------------------------------------------------------


def ladder_dense(j, dagger, n):
    op = FermionOperator.from_terms([(1.0, ((j, dagger),))])
    return jordan_wigner(op, n).to_dense()


@pytest.mark.parametrize("n", [2, 3, 4])
def test_canonical_anticommutation_relations(n):
    for i in range(n):
        for j in range(n):
            ai = ladder_dense(i, False, n)
            adj = ladder_dense(j, True, n)
            acomm = ai @ adj + adj @ ai
            expected = np.eye(2**n) if i == j else np.zeros((2**n, 2**n))
            assert np.allclose(acomm, expected, atol=1e-12)
            aj = ladder_dense(j, False, n)
            assert np.allclose(ai @ aj + aj @ ai, 0.0, atol=1e-12)


def test_number_operator_eigenvalues():
    op = FermionOperator.from_terms([(1.0, ((1, True), (1, False)))])
    dense = jordan_wigner(op, 2).to_dense()
    assert np.allclose(np.sort(np.linalg.eigvalsh(dense)), [0, 0, 1, 1])


def test_integral_file_round_trip(tmp_path):
    path = tmp_path / "toy.txt"
    path.write_text("# toy\nh 0 0 -1.0\nh 1 1 -0.5\nV 0 0 1 1 0.25\n")
    fop = load_integral_file(path, 2)
    obs = jordan_wigner(fop, 2)
    assert obs.is_hermitian()
    # |11> holds both orbitals: E = -1 - 0.5 + 0.25
    dense = obs.to_dense()
    assert dense[3, 3].real == pytest.approx(-1.25)


def test_integral_file_rejects_bad_lines(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("w 0 0 1.0\n")
    with pytest.raises(ValueError):
        load_integral_file(path, 2)


def test_shipped_h2_file_ground_energy():
    fop = load_integral_file(DATA / "h2_r0.74_integrals.txt", 4)
    obs = jordan_wigner(fop, 4)
    # electronic ground energy; nuclear repulsion lives in the Pauli file
    assert np.linalg.eigvalsh(obs.to_dense())[0] == pytest.approx(-1.8524, abs=1e-3)


# -- biprime -------------------------------------------------------------------------


def test_biprime_spec_validation():
    with pytest.raises(ValueError):
        BiprimeSpec(8)
    with pytest.raises(ValueError):
        BiprimeSpec(7)


def test_biprime_15_structure():
    spec = BiprimeSpec(15)
    assert spec.L == 2
    assert spec.n_spins == 4
    h = build_biprime(spec)
    assert h.n_qubits == 4
    assert all(all(p == "Z" for _, p in w.ops) for _, w in h.terms)


def test_biprime_15_published_coefficients():
    h = build_biprime(BiprimeSpec(15)).simplify()
    assert len(h.terms) == 16
    by_word = {tuple(q for q, _ in w.ops): c.real for c, w in h.terms}
    assert by_word[()] == pytest.approx(186.0)
    coeffs = sorted(c.real for c, w in h.terms if w.ops)
    assert coeffs == sorted([48, 96, 84, 48, 34, 68, 32, 96, 68, 136, 64, 84, 32, 64, 16])


@pytest.mark.parametrize("n", [9, 15, 21, 25, 33, 35])
def test_biprime_zero_states_decode_to_factors(n):
    spec = BiprimeSpec(n)
    h = build_biprime(spec)
    diag = h.diagonal()
    zeros = np.flatnonzero(np.abs(diag) < 1e-9)
    assert len(zeros) >= 1
    for idx in zeros:
        q, p = biprime_decode(spec, int(idx))
        assert q * p == n


def test_biprime_decode_round_trip():
    spec = BiprimeSpec(15)
    seen = {biprime_decode(spec, i) for i in range(16)}
    assert (3, 5) in seen and (5, 3) in seen


def test_three_qubit_test_hamiltonian():
    h = load_test_hamiltonian_15()
    assert h.n_qubits == 3
    assert len(h.terms) == 8
    diag = h.diagonal()
    assert diag.min() == pytest.approx(-36.0)
    assert int(np.argmin(diag)) == 1
    assert np.sum(np.abs(diag - diag.min()) < 1e-9) == 1  # unique ground state
