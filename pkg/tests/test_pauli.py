import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qipa.pauli import (
    DenseLimitError,
    Observable,
    PauliWord,
    format_pauli_text,
    observable_multiply,
    parse_pauli_text,
    word_multiply,
)

LETTERS = "IXYZ"


def words(max_qubits=4):
    """Strategy producing (n_qubits, PauliWord) pairs."""

    def build(letters):
        ops = tuple((q, p) for q, p in enumerate(letters) if p != "I")
        return PauliWord(ops)

    return st.lists(
        st.sampled_from(LETTERS), min_size=1, max_size=max_qubits
    ).map(build)


def dense_word(word: PauliWord, n: int) -> np.ndarray:
    return Observable.from_word(1.0, word, n).to_dense()


@given(words(), words())
@settings(max_examples=150, deadline=None)
def test_word_product_matches_dense_product(a, b):
    n = 4
    prod = word_multiply(a, b)
    lhs = dense_word(prod, n)
    rhs = dense_word(a, n) @ dense_word(b, n)
    assert np.array_equal(lhs, rhs)


@given(words())
@settings(max_examples=100, deadline=None)
def test_word_squares_to_identity(w):
    sq = word_multiply(w, w)
    assert sq.ops == ()
    assert sq.phase == 1.0


def test_word_phase_bookkeeping():
    x = PauliWord.single(0, "X")
    y = PauliWord.single(0, "Y")
    assert word_multiply(x, y) == PauliWord(((0, "Z"),), 1j)
    assert word_multiply(y, x) == PauliWord(((0, "Z"),), -1j)


@given(words(3), st.integers(0, 7))
@settings(max_examples=100, deadline=None)
def test_apply_state_matches_dense(w, basis):
    n = 3
    psi = np.zeros(2**n, dtype=complex)
    psi[basis] = 1.0
    assert np.allclose(w.apply_state(psi, n), dense_word(w, n) @ psi, atol=1e-14)


def random_observable(rng, n=3, n_terms=6):
    terms = []
    for _ in range(n_terms):
        letters = rng.choice(list(LETTERS), size=n)
        ops = tuple((q, p) for q, p in enumerate(letters) if p != "I")
        terms.append((rng.normal(), PauliWord(ops)))
    return Observable(terms, n)


def test_observable_product_hermitian_closure():
    rng = np.random.default_rng(3)
    for _ in range(10):
        obs = random_observable(rng).simplify()
        assert obs.is_hermitian()
        sq = observable_multiply(obs, obs).simplify()
        assert sq.is_hermitian()
        assert np.allclose(sq.to_dense(), obs.to_dense() @ obs.to_dense(), atol=1e-12)


def test_simplify_is_idempotent():
    rng = np.random.default_rng(4)
    obs = random_observable(rng)
    once = obs.simplify()
    twice = once.simplify()
    assert once.terms == twice.terms


def test_expectation_and_diagonal():
    n = 2
    obs = Observable(
        [(2.0, PauliWord.single(0, "Z")), (1.0, PauliWord(((0, "Z"), (1, "Z"))))], n
    )
    diag = obs.diagonal()
    assert np.allclose(diag, np.diag(obs.to_dense()).real)
    psi = np.zeros(4, dtype=complex)
    psi[3] = 1.0  # |11>
    assert obs.expectation(psi) == pytest.approx(-2.0 + 1.0)


def test_power_matches_dense():
    rng = np.random.default_rng(5)
    obs = random_observable(rng, n=2, n_terms=4).simplify()
    cube = obs.power(3)
    assert np.allclose(cube.to_dense(), np.linalg.matrix_power(obs.to_dense(), 3), atol=1e-10)


def test_dense_limit_enforced():
    obs = Observable.identity(13)
    with pytest.raises(DenseLimitError):
        obs.to_dense()
    # configurable limit
    assert Observable.identity(3).to_dense(dense_limit=3).shape == (8, 8)


def test_identity_examples():
    assert np.array_equal(Observable.identity(1).to_dense(), np.eye(2))
    z0 = Observable.from_word(1.0, PauliWord.single(0, "Z"), 1)
    assert np.array_equal(z0.to_dense(), np.diag([1.0, -1.0]))


def test_term_ordering_by_length_then_lexicographic():
    obs = Observable(
        [
            (1.0, PauliWord(((0, "Z"), (1, "Z")))),
            (2.0, PauliWord.single(1, "X")),
            (3.0, PauliWord.identity()),
        ],
        2,
    )
    lengths = [len(w.ops) for _, w in obs.terms]
    assert lengths == sorted(lengths)


@given(st.integers(0, 3), st.sampled_from("XYZ"))
def test_text_round_trip_single_words(q, p):
    obs = Observable.from_word(-1.25, PauliWord.single(q, p), 4)
    again = parse_pauli_text(format_pauli_text(obs), n_qubits=4)
    assert again.terms == obs.terms


def test_parse_rejects_bad_lines():
    with pytest.raises(ValueError):
        parse_pauli_text("abc X0")
    with pytest.raises(ValueError):
        parse_pauli_text("1.0 Q3")


def test_parse_ignores_comments_and_blanks():
    obs = parse_pauli_text("# header\n\n0.5 X0  # trailing\n")
    assert len(obs.terms) == 1
