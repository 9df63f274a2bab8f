from hypothesis import given, settings
from hypothesis import strategies as st

from vertexlab.fock import (
    ALPHA,
    BETA,
    GAMMA,
    ZERO_VECTOR,
    BasisState,
    LatticeVector,
    StateVector,
    enumerate_basis,
    monomials_of_degree,
    pairing,
    pi_exponential,
    tagged_sum,
    untag,
)
from vertexlab.scalar import ONE, param


def colored_partition_counts(colors: int, max_degree: int) -> list[int]:
    """Coefficients of prod_n (1 - q^n)^(-colors), by repeated series multiplication."""
    series = [1] + [0] * max_degree
    for n in range(1, max_degree + 1):
        for _ in range(colors):
            for d in range(n, max_degree + 1):
                series[d] += series[d - n]
    return series


def test_gram_matrix():
    assert pairing(ALPHA, ALPHA) == 1
    assert pairing(BETA, BETA) == -1
    assert pairing(GAMMA, GAMMA) == 1
    assert pairing(ALPHA, BETA) == 0
    assert pairing(ALPHA + BETA, ALPHA + BETA) == 0


def test_lattice_vectors_are_interned():
    lam = param("lam")
    assert LatticeVector(lam, lam + 1, 0) is LatticeVector(lam, lam + 1, 0)
    assert pi_exponential(1, lam, 2) == LatticeVector(lam + 2, lam + 3, 0)


def test_monomial_counts_match_generating_function():
    for colors, gens in ((1, (0,)), (2, (0, 1)), (3, (0, 1, 2))):
        expected = colored_partition_counts(colors, 6)
        assert [len(monomials_of_degree(d, gens)) for d in range(7)] == expected


def test_enumerate_basis_counts():
    lam = param("lam")
    states = enumerate_basis([pi_exponential(0, lam, n) for n in (-1, 0, 1)], 4, (0, 1))
    assert len(states) == 3 * sum(colored_partition_counts(2, 4))
    assert len(set(states)) == len(states)


def test_state_vector_linear_structure():
    lam = param("lam")
    e = LatticeVector(lam, lam, 0)
    u = StateVector.exp(e, [(0, 1), (1, 2)])
    w = StateVector.exp(ZERO_VECTOR)
    assert (u + w) - u == w
    assert (2 * u - u) == u
    assert (lam * u).coefficient(BasisState(e, [(1, 2), (0, 1)])) == lam
    assert (u + w).truncate(0) == w
    assert (u - u).is_zero()


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 20), min_size=1, max_size=8, unique=True))
def test_tag_roundtrip(indices):
    states = enumerate_basis([pi_exponential(1, param("lam"), n) for n in (0, 1)], 2, (0, 1, 2))
    chosen = [states[i % len(states)] for i in indices]
    chosen = list(dict.fromkeys(chosen))
    parts = untag(tagged_sum(chosen))
    assert sorted(parts) == list(range(len(chosen)))
    for i, b in enumerate(chosen):
        assert parts[i] == StateVector.basis(b)


def test_basis_state_degree_and_parity():
    b = BasisState(LatticeVector(0, 0, 1), [(2, 1), (0, 3)])
    assert b.degree == 4
    assert b.parity() == 1
    assert StateVector.basis(b, ONE).max_degree() == 4
