from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vertexlab.fields import (
    A,
    A_STAR,
    BETA_FIELD,
    E_FIELD,
    N_FIELD,
    PSI,
    PSI_MINUS,
    PSI_PLUS,
    PSI_STAR,
    Cocycle,
    CosetError,
    central_charge,
    field_mode,
    heisenberg_mode,
    lattice_mode,
    omega_state,
    superbracket,
    use_cocycle,
    virasoro_field,
)
from vertexlab.fock import (
    ALPHA,
    BETA,
    GAMMA,
    ZERO_VECTOR,
    BasisState,
    LatticeVector,
    StateVector,
    enumerate_basis,
    pairing,
    pi_exponential,
    vacuum,
)
from vertexlab.scalar import param


def test_heisenberg_creation_and_annihilation():
    one = vacuum()
    v = heisenberg_mode(ALPHA, -2, one)
    assert v == StateVector.exp(ZERO_VECTOR, [(0, 2)])
    assert heisenberg_mode(ALPHA, 2, v) == 2 * one
    assert heisenberg_mode(BETA, 1, heisenberg_mode(BETA, -1, one)) == -1 * one


def test_zero_mode_is_the_pairing():
    lam = param("lam")
    nu = pi_exponential(1, lam)
    v = StateVector.exp(nu)
    assert heisenberg_mode(BETA, 0, v) == pairing(BETA, nu) * v
    assert pairing(BETA, nu) == -(lam + 1)


def test_generator_states():
    one = vacuum()
    assert field_mode(A, -1, one) == StateVector.exp(ALPHA + BETA)
    assert field_mode(A_STAR, -1, one) == -1 * StateVector.exp(-(ALPHA + BETA), [(0, 1)])
    assert field_mode(BETA_FIELD, -1, one) == StateVector.exp(ZERO_VECTOR, [(1, 1)])


def test_lattice_mode_on_vacuum():
    one = vacuum()
    # e^mu_{-1} 1 = e^mu and lower modes create Schur polynomials in mu(-n)
    assert lattice_mode(GAMMA, -1, one) == StateVector.exp(GAMMA)
    assert lattice_mode(GAMMA, -2, one) == StateVector.exp(GAMMA, [(2, 1)])
    assert lattice_mode(GAMMA, 0, one).is_zero()


def test_coset_mismatch_raises():
    v = StateVector.exp(LatticeVector(param("lam"), 0, 0))
    with pytest.raises(CosetError):
        lattice_mode(ALPHA, 0, v)


def test_default_cocycle_gives_weyl_and_clifford_signs():
    one = vacuum()
    assert superbracket(A, 0, A_STAR, -1, one) == one
    assert superbracket(PSI, 0, PSI_STAR, -1, one) == one
    assert superbracket(PSI_PLUS, 1, PSI_MINUS, -1, one) == one


def test_trivial_diagonal_cocycle_flips_the_weyl_bracket():
    one = vacuum()
    with use_cocycle(Cocycle((0, 0, 0))):
        assert superbracket(A, 0, A_STAR, -1, one) == -1 * one
    assert superbracket(A, 0, A_STAR, -1, one) == one


def test_omega_equals_normal_ordered_product():
    one = vacuum()
    # a*(n) is the kernel mode n - 1
    w = field_mode(A, -1, field_mode(A_STAR, -2, one))
    assert w == omega_state(0)
    assert field_mode(A, -1, field_mode(A_STAR, -1, one)) == StateVector.exp(ZERO_VECTOR, [(1, 1)])


def test_central_charge_values():
    assert central_charge(0) == 2
    assert central_charge(Fraction(1, 2)) == -1
    assert central_charge(1) == 2


@pytest.mark.parametrize("r", [-1, 0, 1, 2])
def test_weyl_relations_on_single_states(r):
    """Each basis state separately, so no batching can hide a failure."""
    lam = param("lam")
    for b in enumerate_basis([pi_exponential(r, lam, n) for n in (-1, 0)], 2, (0, 1)):
        v = StateVector.basis(b)
        for n in range(-2, 3):
            for m in range(-2, 3):
                res = superbracket(A, n, A_STAR, m - 1, v)
                assert res == (v if n + m == 0 else StateVector()), (b, n, m)


def test_virasoro_bracket_on_single_states():
    mu = param("mu")
    L = virasoro_field(mu)
    c = central_charge(mu)
    for b in enumerate_basis([pi_exponential(1, param("lam"), 0)], 2, (0, 1)):
        v = StateVector.basis(b)
        for n, m in ((2, -2), (1, -1), (1, 0), (-1, 2)):
            lhs = superbracket(L, n + 1, L, m + 1, v)
            rhs = (n - m) * field_mode(L, n + m + 1, v)
            if n + m == 0:
                rhs = rhs + c * Fraction(n ** 3 - n, 12) * v
            assert lhs == rhs, (b, n, m)


def test_gl11_currents_on_vacuum():
    one = vacuum()
    assert superbracket(N_FIELD, 1, E_FIELD, -1, one) == one
    assert superbracket(E_FIELD, 1, E_FIELD, -1, one).is_zero()
    assert superbracket(PSI_PLUS, 0, PSI_PLUS, 0, one).is_zero()


@settings(max_examples=25, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(0, 2), st.integers(-2, 2))
def test_heisenberg_brackets(n, m, g, c):
    """[h(n), h'(m)] = n <h, h'> delta_{n+m,0} on random basis states."""
    h1, h2 = (ALPHA, BETA, GAMMA)[g], ALPHA + BETA - GAMMA
    v = StateVector.basis(BasisState(LatticeVector(c, 0, c), [(0, 1), (2, 2)]))
    lhs = heisenberg_mode(h1, n, heisenberg_mode(h2, m, v)) - heisenberg_mode(h2, m, heisenberg_mode(h1, n, v))
    expected = n * pairing(h1, h2) * v if n + m == 0 else StateVector()
    assert lhs == expected
