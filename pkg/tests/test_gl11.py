import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vertexlab.fields import field_mode, superbracket
from vertexlab.fock import vacuum
from vertexlab.gl11 import (
    CURRENTS,
    PARITY,
    SUGAWARA_FIELD,
    FiniteGl11Module,
    atypical,
    decompose,
    expected_label,
    invariant_form,
    lie_bracket,
    projective,
    singular_vector_check,
    socle_dimensions,
    sugawara_identity_check,
    tensor,
    tensor_and_decompose,
    truncated_decomposition_table,
    verma,
    verma_graded_dims,
)
from vertexlab.scalar import Matrix, NonGenericError, params, scalar

a, b, c, d = params("a", "b", "c", "d")


def verma_series(max_level):
    """2 * prod_n (1+q^n)^2 / (1-q^n)^2 by series multiplication."""
    s = [1] + [0] * max_level
    for n in range(1, max_level + 1):
        for _ in range(2):
            # multiply by (1 + q^n)
            for k in range(max_level, n - 1, -1):
                s[k] += s[k - n]
            # divide by (1 - q^n)
            for k in range(n, max_level + 1):
                s[k] += s[k - n]
    return [2 * x for x in s]


def test_structure_constants():
    assert lie_bracket("Psi+", "Psi-") == ((1, "E"),)
    assert lie_bracket("N", "Psi+") == ((1, "Psi+"),)
    assert lie_bracket("N", "Psi-") == ((-1, "Psi-"),)
    assert lie_bracket("E", "Psi+") == ()
    assert invariant_form("N", "E") == invariant_form("E", "N") == 1
    # supersymmetry of the form forces the opposite sign on the swapped fermions
    assert invariant_form("Psi+", "Psi-") == -invariant_form("Psi-", "Psi+") == 1
    assert invariant_form("E", "E") == 0


def test_affine_brackets_from_the_lattice():
    one = vacuum()
    for x, fx in CURRENTS.items():
        for y, fy in CURRENTS.items():
            for n in (-1, 0, 1, 2):
                m = -n
                # weight-one currents: x(n) is kernel mode n
                lhs = superbracket(fx, n, fy, m, one)
                rhs = n * invariant_form(x, y) * one
                for coeff, z in lie_bracket(x, y):
                    rhs = rhs + coeff * field_mode(CURRENTS[z], 0, one)
                assert lhs == rhs, (x, y, n)


def test_constructors_satisfy_relations():
    for m in (atypical(a), verma(a, b), projective(a), tensor(verma(a, b), atypical(c))):
        assert isinstance(m, FiniteGl11Module)
    with pytest.raises(ValueError):
        # Psi+ Psi- + Psi- Psi+ must equal E
        FiniteGl11Module("bad", ["v0", "v1"], [0, 1], Matrix.diag([1, 1]), Matrix.diag([0, -1]),
                         Matrix.zeros(2), Matrix([[0, 0], [1, 0]]))


def test_generic_typical_product():
    _, parts = tensor_and_decompose(verma(a, b), verma(c, d))
    assert [str(p) for p in parts] == ["V(a+c,b+d)", "V(a+c-1,b+d)'"]


def test_atypical_times_typical():
    _, parts = tensor_and_decompose(atypical(a), verma(c, d))
    assert [str(p) for p in parts] == ["V(a+c,d)"]
    _, parts = tensor_and_decompose(atypical(a), atypical(c))
    assert [str(p) for p in parts] == ["A(a+c)"]


def test_opposite_charges_give_a_projective():
    T, parts = tensor_and_decompose(verma(a, b), verma(c, -b))
    (p,) = parts
    assert str(p) == "P(a+c)"
    assert socle_dimensions(T) == [1, 3, 4]
    assert socle_dimensions(projective(a)) == [1, 3, 4]


def test_non_generic_specialisations_raise():
    with pytest.raises(NonGenericError):
        tensor_and_decompose(verma(a, 0), verma(c, 0))
    with pytest.raises(NonGenericError):
        # an E = 0 block of dimension 8 is not a single projective cover
        decompose(tensor(verma(a, 0), projective(c)))


@settings(max_examples=30, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3).filter(bool), st.integers(-3, 3), st.integers(-3, 3))
def test_typical_decomposition_exhausts_the_module(r1, s1, r2, s2):
    if s1 + s2 == 0 or s2 == 0:
        return
    T, parts = tensor_and_decompose(verma(r1, s1), verma(r2, s2))
    assert sum(len(p.basis) for p in parts) == T.dimension == 4
    assert {p.n_label for p in parts} == {scalar(r1 + r2), scalar(r1 + r2 - 1)}


def test_socle_of_simple_and_typical():
    assert socle_dimensions(atypical(a)) == [1]
    assert socle_dimensions(verma(a, 0)) == [1, 2]


def test_verma_dims_match_generating_function():
    assert list(verma_graded_dims(4)) == [2, 8, 24, 64, 152]
    assert list(verma_graded_dims(6)) == verma_series(6)


@pytest.mark.parametrize("r", [-1, 0, 1, 2])
@pytest.mark.parametrize("n", [-1, 0, 1])
def test_singular_vectors(r, n, lam):
    for desc, residual in singular_vector_check(r, n, lam, m_max=3):
        assert residual.is_zero(), desc


def test_expected_label_spot_values(lam):
    label = expected_label(1, lam, 0)
    assert (label.n_eigen, label.e_eigen, label.level_shift) == (1 + lam / 2, -lam, -lam / 2)
    label = expected_label(0, lam, 2)
    assert label.level_shift == (lam + 2) / 2


def test_sugawara_vector():
    assert sugawara_identity_check().is_zero()
    # the Sugawara field is a conformal vector with central charge zero
    one = vacuum()
    omega = field_mode(SUGAWARA_FIELD, -1, one)
    assert field_mode(SUGAWARA_FIELD, 3, omega).is_zero()
    assert field_mode(SUGAWARA_FIELD, 1, omega) == 2 * omega


@pytest.mark.parametrize("r", [0, 1, 2])
def test_truncated_table_matches_verma_counts(r, lam):
    table = truncated_decomposition_table(r, lam, 3)
    for s, row in table.items():
        assert row["lattice"] == row["verma"], s
        assert row["label"].e_eigen == -lam - s


def test_parity_table():
    assert PARITY == {"Psi+": 1, "Psi-": 1, "E": 0, "N": 0}
