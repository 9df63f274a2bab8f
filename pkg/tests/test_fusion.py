import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vertexlab.fusion import (
    FusionElement,
    OutsideRegimeError,
    check_against_tensor,
    evaluate,
    fuse,
    product,
    spectral_flow,
)
from vertexlab.labels import SC, W, NonGenericLabelError
from vertexlab.scalar import params

a, b, c = params("a", "b", "c")
PARAMS = (a, b, c, -a, a + b)

labels = st.one_of(
    st.integers(-2, 2).map(SC),
    st.tuples(st.integers(-2, 2), st.sampled_from((a, b, c))).map(lambda t: W(*t)),
)
elements = st.lists(labels, min_size=1, max_size=3).map(FusionElement)


def safe_product(x, y):
    try:
        return product(x, y)
    except OutsideRegimeError:
        return None


def test_worked_examples():
    assert str(fuse(W(0, a), W(0, b))) == "W(0,a+b) + W(-1,a+b)"
    assert fuse(SC(1), SC(-3)) == FusionElement.of(SC(-2))
    assert fuse(SC(2), W(-1, a)) == FusionElement.of(W(1, a))
    assert fuse(W(1, a), SC(-1)) == FusionElement.of(W(0, a))


def test_integral_parameter_sum_is_refused():
    with pytest.raises(OutsideRegimeError, match="outside classified regime"):
        fuse(W(0, a), W(1, -a))
    with pytest.raises(OutsideRegimeError):
        fuse(W(0, a), W(0, 3 - a))
    assert issubclass(OutsideRegimeError, NonGenericLabelError)


def test_parameter_classes_are_taken_modulo_integers():
    assert fuse(W(0, a + 1), W(0, b)) == fuse(W(0, a), W(0, b - 2))


def test_simple_currents_form_a_group():
    for l1, l2 in itertools.product(range(-3, 4), repeat=2):
        assert fuse(SC(l1), SC(l2)) == FusionElement.of(SC(l1 + l2))
    for ell in range(-3, 4):
        assert fuse(SC(ell), SC(-ell)) == FusionElement.of(SC(0))
        assert fuse(SC(0), W(ell, a)) == FusionElement.of(W(ell, a))


@settings(max_examples=60, deadline=None)
@given(elements, elements)
def test_commutativity(x, y):
    assert safe_product(x, y) == safe_product(y, x)


@settings(max_examples=60, deadline=None)
@given(elements, elements, elements)
def test_associativity(x, y, z):
    xy, yz = safe_product(x, y), safe_product(y, z)
    if xy is None or yz is None:
        return
    left, right = safe_product(xy, z), safe_product(x, yz)
    if left is None or right is None:
        return
    assert left == right


@settings(max_examples=60, deadline=None)
@given(elements, elements, elements)
def test_distributivity(x, y, z):
    lhs = safe_product(x, y + z)
    if lhs is None:
        return
    assert lhs == product(x, y) + product(x, z)


@settings(max_examples=60, deadline=None)
@given(st.integers(-3, 3), elements, elements)
def test_spectral_flow_equivariance(s, x, y):
    xy = safe_product(x, y)
    if xy is None:
        return
    assert spectral_flow(s, xy) == product(spectral_flow(s, x), y) == product(x, spectral_flow(s, y))
    assert spectral_flow(s, x) == product(FusionElement.of(SC(s)), x)


@pytest.mark.parametrize(
    "x,y",
    [
        (W(0, a), W(0, b)),
        (W(1, a), W(0, b)),
        (W(-1, a), W(2, b)),
        (W(0, a), W(0, a)),
        (W(2, a), W(-2, c)),
        (W(1, a + b), W(1, c)),
        (W(0, -a), W(-1, b)),
        (W(3, a), W(0, b + c)),
        (W(-2, b), W(-1, c)),
        (W(0, a / 2), W(1, b)),
    ],
)
def test_fusion_matches_gl11_tensor_products(x, y):
    result = check_against_tensor(x, y)
    assert result["status"] == "pass", result


def test_tensor_check_skips_simple_currents():
    assert check_against_tensor(SC(1), W(0, a))["status"] == "not applicable"


def test_evaluate_expressions():
    assert evaluate("W(0,a) * W(0,b)") == fuse(W(0, a), W(0, b))
    assert evaluate("SC(1) * (W(0,a) + W(1,b))") == FusionElement.of(W(1, a), W(2, b))
    assert evaluate("M * SC(2)") == FusionElement.of(SC(2))
    assert evaluate("Pi(1,a)") == FusionElement.of(W(0, -a))
    with pytest.raises(ValueError):
        evaluate("SPi(1,a)")


def test_element_printing_and_json():
    x = FusionElement.of(W(0, a), W(0, a), SC(1))
    assert x.multiplicity(W(0, a)) == 2
    assert len(x) == 3
    assert {"label": "W(0,a)", "multiplicity": 2} in x.to_json()
    assert str(FusionElement()) == "0"
    with pytest.raises(ValueError):
        FusionElement({W(0, a): -1})
