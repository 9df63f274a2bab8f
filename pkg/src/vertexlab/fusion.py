"""The fusion ring spanned by the simple currents SC(l) and the relaxed labels W(l, lam).

SC(l1) x SC(l2) = SC(l1+l2), SC(l1) x W(l2, lam) = W(l1+l2, lam) and
W(l1, lam) x W(l2, mu) = W(l1+l2, lam+mu) + W(l1+l2-1, lam+mu), the last one only when
lam + mu stays outside the integers.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Mapping

from .gl11 import tensor_and_decompose, verma
from .labels import SC, W, ModuleLabel, NonGenericLabelError, is_integral
from .parsing import BinaryNode, LabelNode, parse_label_expression
from .scalar import ZERO
from .weyl import WeylModuleHandle

__all__ = [
    "OutsideRegimeError",
    "FusionElement",
    "fuse",
    "product",
    "spectral_flow",
    "gl11_weight",
    "check_against_tensor",
    "evaluate",
]


class OutsideRegimeError(NonGenericLabelError):
    """A product whose parameter class would lie in the integers."""


class FusionElement:
    """A finite formal sum of labels with positive integer multiplicities."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[ModuleLabel, int] | Iterable[ModuleLabel] = ()):
        counts = Counter(terms) if not isinstance(terms, Mapping) else Counter(dict(terms))
        for lab, k in counts.items():
            if not isinstance(k, int) or k < 0:
                raise ValueError(f"multiplicity of {lab} must be a non-negative integer, got {k!r}")
        self._terms = {lab: k for lab, k in counts.items() if k}

    @classmethod
    def of(cls, *labels: ModuleLabel) -> "FusionElement":
        return cls(labels)

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: kv[0].sort_key())

    def labels(self) -> list[ModuleLabel]:
        return [lab for lab, _ in self.items()]

    def multiplicity(self, label: ModuleLabel) -> int:
        return self._terms.get(label, 0)

    def __add__(self, other: "FusionElement") -> "FusionElement":
        return FusionElement(Counter(self._terms) + Counter(other._terms))

    def __mul__(self, other: "FusionElement") -> "FusionElement":
        return product(self, other)

    def __eq__(self, other):
        if isinstance(other, FusionElement):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return sum(self._terms.values())

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for lab, k in self.items():
            parts.append(str(lab) if k == 1 else f"{k}*{lab}")
        return " + ".join(parts)

    def __repr__(self):
        return f"FusionElement({self})"

    def to_json(self) -> list:
        return [{"label": str(lab), "multiplicity": k} for lab, k in self.items()]


def fuse(x: ModuleLabel, y: ModuleLabel) -> FusionElement:
    if isinstance(x, SC) and isinstance(y, SC):
        return FusionElement.of(SC(x.ell + y.ell))
    if isinstance(x, SC):
        return FusionElement.of(y.shifted(x.ell))
    if isinstance(y, SC):
        return FusionElement.of(x.shifted(y.ell))
    lam = x.lam + y.lam
    if is_integral(lam):
        raise OutsideRegimeError(f"{x} * {y}: outside classified regime (parameter sum {lam} is an integer)")
    ell = x.ell + y.ell
    return FusionElement.of(W(ell, lam), W(ell - 1, lam))


def product(x: FusionElement, y: FusionElement) -> FusionElement:
    out: Counter = Counter()
    for a, i in x.items():
        for b, j in y.items():
            for c, k in fuse(a, b).items():
                out[c] += i * j * k
    return FusionElement(out)


def spectral_flow(s: int, x: FusionElement) -> FusionElement:
    return FusionElement({lab.shifted(s): k for lab, k in x.items()})


def gl11_weight(label: W):
    """(N, E) highest weight of the singular vector realising W(l, lam) inside S Pi_{1-l}(-lam)."""
    r, lam = 1 - label.ell, -label.lam
    return r + lam / 2, -lam


def _label_from_weight(n_label, e_label) -> W:
    lam = -e_label
    r = n_label - lam / 2
    if not r.is_integer():
        raise AssertionError(f"N-label {n_label} does not come from an integral row")
    return W(1 - int(r), -lam)


def check_against_tensor(x: ModuleLabel, y: ModuleLabel) -> dict:
    """Compare fuse(x, y) with the N-labels surviving in the matching gl(1|1) tensor product."""
    if not (isinstance(x, W) and isinstance(y, W)):
        return {"status": "not applicable", "reason": "simple-current labels have no Verma counterpart"}
    expected = fuse(x, y)
    (n1, e1), (n2, e2) = gl11_weight(x), gl11_weight(y)
    _, parts = tensor_and_decompose(verma(n1, e1), verma(n2, e2))
    found = []
    for part in parts:
        if part.kind != "V" or part.e_label == ZERO:
            return {"status": "fail", "reason": f"unexpected constituent {part}"}
        found.append(_label_from_weight(part.n_label, part.e_label))
    got = FusionElement(found)
    return {
        "status": "pass" if got == expected else "fail",
        "fusion": str(expected),
        "tensor": str(got),
        "constituents": [str(p) for p in parts],
    }


def evaluate(node) -> FusionElement:
    """Evaluate a parsed label expression in the fusion ring."""
    if isinstance(node, str):
        node = parse_label_expression(node)
    if isinstance(node, BinaryNode):
        left, right = evaluate(node.left), evaluate(node.right)
        return left + right if node.op == "+" else product(left, right)
    assert isinstance(node, LabelNode)
    if node.kind == "SC":
        return FusionElement.of(SC(node.index))
    if node.kind == "M":
        return FusionElement.of(SC(0))
    if node.kind == "W":
        return FusionElement.of(W(node.index, node.param))
    if node.kind == "Pi":
        return FusionElement.of(WeylModuleHandle.pi(node.index, node.param).label())
    raise ValueError(f"{node.kind} labels are modules of M (x) F and do not take part in the fusion ring")
