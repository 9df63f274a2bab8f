"""Symbolic labels of irreducible weight modules of the Weyl vertex algebra.

``SC(l)`` is the spectral flow image rho_l(M) of the vacuum module and ``W(l, lam)``
is rho_l of the relaxed module U~(lam) induced from x^lam C[x, 1/x].  The class of
``lam`` modulo integers is what matters, so labels store a normalised representative.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .scalar import Scalar, scalar

__all__ = ["NonGenericLabelError", "ModuleLabel", "SC", "W", "normalize_class", "is_integral"]


class NonGenericLabelError(ValueError):
    """A label or product would need a parameter class that lies in the integers."""


def _affine(lam) -> tuple[Fraction, dict[str, Fraction]]:
    lam = scalar(lam)
    if not lam.is_affine():
        raise ValueError(f"module parameter {lam} must be affine-linear in the parameters")
    return lam.affine_parts()


def is_integral(lam) -> bool:
    """True when lam is syntactically an integer (no parameter part, integral constant)."""
    c, lin = _affine(lam)
    return not lin and c.denominator == 1


def normalize_class(lam) -> Scalar:
    """Representative of lam + Z with constant part in [0, 1)."""
    lam = scalar(lam)
    c, _ = _affine(lam)
    return lam - floor(c)


@dataclass(frozen=True)
class SC:
    """rho_l(M), a simple current."""

    ell: int

    def shifted(self, s: int) -> "SC":
        return SC(self.ell + s)

    def __str__(self):
        return f"SC({self.ell})"

    def sort_key(self):
        return (0, -self.ell, "")


@dataclass(frozen=True)
class W:
    """rho_l(U~(lam)) for lam outside the integers."""

    ell: int
    lam: Scalar

    def __post_init__(self):
        lam = normalize_class(self.lam)
        if is_integral(lam):
            raise NonGenericLabelError(f"W({self.ell}, {self.lam}): the parameter class lies in the integers")
        object.__setattr__(self, "lam", lam)

    def shifted(self, s: int) -> "W":
        return W(self.ell + s, self.lam)

    def __str__(self):
        return f"W({self.ell},{self.lam})"

    def sort_key(self):
        return (1, -self.ell, str(self.lam))


ModuleLabel = SC | W
