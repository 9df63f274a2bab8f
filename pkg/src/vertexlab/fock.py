"""Fock-space basis states over the rank-3 lattice spanned by alpha, beta, gamma.

A basis state is a product of negative Heisenberg modes h(-n) applied to an
exponential e^nu.  The fermionic directions are carried by gamma, so the
super-parity of a state is the integer part of its gamma coefficient mod 2.
"""

from __future__ import annotations

from functools import lru_cache

import flint
from typing import Iterable, Iterator, Mapping, Sequence

from .scalar import ONE, ZERO, Scalar, ensure_depth, generation, layout, scalar, tag, tag_split

GENERATORS = ("alpha", "beta", "gamma")
# diagonal Gram matrix of the lattice in the basis above
GRAM = (1, -1, 1)


_INTERN: dict = {}
_SUMS: dict = {}


class LatticeVector:
    """c_alpha*alpha + c_beta*beta + c_gamma*gamma with Scalar coefficients.

    Instances are interned, so equal vectors are usually the same object.
    """

    __slots__ = ("coeffs", "_hash", "_int")

    def __new__(cls, alpha=0, beta=0, gamma=0):
        return cls._of((scalar(alpha), scalar(beta), scalar(gamma)))

    @classmethod
    def _of(cls, coeffs: tuple[Scalar, Scalar, Scalar]) -> "LatticeVector":
        hit = _INTERN.get(coeffs)
        if hit is not None:
            return hit
        v = object.__new__(cls)
        v.coeffs = coeffs
        v._hash = hash(coeffs)
        v._int = None
        _INTERN[coeffs] = v
        return v

    def __reduce__(self):
        return (LatticeVector, self.coeffs)

    @property
    def alpha(self) -> Scalar:
        return self.coeffs[0]

    @property
    def beta(self) -> Scalar:
        return self.coeffs[1]

    @property
    def gamma(self) -> Scalar:
        return self.coeffs[2]

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        key = (self, other)
        hit = _SUMS.get(key)
        if hit is None:
            hit = _SUMS[key] = LatticeVector._of(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))
        return hit

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector._of(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "LatticeVector":
        return LatticeVector._of(tuple(-a for a in self.coeffs))

    def __mul__(self, c) -> "LatticeVector":
        c = scalar(c)
        return LatticeVector._of(tuple(c * a for a in self.coeffs))

    __rmul__ = __mul__

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, LatticeVector):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return self._hash

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def is_affine(self) -> bool:
        """Every coefficient is integer + linear combination of parameters."""
        for c in self.coeffs:
            if not c.is_affine():
                return False
            if c.affine_parts()[0].denominator != 1:
                return False
        return True

    def integer_part(self) -> tuple[int, int, int]:
        if self._int is not None:
            return self._int
        out = []
        for c in self.coeffs:
            const = c.affine_parts()[0]
            if const.denominator != 1:
                raise ValueError(f"{self} has a non-integral constant part")
            out.append(const.numerator)
        self._int = tuple(out)
        return self._int

    def parity(self) -> int:
        return self.integer_part()[2] % 2

    def __str__(self):
        parts = []
        for name, c in zip(GENERATORS, self.coeffs):
            if c.is_zero():
                continue
            text = str(c)
            if c == ONE:
                term = name
            elif c == -ONE:
                term = "-" + name
            elif c.is_constant():
                term = f"{text}*{name}"
            else:
                term = f"({text})*{name}"
            if parts and not term.startswith("-"):
                term = "+" + term
            parts.append(term)
        return "".join(parts) or "0"

    def __repr__(self):
        return f"LatticeVector({self})"

    def to_json(self) -> dict:
        return {name: list(c.integer_form()) for name, c in zip(GENERATORS, self.coeffs)}


ALPHA = LatticeVector(1, 0, 0)
BETA = LatticeVector(0, 1, 0)
GAMMA = LatticeVector(0, 0, 1)
ZERO_VECTOR = LatticeVector(0, 0, 0)


def pairing(u: LatticeVector, v: LatticeVector) -> Scalar:
    acc = ZERO
    for g, a, b in zip(GRAM, u.coeffs, v.coeffs):
        if a and b:
            acc = acc + g * (a * b)
    return acc


Monomial = tuple  # sorted tuple of (generator index, depth)


def canonical_monomial(factors: Iterable[tuple[int, int]]) -> Monomial:
    """Generator first, then depth descending."""
    return tuple(sorted(factors, key=lambda f: (f[0], -f[1])))


def monomial_degree(mono: Monomial) -> int:
    return sum(n for _, n in mono)


def monomial_str(mono: Monomial) -> str:
    return "".join(f"{GENERATORS[g]}(-{n})" for g, n in mono)


class BasisState:
    """prod h(-n) e^nu, with the product held as a canonical monomial."""

    __slots__ = ("exponential", "monomial", "_hash")

    def __init__(self, exponential: LatticeVector, monomial: Iterable[tuple[int, int]] = ()):
        if not exponential.is_affine():
            raise ValueError(f"exponential {exponential} is not affine-linear with integer constants")
        mono = []
        for g, n in monomial:
            if isinstance(g, str):
                g = GENERATORS.index(g)
            if not (0 <= g < 3) or n < 1:
                raise ValueError(f"bad Heisenberg factor ({g}, {n})")
            mono.append((g, n))
        self.exponential = exponential
        self.monomial = canonical_monomial(mono)
        self._hash = None

    @classmethod
    def _of(cls, exponential: LatticeVector, monomial: Monomial) -> "BasisState":
        b = object.__new__(cls)
        b.exponential = exponential
        b.monomial = monomial
        b._hash = None
        return b

    @property
    def degree(self) -> int:
        return monomial_degree(self.monomial)

    heisenberg_degree = degree

    def parity(self) -> int:
        return self.exponential.parity()

    def __eq__(self, other):
        if not isinstance(other, BasisState):
            return NotImplemented
        return self.monomial == other.monomial and self.exponential == other.exponential

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.exponential, self.monomial))
        return self._hash

    def sort_key(self):
        return (self.exponential.integer_part(), str(self.exponential), self.degree, self.monomial)

    def __str__(self):
        return f"{monomial_str(self.monomial)}e^{{{self.exponential}}}"

    __repr__ = __str__

    def to_json(self) -> dict:
        return {
            "exponential": self.exponential.to_json(),
            "monomial": [[GENERATORS[g], -n] for g, n in self.monomial],
        }


def charge(state: BasisState, h: LatticeVector) -> Scalar:
    """Eigenvalue of the zero mode h(0) on ``state``."""
    return pairing(h, state.exponential)


# Sector polynomials use the Heisenberg coordinates u = (alpha+beta)(-n),
# v = alpha(-n), w = gamma(-n).  Since alpha+beta is isotropic, the exponentials of
# the Weyl generators touch a single coordinate per depth, which keeps their mode
# actions sparse.  Conversion to alpha/beta/gamma monomials happens only on output.
INTERNAL_BASIS = ((1, 1, 0), (1, 0, 0), (0, 0, 1))
# generator g = sum_i TO_INTERNAL[g][i] * INTERNAL_BASIS[i]
TO_INTERNAL = ((0, 1, 0), (1, -1, 0), (0, 0, 1))


def internal_coordinates(h: LatticeVector) -> tuple[Scalar, Scalar, Scalar]:
    """Coefficients of h in the internal basis."""
    return tuple(sum((h.coeffs[g] * TO_INTERNAL[g][i] for g in range(3)), ZERO) for i in range(3))


def internal_pairings(h: LatticeVector) -> tuple[Scalar, Scalar, Scalar]:
    """<h, e_i> for the internal basis vectors e_i."""
    return tuple(
        sum((GRAM[g] * h.coeffs[g] * INTERNAL_BASIS[i][g] for g in range(3)), ZERO) for i in range(3)
    )


def monomial_poly(mono: Monomial):
    """The Heisenberg monomial as a polynomial in the shared context."""
    lay = layout()
    key = (generation(), mono)
    hit = _MONO_CACHE.get(key)
    if hit is not None:
        return hit
    if mono and max(n for _, n in mono) > lay.depth:
        lay = ensure_depth(max(n for _, n in mono))
        key = (generation(), mono)
    p = lay.one
    for g, n in mono:
        form = lay.ctx.constant(0)
        for i, c in enumerate(TO_INTERNAL[g]):
            if c:
                form = form + lay.gens[lay.heis_index(i, n)] * c
        p = p * form
    _MONO_CACHE[key] = p
    return p


_MONO_CACHE: dict = {}
_OUTPUT_CTX: dict = {}


def _output_context(ctx):
    """A context with the same leading variables but alpha/beta/gamma mode variables."""
    hit = _OUTPUT_CTX.get(ctx)
    if hit is None:
        names = ctx.names()
        h0 = _heis_start(names)
        out_names = names[:h0] + tuple(
            f"_{'abg'[g]}{n}" for n in range(1, (len(names) - h0) // 3 + 1) for g in range(3)
        )
        out = flint.fmpq_mpoly_ctx.get(out_names, "deglex")
        gens = out.gens()
        images = list(gens[:h0])
        for k in range(h0, len(names), 3):
            a, b, c = gens[k], gens[k + 1], gens[k + 2]
            images += [a + b, a, c]
        hit = _OUTPUT_CTX[ctx] = (out, images)
    return hit


def _heis_start(names) -> int:
    return next((i for i, n in enumerate(names) if n[:2] in ("_u", "_v", "_w") and n[2:].isdigit()), len(names))


def split_poly(p) -> dict[Monomial, object]:
    """Group the terms of a sector polynomial by alpha/beta/gamma Heisenberg monomial.

    Returns {monomial: coefficient polynomial (no Heisenberg variables)}.
    """
    ctx = p.context()
    out_ctx, images = _output_context(ctx)
    q = p.compose(*images, ctx=out_ctx)
    names = ctx.names()
    h0 = _heis_start(names)
    groups: dict = {}
    for exps, c in q.terms():
        head = tuple(exps[:h0]) + (0,) * (len(names) - h0)
        mono = []
        for i in range(h0, len(names)):
            e = int(exps[i])
            if e:
                g, n = (i - h0) % 3, (i - h0) // 3 + 1
                mono.extend([(g, n)] * e)
        mono = canonical_monomial(mono)
        groups.setdefault(mono, {})[head] = c
    return {m: ctx.from_dict(d) for m, d in groups.items()}


class StateVector:
    """Finite linear combination of BasisStates; zero coefficients are never stored.

    Internally each exponential sector is a single Scalar whose numerator is a
    polynomial in the parameters and in variables standing for the Heisenberg modes.
    """

    __slots__ = ("sectors", "_terms")

    def __init__(self, terms: Mapping[BasisState, Scalar] | Iterable[tuple[BasisState, Scalar]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[LatticeVector, Scalar] = {}
        for b, c in items:
            c = scalar(c)
            if c.is_zero():
                continue
            x = c * Scalar._from_poly(monomial_poly(b.monomial))
            prev = acc.get(b.exponential)
            acc[b.exponential] = x if prev is None else prev + x
        self.sectors = {nu: x for nu, x in acc.items() if not x.is_zero()}
        self._terms = None

    @classmethod
    def _wrap(cls, sectors: dict) -> "StateVector":
        v = object.__new__(cls)
        v.sectors = sectors
        v._terms = None
        return v

    @classmethod
    def basis(cls, state: BasisState, coeff=1) -> "StateVector":
        return cls({state: coeff})

    @classmethod
    def exp(cls, nu: LatticeVector, monomial=()) -> "StateVector":
        return cls({BasisState(nu, monomial): ONE})

    @property
    def terms(self) -> dict[BasisState, Scalar]:
        if self._terms is None:
            out = {}
            for nu, x in self.sectors.items():
                x._current()
                for mono, c in split_poly(x.num).items():
                    coeff = Scalar._from_poly(c) if x._poly else Scalar._normalized(c, x.den)
                    out[BasisState._of(nu, mono)] = coeff
            self._terms = out
        return self._terms

    def is_zero(self) -> bool:
        return not self.sectors

    def __bool__(self):
        return bool(self.sectors)

    def __len__(self):
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def sorted_items(self) -> list[tuple[BasisState, Scalar]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def coefficient(self, state: BasisState) -> Scalar:
        return self.terms.get(state, ZERO)

    def __add__(self, other: "StateVector") -> "StateVector":
        out = dict(self.sectors)
        for nu, x in other.sectors.items():
            prev = out.get(nu)
            if prev is None:
                out[nu] = x
            else:
                s = prev + x
                if s.is_zero():
                    del out[nu]
                else:
                    out[nu] = s
        return StateVector._wrap(out)

    def __sub__(self, other: "StateVector") -> "StateVector":
        return self + (-other)

    def __neg__(self) -> "StateVector":
        return StateVector._wrap({nu: -x for nu, x in self.sectors.items()})

    def __rmul__(self, c) -> "StateVector":
        c = scalar(c)
        if c.is_zero():
            return StateVector._wrap({})
        return StateVector._wrap({nu: c * x for nu, x in self.sectors.items()})

    __mul__ = __rmul__

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.sectors == other.sectors

    def __hash__(self):
        return hash(frozenset(self.sectors.items()))

    def truncate(self, max_degree: int) -> "StateVector":
        if all(b.degree <= max_degree for b in self.terms):
            return self
        return StateVector((b, c) for b, c in self.terms.items() if b.degree <= max_degree)

    def charge_decomposition(self) -> dict[tuple[int, int, int], "StateVector"]:
        out: dict[tuple[int, int, int], dict] = {}
        for nu, x in self.sectors.items():
            out.setdefault(nu.integer_part(), {})[nu] = x
        return {k: StateVector._wrap(v) for k, v in sorted(out.items())}

    def max_degree(self) -> int:
        return max((b.degree for b in self.terms), default=0)

    def __str__(self):
        if not self.sectors:
            return "0"
        parts = []
        for b, c in self.sorted_items():
            if c == ONE:
                parts.append(f"+{b}")
            elif c == -ONE:
                parts.append(f"-{b}")
            else:
                parts.append(f"+({c})*{b}")
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s

    __repr__ = __str__

    def to_json(self) -> list:
        return [
            {"state": b.to_json(), "coefficient": list(c.integer_form())} for b, c in self.sorted_items()
        ]


def normalize(v: StateVector | Iterable[tuple[BasisState, Scalar]]) -> StateVector:
    """Merge repeated basis states and drop zero coefficients."""
    if isinstance(v, StateVector):
        return StateVector._wrap({nu: x for nu, x in v.sectors.items() if not x.is_zero()})
    return StateVector(v)


def vacuum() -> StateVector:
    return StateVector.exp(ZERO_VECTOR)


@lru_cache(maxsize=None)
def monomials_of_degree(degree: int, generators: tuple[int, ...] = (0, 1, 2)) -> tuple[Monomial, ...]:
    """All canonical monomials of exact Heisenberg degree ``degree``."""
    items = [(g, n) for g in generators for n in range(degree, 0, -1)]
    out: list[Monomial] = []

    def rec(i: int, left: int, acc: list):
        if left == 0:
            out.append(canonical_monomial(acc))
            return
        if i == len(items):
            return
        g, n = items[i]
        k = 0
        while k * n <= left:
            rec(i + 1, left - k * n, acc + [(g, n)] * k)
            k += 1

    rec(0, degree, [])
    return tuple(sorted(set(out)))


def pi_exponential(r: int, lam, n: int = 0, c: int | None = None) -> LatticeVector:
    """r*beta + (lam+n)*(alpha+beta), plus c*gamma when ``c`` is given."""
    x = scalar(lam) + n
    return LatticeVector(x, x + r, 0 if c is None else c)


def enumerate_basis(
    exponentials: Sequence[LatticeVector] | LatticeVector,
    max_degree: int,
    generators: Sequence[int | str] = (0, 1, 2),
) -> list[BasisState]:
    """All basis states with the given exponentials and Heisenberg degree <= max_degree."""
    if max_degree < 0:
        raise ValueError("max_degree must be non-negative")
    if isinstance(exponentials, LatticeVector):
        exponentials = [exponentials]
    gens = tuple(sorted(GENERATORS.index(g) if isinstance(g, str) else g for g in generators))
    out = []
    for nu in exponentials:
        for d in range(max_degree + 1):
            out.extend(BasisState._of(nu, m) for m in monomials_of_degree(d, gens))
    for nu in exponentials:
        if not nu.is_affine():
            raise ValueError(f"exponential {nu} is not affine-linear with integer constants")
    return out


def iter_degree(states: Iterable[BasisState], degree: int) -> Iterator[BasisState]:
    return (b for b in states if b.degree == degree)


def tagged_sum(states: Sequence[BasisState]) -> StateVector:
    """sum_i t^(i+1) * states[i] for a formal tag variable t.

    Mode actions never touch t, so a linear operator identity holds on every state
    iff it holds on this sum, and failing states are read off from the powers of t
    left in the residual.
    """
    return StateVector({b: tag(i) for i, b in enumerate(states)})


def untag(v: StateVector) -> dict[int, StateVector]:
    """{i: coefficient of tag i in v}."""
    out: dict[int, dict] = {}
    for nu, x in v.sectors.items():
        for i, y in tag_split(x).items():
            out.setdefault(i, {})[nu] = y
    return {i: StateVector._wrap(d) for i, d in sorted(out.items())}
