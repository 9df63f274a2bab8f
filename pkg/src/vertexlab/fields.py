"""Mode actions of free-field vertex operators on the Fock space.

The vertex operator of an exponential is

    Y(e^mu, z) = E^-(-mu, z) E^+(-mu, z) e^mu z^{mu(0)}

where e^mu carries a cocycle sign, E^+ shifts every factor g(-n) of the Heisenberg
monomial to g(-n) - <mu, g> z^{-n}, and E^- multiplies by Schur polynomials in the
creation modes mu(-n).  Composite fields Y(prod g_i(-n_i) e^mu, z) are normal ordered:
a subset of the Heisenberg prefactor contributes creation parts on the left, the rest
contributes annihilation parts (including the zero mode) on the right.

Mode k of a field is the coefficient of z^{-k-1}.  Its index may carry a Scalar offset,
which is how intertwining operators between modules with non-integral exponents are
handled.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Protocol, Sequence

from .fock import (
    ALPHA,
    BETA,
    GAMMA,
    GRAM,
    ZERO_VECTOR,
    BasisState,
    LatticeVector,
    StateVector,
    canonical_monomial,
    internal_coordinates,
    internal_pairings,
    pairing,
    vacuum,
)
import flint

from .scalar import ONE, ZERO, Scalar, ensure_depth, generation, layout, scalar

__all__ = [
    "CosetError",
    "Cocycle",
    "cocycle",
    "use_cocycle",
    "ModeIndex",
    "Field",
    "TwistedField",
    "heisenberg_mode",
    "lattice_mode",
    "field_mode",
    "apply_product",
    "superbracket",
    "spectral_flow_twist",
    "screening_check",
    "exponential_field",
    "heisenberg_field",
    "omega_state",
    "virasoro_field",
    "central_charge",
    "A",
    "A_STAR",
    "BETA_FIELD",
    "PSI_PLUS",
    "PSI_MINUS",
    "E_FIELD",
    "N_FIELD",
    "PSI",
    "PSI_STAR",
    "SCREENING",
    "OMEGA",
    "clear_caches",
]


class CosetError(ValueError):
    """The requested mode index is not in the exponent coset of the field on this state."""


# ---------------------------------------------------------------------------
# cocycle


@dataclass(frozen=True)
class Cocycle:
    """Bimultiplicative sign eps(mu, nu) on integer parts.

    eps(x_i, x_j) = -1 for i > j, +1 for i < j, and eps(x_i, x_i) = (-1)^diagonal[i].
    """

    diagonal: tuple[int, int, int] = (0, 1, 0)

    def __call__(self, mu: tuple[int, int, int], nu: tuple[int, int, int]) -> int:
        e = 0
        for i in range(3):
            if not mu[i]:
                continue
            for j in range(i):
                e += mu[i] * nu[j]
            e += self.diagonal[i] * mu[i] * nu[i]
        return -1 if e % 2 else 1


# eps(x, x) = (-1)^{q(q-1)/2} with q = <x, x>: this gives eps(mu, -mu) = 1 for the
# exponentials of the generating fields
DEFAULT_COCYCLE = Cocycle((0, 1, 0))
_cocycle = DEFAULT_COCYCLE


def cocycle() -> Cocycle:
    return _cocycle


@contextmanager
def use_cocycle(c: Cocycle):
    """Temporarily switch the cocycle (clears every mode cache on entry and exit)."""
    global _cocycle
    old = _cocycle
    _cocycle = c
    clear_caches()
    try:
        yield c
    finally:
        _cocycle = old
        clear_caches()


# ---------------------------------------------------------------------------
# mode indices


@dataclass(frozen=True)
class ModeIndex:
    base: int
    offset: Scalar = ZERO

    @classmethod
    def of(cls, k) -> "ModeIndex":
        if isinstance(k, ModeIndex):
            return k
        if isinstance(k, int):
            return cls(k)
        k = scalar(k)
        if k.is_integer():
            return cls(int(k))
        return cls(0, k)

    def value(self) -> Scalar:
        return self.offset + self.base

    def shift(self, n: int) -> "ModeIndex":
        return ModeIndex(self.base + n, self.offset)

    def __str__(self):
        return str(self.value())


# ---------------------------------------------------------------------------
# fields


class Field:
    """Y(P e^mu, z) for a profile state whose terms share one exponential mu."""

    __slots__ = ("profile", "exponential", "terms", "name", "_hash")

    def __init__(self, profile: StateVector, name: str | None = None):
        exps = {b.exponential for b in profile.terms}
        if len(exps) > 1:
            raise ValueError("a field profile must have a single exponential")
        self.profile = profile
        self.exponential = exps.pop() if exps else ZERO_VECTOR
        self.terms = tuple((b.monomial, c) for b, c in profile.sorted_items())
        self.name = name
        self._hash = hash((self.exponential, frozenset(self.terms)))

    @property
    def parity(self) -> int:
        return self.exponential.parity()

    def __eq__(self, other):
        if not isinstance(other, Field):
            return NotImplemented
        return self.exponential == other.exponential and set(self.terms) == set(other.terms)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Field({self.name or self.profile})"

    def mode(self, k, v: StateVector, max_degree: int | None = None) -> StateVector:
        return field_mode(self, k, v, max_degree)

    def __add__(self, other: "Field") -> "Field":
        return Field(self.profile + other.profile)

    def scaled(self, c) -> "Field":
        return Field(scalar(c) * self.profile, self.name)


class Operator(Protocol):
    parity: int

    def mode(self, k, v: StateVector, max_degree: int | None = None) -> StateVector: ...


def exponential_field(mu: LatticeVector, name: str | None = None) -> Field:
    return Field(StateVector.exp(mu), name)


def heisenberg_field(h: LatticeVector, depth: int = 1, name: str | None = None) -> Field:
    """Y(h(-depth) 1, z) for a direction h = sum c_g g."""
    terms = {}
    for g, c in enumerate(h.coeffs):
        if not c.is_zero():
            terms[BasisState._of(ZERO_VECTOR, ((g, depth),))] = c
    return Field(StateVector(terms), name)


# ---------------------------------------------------------------------------
# the kernel: each exponential sector is one polynomial in the Heisenberg variables

_caches: dict = {}


def clear_caches() -> None:
    _caches.clear()


def _cache(name: str) -> dict:
    key = (name, generation())
    c = _caches.get(key)
    if c is None:
        c = _caches[key] = {}
    return c


def _poly_of(x: Scalar):
    if not x.is_polynomial():
        raise ValueError(f"expected a polynomial coefficient, got {x}")
    x._current()
    return x.num


_GENERATOR_VECTORS = (ALPHA, BETA, GAMMA)


def _direction(h: LatticeVector) -> tuple[Scalar, Scalar, Scalar]:
    # <h, e_i> for each internal coordinate direction
    return internal_pairings(h)


def _creation_form(h: LatticeVector, n: int):
    """h(-n) as a linear form in the Heisenberg variables."""
    cache = _cache("form")
    key = (h, n)
    hit = cache.get(key)
    if hit is None:
        lay = layout()
        hit = lay.ctx.constant(0)
        for i, c in enumerate(internal_coordinates(h)):
            if not c.is_zero():
                hit = hit + _poly_of(c) * lay.gens[lay.heis_index(i, n)]
        cache[key] = hit
    return hit


def _shape(P) -> tuple[int, int]:
    """(largest depth present, weighted degree bound) of a sector polynomial."""
    lay = layout()
    degs = P.degrees()
    depth = 0
    wdeg = 0
    for i in range(lay.heis0, len(degs)):
        e = degs[i]
        if e > 0:
            n = (i - lay.heis0) // 3 + 1
            depth = max(depth, n)
            wdeg += n * int(e)
    return depth, wdeg


def _heis_poly(h: LatticeVector, n: int, P, nu: LatticeVector):
    if n < 0:
        return P * _creation_form(h, -n)
    if n == 0:
        c = pairing(h, nu)
        return P * _poly_of(c) if not c.is_zero() else P.context().constant(0)
    lay = layout()
    out = P.context().constant(0)
    for g, c in enumerate(_direction(h)):
        if not c.is_zero():
            d = P.derivative(lay.heis_index(g, n))
            if not d.is_zero():
                out = out + d * (_poly_of(c) * n)
    return out


def _schur(mu: LatticeVector, q: int):
    """Coefficient of z^q in exp(sum_{m>0} mu(-m) z^m / m)."""
    cache = _cache("schur")
    key = (mu, q)
    hit = cache.get(key)
    if hit is not None:
        return hit
    ctx = layout().ctx
    if q == 0:
        hit = ctx.constant(1)
    elif mu.is_zero():
        hit = ctx.constant(0)
    else:
        acc = ctx.constant(0)
        for m in range(1, q + 1):
            acc = acc + _schur(mu, q - m) * _creation_form(mu, m)
        hit = acc * flint.fmpq(1, q)
    cache[key] = hit
    return hit


def _annihilation_series(mu: LatticeVector, P) -> list:
    """[coefficient of z^{-D} in E^+(-mu, z) P for D = 0, 1, ...] up to the last nonzero one."""
    if mu.is_zero():
        return [P]
    lay = layout()
    depth = _shape(P)[0]
    mg = [(g, _poly_of(c)) for g, c in enumerate(_direction(mu)) if not c.is_zero()]
    series = [P]
    zeros = 0
    D = 0
    # S_D only involves S_{D-1}, ..., S_{D-depth}; a run of `depth` zeros ends the series
    while zeros < depth:
        D += 1
        acc = P.context().constant(0)
        for n in range(1, min(D, depth) + 1):
            prev = series[D - n]
            if prev.is_zero():
                continue
            for g, c in mg:
                d = prev.derivative(lay.heis_index(g, n))
                if not d.is_zero():
                    acc += d * (c * n)
        series.append(acc * flint.fmpq(-1, D))
        zeros = zeros + 1 if acc.is_zero() else 0
    while len(series) > 1 and series[-1].is_zero():
        series.pop()
    return series


def _dressed(mu: LatticeVector, creators: tuple, N: int):
    """Coefficient of z^N in E^-(-mu, z) times the creation parts of the prefactor.

    Both factors are independent of the state they act on, so this is cached.
    """
    cache = _cache("dressed")
    key = (mu, creators, N)
    hit = cache.get(key)
    if hit is None:
        hit = layout().ctx.constant(0)
        for q in range(N + 1):
            C = _creation_poly(creators, N - q)
            if C.is_zero():
                continue
            Sq = _schur(mu, q)
            if not Sq.is_zero():
                hit = hit + Sq * C
        cache[key] = hit
    return hit


def _binom(a: int, k: int) -> int:
    # generalised binomial coefficient, a may be negative
    if k < 0:
        return 0
    if a >= 0:
        return comb(a, k)
    return (-1) ** k * comb(-a + k - 1, k)


def _compositions(total: int, depths: Sequence[int]):
    """Creation mode tuples (m_i >= n_i) with sum(m_i - n_i) = total."""
    if not depths:
        if total == 0:
            yield ()
        return
    n0, rest = depths[0], depths[1:]
    for extra in range(total + 1):
        for tail in _compositions(total - extra, rest):
            yield (n0 + extra,) + tail


def _creation_poly(creators: tuple, rest: int):
    """Coefficient of z^rest in prod_i (d^{(n_i - 1)} g_i)(z)_+."""
    cache = _cache("creation")
    key = (creators, rest)
    hit = cache.get(key)
    if hit is not None:
        return hit
    lay = layout()
    depths = [n for _, n in creators]
    out = lay.ctx.constant(0)
    for ms in _compositions(rest, depths):
        term = lay.ctx.constant(1)
        bc = 1
        for (g, n), m in zip(creators, ms):
            bc *= comb(m - 1, n - 1)
            term = term * _creation_form(_GENERATOR_VECTORS[g], m)
        out = out + term * bc
    cache[key] = out
    return out


class _NeedDepth(Exception):
    """Raised when a mode action needs Heisenberg variables beyond the current layout."""

    def __init__(self, depth: int):
        self.depth = depth


def _field_poly(f: Field, t0: int, P, nu: LatticeVector):
    """Coefficient of z^{<mu,nu> + t0} in Y(f, z) applied to the sector polynomial P."""
    mu = f.exponential
    lay = layout()
    ctx = lay.ctx
    sign = _cocycle(mu.integer_part(), nu.integer_part())
    # buckets[(creators, N)] collects everything to be multiplied by _dressed(mu, creators, N)
    buckets: dict = {}
    for mono, coeff in f.terms:
        c0 = _poly_of(coeff) * sign
        nf = len(mono)
        for mask in range(1 << nf):
            creators = tuple(mono[i] for i in range(nf) if mask >> i & 1)
            annihilators = [mono[i] for i in range(nf) if not mask >> i & 1]
            # annihilation parts act first; stage maps z-power -> polynomial
            stage = {0: P}
            for g, n in annihilators:
                h = _GENERATOR_VECTORS[g]
                new: dict = {}
                for p, Q in stage.items():
                    for m in range(0, _shape(Q)[0] + 1):
                        R = _heis_poly(h, m, Q, nu)
                        if R.is_zero():
                            continue
                        k = p - m - n
                        R = R * _binom(-m - 1, n - 1)
                        if k in new:
                            new[k] += R
                        else:
                            new[k] = R
                stage = new
            for p1, Q in stage.items():
                if Q.is_zero():
                    continue
                # the z^{-D} part of E^+ pairs with the z^{t0-p1+D} part of the rest
                for D, S in enumerate(_annihilation_series(mu, Q)):
                    N = t0 - p1 + D
                    if N < 0 or S.is_zero():
                        continue
                    key = (creators, N)
                    if key in buckets:
                        buckets[key] += S * c0
                    else:
                        buckets[key] = S * c0
    need = max((N + max((n for _, n in cr), default=0) for cr, N in buckets), default=0)
    if need > lay.depth:
        raise _NeedDepth(need)
    out = ctx.constant(0)
    for (creators, N), R in buckets.items():
        if R.is_zero():
            continue
        K = _dressed(mu, creators, N)
        if not K.is_zero():
            out += R * K
    return out


def _check_degree(max_degree):
    if max_degree is not None and max_degree < 0:
        raise ValueError("max_degree must be non-negative")


def _apply(v: StateVector, shift: LatticeVector, per_sector, depth_needed, max_degree) -> StateVector:
    """Apply a sector-wise polynomial map; output sector is nu + shift."""
    _check_degree(max_degree)
    need = 0
    for nu, x in v.sectors.items():
        need = max(need, depth_needed(nu, x))
    ensure_depth(need)
    while True:
        try:
            out = {}
            for nu, x in v.sectors.items():
                x._current()
                R = per_sector(nu, x.num)
                if R.is_zero():
                    continue
                y = Scalar._from_poly(R) if x.is_polynomial() else Scalar._normalized(R, x.den)
                key = nu + shift if not shift.is_zero() else nu
                prev = out.get(key)
                out[key] = y if prev is None else prev + y
            break
        except _NeedDepth as e:
            ensure_depth(e.depth)
    res = StateVector._wrap({k: y for k, y in out.items() if not y.is_zero()})
    return res.truncate(max_degree) if max_degree is not None else res


def heisenberg_mode(h: LatticeVector, n: int, v: StateVector, max_degree: int | None = None) -> StateVector:
    """h(n) v for a pure Heisenberg direction h."""
    return _apply(v, ZERO_VECTOR, lambda nu, P: _heis_poly(h, n, P, nu), lambda nu, x: max(-n, 0), max_degree)


def lattice_mode(mu: LatticeVector, k, v: StateVector, max_degree: int | None = None) -> StateVector:
    """Mode k of Y(e^mu, z), i.e. the coefficient of z^{-k-1}, applied to v."""
    return field_mode(exponential_field(mu), k, v, max_degree)


def field_mode(f: Field, k, v: StateVector, max_degree: int | None = None) -> StateVector:
    """Mode k of Y(f, z) applied to v, truncated to Heisenberg degree <= max_degree."""
    k = ModeIndex.of(k)
    target = ModeIndex(-k.base - 1, -k.offset).value()  # power of z to extract
    offsets = {}
    for nu in v.sectors:
        x = target - pairing(f.exponential, nu)
        if not x.is_integer():
            raise CosetError(f"mode {k} of {f!r} on sector e^({nu}): exponent offset {x} is not an integer")
        offsets[nu] = int(x)
    return _apply(v, f.exponential, lambda nu, P: _field_poly(f, offsets[nu], P, nu), lambda nu, x: 0, max_degree)


def apply_product(ops: Sequence[tuple], v: StateVector, max_degree: int | None = None) -> StateVector:
    """Apply op_1(k_1) ... op_r(k_r) to v (rightmost first); truncation only at the end."""
    for op, k in reversed(ops):
        v = op.mode(k, v)
    return v.truncate(max_degree) if max_degree is not None else v


def superbracket(f, k1, g, k2, v: StateVector, max_degree: int | None = None) -> StateVector:
    """f_{k1} g_{k2} v - (-1)^{|f||g|} g_{k2} f_{k1} v."""
    fg = f.mode(k1, g.mode(k2, v))
    gf = g.mode(k2, f.mode(k1, v))
    res = fg + gf if f.parity and g.parity else fg - gf
    return res.truncate(max_degree) if max_degree is not None else res


class TwistedField:
    """Y(Delta(v, z) f, z) = sum_e z^e Y(f_e, z) for a finite list of (e, f_e)."""

    def __init__(self, pieces: Sequence[tuple[int, Field]], parity: int, name: str | None = None):
        self.pieces = tuple(pieces)
        self.parity = parity
        self.name = name

    def mode(self, k, v: StateVector, max_degree: int | None = None) -> StateVector:
        k = ModeIndex.of(k)
        out = StateVector()
        for e, piece in self.pieces:
            out = out + field_mode(piece, k.shift(e), v, max_degree)
        return out

    def __repr__(self):
        return f"TwistedField({self.name or self.pieces})"


def spectral_flow_twist(s: int, f: Field) -> TwistedField:
    """The field f twisted by Delta(-s beta, z); realises a(n) -> a(n+s), a*(n) -> a*(n-s)."""
    v = BETA * (-s)
    vg = [pairing(v, g) for g in _GENERATOR_VECTORS]  # profile monomials use alpha/beta/gamma
    pieces: dict[int, dict] = {}
    for mono, coeff in f.terms:
        e0 = pairing(v, f.exponential)
        if not e0.is_integer():
            raise ValueError("spectral flow only supports integral pairings with the profile")
        e0 = int(e0)
        # factor g(-m) -> g(-m) + (-1)^{m+1} <v, g> z^{-m}
        acc: dict = {(e0, ()): coeff}
        for g, m in mono:
            new: dict = {}
            for (e, kept), c in acc.items():
                key = (e, kept + ((g, m),))
                new[key] = new.get(key, ZERO) + c
                if not vg[g].is_zero():
                    key = (e - m, kept)
                    new[key] = new.get(key, ZERO) + c * vg[g] * (-1) ** (m + 1)
            acc = new
        for (e, kept), c in acc.items():
            if c.is_zero():
                continue
            slot = pieces.setdefault(e, {})
            b = BasisState._of(f.exponential, canonical_monomial(kept))
            slot[b] = slot[b] + c if b in slot else c
    out = []
    for e, t in sorted(pieces.items()):
        sv = StateVector(t)
        if not sv.is_zero():
            out.append((e, Field(sv)))
    return TwistedField(out, f.parity, name=f"rho_{s}({f.name})" if f.name else None)


# ---------------------------------------------------------------------------
# generator fields

ALPHA_PLUS_BETA = ALPHA + BETA

A = Field(StateVector.exp(ALPHA_PLUS_BETA), "a")
A_STAR = Field(-1 * StateVector.exp(-ALPHA_PLUS_BETA, [(0, 1)]), "a*")
BETA_FIELD = heisenberg_field(BETA, name="beta")
PSI_PLUS = Field(StateVector.exp(ALPHA_PLUS_BETA + GAMMA), "Psi+")
PSI_MINUS = Field(-1 * StateVector.exp(-ALPHA_PLUS_BETA - GAMMA, [(0, 1)]), "Psi-")
E_FIELD = heisenberg_field(BETA + GAMMA, name="E")
N_FIELD = heisenberg_field(LatticeVector(0, Fraction(-1, 2), Fraction(1, 2)), name="N")
PSI = Field(StateVector.exp(GAMMA), "psi")
PSI_STAR = Field(StateVector.exp(-GAMMA), "psi*")
SCREENING = Field(StateVector.exp(ALPHA), "screening")


def omega_state(mu=0) -> StateVector:
    """omega - mu*beta(-2)1 with omega = (alpha(-1)^2 - alpha(-2) - beta(-1)^2 + beta(-2))/2."""
    mu = scalar(mu)
    half = Fraction(1, 2)
    terms = {
        BasisState._of(ZERO_VECTOR, ((0, 1), (0, 1))): scalar(half),
        BasisState._of(ZERO_VECTOR, ((0, 2),)): scalar(-half),
        BasisState._of(ZERO_VECTOR, ((1, 1), (1, 1))): scalar(-half),
        BasisState._of(ZERO_VECTOR, ((1, 2),)): half - mu,
    }
    return StateVector(terms)


def virasoro_field(mu=0) -> Field:
    """Y(omega_mu, z); its mode k is L^mu(k-1)."""
    return Field(omega_state(mu), "omega" if scalar(mu).is_zero() else f"omega_{mu}")


def central_charge(mu) -> Scalar:
    mu = scalar(mu)
    return 2 * (6 * mu * (mu - 1) + 1)


OMEGA = virasoro_field(0)


def screening_check(v: StateVector, max_degree: int | None = None) -> StateVector:
    """The zero mode of Y(e^alpha, z) applied to v."""
    return field_mode(SCREENING, 0, v, max_degree)


def vacuum_vector() -> StateVector:
    return vacuum()
