"""The Weyl vertex algebra M and its weight modules.

Generators a(z) = sum a(n) z^{-n-1} and a*(z) = sum a*(n) z^{-n} are realised inside
the half-lattice algebra Pi(0) by a = e^{alpha+beta}, a* = -alpha(-1) e^{-alpha-beta}.
The modules Pi_r(lam) are spanned by the exponentials r*beta + (lam + n)(alpha+beta)
dressed with alpha/beta Heisenberg monomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .fields import A, A_STAR, BETA_FIELD, SCREENING, Field, field_mode, virasoro_field
from .fock import (
    BETA,
    ZERO_VECTOR,
    LatticeVector,
    StateVector,
    enumerate_basis,
    pairing,
    pi_exponential,
)
from .labels import SC, W, ModuleLabel
from .scalar import ONE, ZERO, Matrix, Scalar, scalar

__all__ = [
    "GENERATOR_NAMES",
    "weyl_mode",
    "beta_mode",
    "virasoro_mode",
    "l0_eigenvalue",
    "l0_from_engine",
    "ModeMap",
    "mode_word_state",
    "AutomorphismWord",
    "rho",
    "SIGMA",
    "G",
    "act_on_label",
    "WeylModuleHandle",
    "apply_automorphism",
    "sigma0_check",
    "character",
    "vacuum_character_oracle",
]

GENERATOR_NAMES = ("a", "a_star")


class RealizationError(ValueError):
    """A state does not lie in the realisation of the module it is acted on in."""


# ---------------------------------------------------------------------------
# generator modes with the conventional indexing


def _generator_field(gen: str) -> tuple[Field, int]:
    # a*(n) is the coefficient of z^{-n}, i.e. kernel mode n - 1
    if gen == "a":
        return A, 0
    if gen == "a_star":
        return A_STAR, -1
    raise ValueError(f"unknown Weyl generator {gen!r}; expected one of {GENERATOR_NAMES}")


def weyl_mode(gen: str, n: int, v: StateVector, module: "WeylModuleHandle | None" = None,
              max_degree: int | None = None) -> StateVector:
    """a(n) v or a*(n) v, acting in ``module`` (twists are applied by relabelling modes)."""
    if module is not None:
        if module.kind == "twisted":
            sign, gen2, n2 = module.word.mode_map().image(gen, n)
            out = weyl_mode(gen2, n2, v, module.inner, max_degree)
            return out if sign == 1 else -1 * out
        module.check_state(v)
    f, shift = _generator_field(gen)
    return field_mode(f, n + shift, v, max_degree)


def beta_mode(n: int, v: StateVector, max_degree: int | None = None) -> StateVector:
    return field_mode(BETA_FIELD, n, v, max_degree)


def virasoro_mode(n: int, v: StateVector, mu=0, max_degree: int | None = None) -> StateVector:
    """L^mu(n) v, the modes of the conformal vector omega_mu."""
    return field_mode(virasoro_field(mu), n + 1, v, max_degree)


# ---------------------------------------------------------------------------
# L(0) eigenvalues on the exponentials of Pi_r(lam)


def l0_from_engine(r: int, x, mu=0) -> Scalar:
    """The L^mu(0) eigenvalue on e^{r beta + x(alpha+beta)}, computed by mode action."""
    x = scalar(x)
    state = StateVector.exp(LatticeVector(x, x + r, 0))
    image = virasoro_mode(0, state, mu)
    if image.is_zero():
        return ZERO
    (b,) = state.terms
    c = image.coefficient(b)
    if image != c * state:
        raise AssertionError("L(0) did not act diagonally on an exponential")
    return c


def l0_eigenvalue(r: int, x, virasoro_mu=0) -> Scalar:
    """Closed form of the L^mu(0) eigenvalue on e^{r beta + x(alpha+beta)}.

    mu = 0 gives (1-r)(r+2x)/2 and mu = 1 gives -r(1+r+2x)/2.  Since
    L^mu(0) = L(0) + mu*beta(0) and beta(0) = -(r+x) on this state, other values of mu
    are delegated to the mode computation.
    """
    x = scalar(x)
    mu = scalar(virasoro_mu)
    if mu == 0:
        return Fraction(1 - r, 2) * (r + 2 * x)
    if mu == 1:
        return Fraction(-r, 2) * (1 + r + 2 * x)
    return l0_from_engine(r, x, mu)


# ---------------------------------------------------------------------------
# automorphisms acting on mode labels


@dataclass(frozen=True)
class ModeMap:
    """a(n) -> sign_a * X(n + shift_a), a*(n) -> sign_b * Y(n + shift_b).

    X, Y are (a*, a) when ``swap`` is set and (a, a*) otherwise.
    """

    swap: bool
    sign_a: int
    shift_a: int
    sign_b: int
    shift_b: int

    def image(self, gen: str, n: int) -> tuple[int, str, int]:
        if gen == "a":
            return self.sign_a, ("a_star" if self.swap else "a"), n + self.shift_a
        if gen == "a_star":
            return self.sign_b, ("a" if self.swap else "a_star"), n + self.shift_b
        raise ValueError(f"unknown Weyl generator {gen!r}")

    def compose(self, inner: "ModeMap") -> "ModeMap":
        """self o inner: first inner, then self on the result."""
        sa, ga, na = inner.image("a", 0)
        sb, gb, nb = inner.image("a_star", 0)
        ta, ha, ma = self.image(ga, na)
        tb, hb, mb = self.image(gb, nb)
        return ModeMap(ha == "a_star", sa * ta, ma, sb * tb, mb)

    def normal_form(self) -> tuple[int, int, int]:
        """(s, e, sign) with self = sign * (rho_s o sigma^e) on the generators."""
        if not self.swap:
            return self.shift_a, 0, self.sign_a
        # rho_s o sigma sends a(n) to -a*(n - s)
        return -self.shift_a, 1, -self.sign_a


IDENTITY = ModeMap(False, 1, 0, 1, 0)


def _letter_map(letter) -> ModeMap:
    kind = letter[0]
    if kind == "rho":
        s = letter[1]
        return ModeMap(False, 1, s, 1, -s)
    if kind == "sigma":
        return ModeMap(True, -1, 0, 1, 0)
    if kind == "g":
        return ModeMap(True, -1, 1, 1, -1)
    raise ValueError(f"unknown automorphism letter {letter!r}")


@dataclass(frozen=True)
class AutomorphismWord:
    """The composite f_1 o f_2 o ... o f_k of letters ("rho", s), ("sigma",), ("g",)."""

    letters: tuple = ()

    def __post_init__(self):
        for letter in self.letters:
            _letter_map(letter)

    def mode_map(self) -> ModeMap:
        m = IDENTITY
        for letter in self.letters:
            m = m.compose(_letter_map(letter))
        return m

    def __matmul__(self, other: "AutomorphismWord") -> "AutomorphismWord":
        return AutomorphismWord(self.letters + other.letters)

    def __pow__(self, k: int) -> "AutomorphismWord":
        return AutomorphismWord(self.letters * k)

    def reduced(self) -> "AutomorphismWord":
        """Equivalent word of the form rho_s o sigma^e (up to the overall sign of the generators)."""
        s, e, _ = self.mode_map().normal_form()
        letters = ((("rho", s),) if s else ()) + ((("sigma",),) if e else ())
        return AutomorphismWord(letters)

    def __str__(self):
        if not self.letters:
            return "id"
        parts = []
        for letter in self.letters:
            parts.append(f"rho_{letter[1]}" if letter[0] == "rho" else letter[0])
        return " o ".join(parts)


def mode_word_state(word: Sequence[tuple[str, int]], automorphism: AutomorphismWord | None = None) -> StateVector:
    """x_1(n_1) ... x_k(n_k) 1 in M, with each mode first mapped by ``automorphism``."""
    mode_map = automorphism.mode_map() if automorphism is not None else IDENTITY
    v = StateVector.exp(ZERO_VECTOR)
    sign = 1
    for gen, n in reversed(word):
        c, gen2, n2 = mode_map.image(gen, n)
        sign *= c
        v = weyl_mode(gen2, n2, v)
    return v if sign == 1 else -1 * v


def rho(s: int) -> AutomorphismWord:
    return AutomorphismWord((("rho", s),))


SIGMA = AutomorphismWord((("sigma",),))
G = AutomorphismWord((("g",),))


def _act_letter(letter, label: ModuleLabel) -> ModuleLabel:
    kind = letter[0]
    if kind == "rho":
        return label.shifted(letter[1])
    if kind == "sigma":
        # sigma o rho_l = rho_{-l} o sigma, sigma(U~(lam)) = U~(-lam), sigma(M) = rho_{-1}(M)
        if isinstance(label, SC):
            return SC(-label.ell - 1)
        return W(-label.ell, -label.lam)
    if kind == "g":
        # g = sigma o rho_1, so N^g = rho_1(sigma(N))
        return _act_letter(("rho", 1), _act_letter(("sigma",), label))
    raise ValueError(f"unknown automorphism letter {letter!r}")


def act_on_label(word: AutomorphismWord, label: ModuleLabel) -> ModuleLabel:
    """The label of word(N) given the label of N; (f o g)(N) = g(f(N))."""
    for letter in word.letters:
        label = _act_letter(letter, label)
    return label


# ---------------------------------------------------------------------------
# module handles


@dataclass(frozen=True)
class WeylModuleHandle:
    """A weight module: Pi_r(lam), the vacuum module M, or a twist of another handle."""

    kind: str
    r: int | None = None
    lam: Scalar | None = None
    word: AutomorphismWord | None = None
    inner: "WeylModuleHandle | None" = field(default=None)

    @classmethod
    def pi(cls, r: int, lam) -> "WeylModuleHandle":
        return cls("pi", r=int(r), lam=scalar(lam))

    @classmethod
    def vacuum(cls) -> "WeylModuleHandle":
        return cls("vacuum")

    @classmethod
    def twisted(cls, word: AutomorphismWord, inner: "WeylModuleHandle") -> "WeylModuleHandle":
        if not word.letters:
            return inner
        return cls("twisted", word=word, inner=inner)

    @classmethod
    def relaxed(cls, ell: int, lam) -> "WeylModuleHandle":
        """rho_l(U~(lam)), carried by its realisation Pi_{1-l}(-lam)."""
        return cls.pi(1 - ell, -scalar(lam))

    def label(self) -> ModuleLabel:
        if self.kind == "pi":
            return W(1 - self.r, -self.lam)
        if self.kind == "vacuum":
            return SC(0)
        return act_on_label(self.word, self.inner.label())

    def realization(self) -> "WeylModuleHandle":
        """An untwisted handle isomorphic to this one."""
        if self.kind != "twisted":
            return self
        lab = self.label()
        if isinstance(lab, W):
            return WeylModuleHandle.relaxed(lab.ell, lab.lam)
        if lab.ell == 0:
            return WeylModuleHandle.vacuum()
        raise ValueError(f"{lab} has no untwisted realisation in this library")

    def generator(self) -> StateVector:
        if self.kind == "pi":
            return StateVector.exp(pi_exponential(self.r, self.lam))
        if self.kind == "vacuum":
            return StateVector.exp(ZERO_VECTOR)
        return self.inner.generator()

    def exponential(self, n: int) -> LatticeVector:
        if self.kind == "pi":
            return pi_exponential(self.r, self.lam, n)
        if self.kind == "vacuum":
            return pi_exponential(0, 0, n)
        return self.inner.exponential(n)

    def contains_exponential(self, nu: LatticeVector) -> bool:
        if self.kind == "twisted":
            return self.inner.contains_exponential(nu)
        r = 0 if self.kind == "vacuum" else self.r
        lam = ZERO if self.kind == "vacuum" else self.lam
        if not nu.coeffs[2].is_zero():
            return False
        x = nu.coeffs[0] - lam
        return x.is_integer() and nu.coeffs[1] - nu.coeffs[0] == r

    def check_state(self, v: StateVector) -> None:
        for nu in v.sectors:
            if not self.contains_exponential(nu):
                raise RealizationError(f"e^({nu}) does not lie in {self}")

    def __str__(self):
        if self.kind == "pi":
            return f"Pi({self.r},{self.lam})"
        if self.kind == "vacuum":
            return "M"
        return f"[{self.word}]({self.inner})"


def apply_automorphism(word: AutomorphismWord, module: WeylModuleHandle) -> WeylModuleHandle:
    """word(module); the result's label follows (f o g)(N) = g(f(N))."""
    if module.kind == "twisted":
        return WeylModuleHandle.twisted(module.word @ word, module.inner)
    return WeylModuleHandle.twisted(word, module)


# ---------------------------------------------------------------------------
# the first Weyl algebra on x^lam C[x, 1/x]


def sigma0_check(span: int = 3) -> dict:
    """Verify that sigma_0 twisting U(lam) gives U(-lam), on a window of basis vectors.

    U(lam) = x^lam C[x, 1/x] has basis z_t = x^{-t-1}/Gamma(-t), t in -mu + Z, on which
    a(0) = d/dx acts by z_t -> z_{t+1} and a*(0) = x by z_t -> -t z_{t-1}.  The twisted
    action is a(0) -> -a*(0), a*(0) -> a(0).  The map z_t -> c_t w_{-t-1}, with w_u the
    same basis of U(-lam) and c_{t+1} = (t+1) c_t, must intertwine the two actions.
    Returns a dict of named checks, each True when it holds exactly.
    """
    from .scalar import param

    mu = param("mu")

    def a0(vec):
        return {t + 1: c for t, c in vec.items()}

    def astar0(vec):
        out = {}
        for t, c in vec.items():
            out[t - 1] = out.get(t - 1, ZERO) - t * c
        return out

    def twisted_a0(vec):
        return {t: -c for t, c in astar0(vec).items()}

    def twisted_astar0(vec):
        return a0(vec)

    def clean(vec):
        return {t: c for t, c in vec.items() if not c.is_zero()}

    def minus(u, v):
        return clean({k: u.get(k, ZERO) - v.get(k, ZERO) for k in set(u) | set(v)})

    window = [-mu + k for k in range(-span - 1, span + 2)]
    c = {window[0]: ONE}
    for t in window[:-1]:
        c[t + 1] = (t + 1) * c[t]

    def phi(vec):
        return clean({-t - 1: c[t] * x for t, x in vec.items()})

    checks = {}
    z0 = {-mu: ONE}
    checks["twisted a(0) z_{-mu} = -mu z_{-mu-1}"] = clean(twisted_a0(z0)) == {-mu - 1: -mu}
    checks["twisted a*(0) z_{-mu} = z_{-mu+1}"] = clean(twisted_astar0(z0)) == {-mu + 1: ONE}
    weyl_ok = iso_ok = True
    for t in window[1:-1]:
        z = {t: ONE}
        weyl_ok &= minus(a0(astar0(z)), astar0(a0(z))) == {t: ONE}
        iso_ok &= minus(phi(twisted_a0(z)), a0(phi(z))) == {}
        iso_ok &= minus(phi(twisted_astar0(z)), astar0(phi(z))) == {}
    checks["[a(0), a*(0)] = 1 on U(lam)"] = weyl_ok
    checks["z_t -> c_t w_{-t-1} intertwines the twisted U(lam) with U(-lam)"] = iso_ok
    checks["intertwiner constants are nonzero"] = all(not x.is_zero() for x in c.values())
    return checks


# ---------------------------------------------------------------------------
# characters


def _screening_kernel_dim(n: int, degree: int) -> int:
    """dim of ker e^alpha_0 on the degree-`degree` part of the sector e^{n(alpha+beta)}."""
    states = [b for b in enumerate_basis([pi_exponential(0, 0, n)], degree, (0, 1)) if b.degree == degree]
    if not states:
        return 0
    images = [field_mode(SCREENING, 0, StateVector.basis(b)) for b in states]
    rows_index: dict = {}
    for img in images:
        for b in img.terms:
            rows_index.setdefault(b, len(rows_index))
    if not rows_index:
        return len(states)
    cols = []
    for img in images:
        col = [ZERO] * len(rows_index)
        for b, c in img.items():
            col[rows_index[b]] = c
        cols.append(col)
    return len(states) - Matrix.from_columns(cols).rank()


def character(module: WeylModuleHandle, max_level: int, charges: Sequence[int] = (-2, -1, 0, 1, 2)) -> dict:
    """{(n, level): dimension} of the joint beta(0), L(0) eigenspaces.

    ``n`` labels the exponential r*beta + (lam+n)(alpha+beta), on which beta(0) acts by
    -(r + lam + n).  ``level`` is the L(0) eigenvalue minus its value on the module
    generator; rows with level > max_level are omitted.  For the vacuum module the
    dimensions are those of the screening kernel inside Pi(0).
    """
    if max_level < 0:
        raise ValueError("max_level must be non-negative")
    module = module.realization()
    table = {}
    if module.kind == "vacuum":
        for n in charges:
            # L(0) on e^{n(alpha+beta)} is n, so level = n + degree
            for level in range(0, max_level + 1):
                degree = level - n
                if degree < 0:
                    continue
                d = _screening_kernel_dim(n, degree)
                if d:
                    table[(n, level)] = d
        return table
    r = module.r
    for n in charges:
        base = (1 - r) * n  # L(0) offset of the n-th exponential relative to the generator
        for level in range(0, max_level + 1):
            degree = level - base
            if degree < 0:
                continue
            count = sum(1 for b in enumerate_basis([module.exponential(n)], degree, (0, 1)) if b.degree == degree)
            if count:
                table[(n, level)] = count
    return table


def vacuum_character_oracle(charge: int, weight: int) -> int:
    """Count monomials in a(-n) (n >= 1, charge -1) and a*(-m) (m >= 0, charge +1).

    The beta(0) charge of a is -1 and of a* is +1; the weight of a(-n) is n and of
    a*(-m) is m.  Monomials with a*(0)^k carry weight 0, so k is bounded by the
    charge balance.  Independent of the lattice realisation.
    """
    # generators as (charge, weight); a*(0) has weight 0 so bound its power by charge
    from functools import lru_cache

    gens = [(-1, n) for n in range(1, weight + 1)] + [(1, m) for m in range(0, weight + 1)]

    @lru_cache(maxsize=None)
    def count(i: int, q: int, w: int, free_budget: int) -> int:
        if i == len(gens):
            return 1 if q == 0 and w == 0 else 0
        c, wt = gens[i]
        total = 0
        k = 0
        while True:
            if wt * k > w:
                break
            if wt == 0 and k > free_budget:
                break
            total += count(i + 1, q - c * k, w - wt * k, free_budget)
            k += 1
        return total

    # the number of a(-n) factors is at most the weight, so a*(0) appears at most weight+|charge| times
    return count(0, charge, weight, weight + abs(charge))
