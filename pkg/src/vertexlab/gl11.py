"""Affine gl(1|1) at level 1 inside M (x) F, and finite-dimensional gl(1|1) modules.

The currents are Psi+ = e^{alpha+beta+gamma}, Psi- = -alpha(-1) e^{-alpha-beta-gamma},
E = (beta+gamma)(-1)1 and N = (gamma-beta)(-1)1 / 2, with the fermions bosonised on
the gamma direction.  The invariant form is (Psi+, Psi-) = 1 = -(Psi-, Psi+) and
(N, E) = (E, N) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .fields import (
    E_FIELD,
    N_FIELD,
    PSI_MINUS,
    PSI_PLUS,
    Field,
    field_mode,
    omega_state,
)
from .fock import BasisState, LatticeVector, StateVector, ZERO_VECTOR, monomials_of_degree, vacuum
from .scalar import ONE, ZERO, Matrix, NonGenericError, Scalar, block_diag, kernel_basis, scalar

__all__ = [
    "CURRENTS",
    "SUGAWARA_FIELD",
    "sugawara_state",
    "lie_bracket",
    "invariant_form",
    "FiniteGl11Module",
    "atypical",
    "verma",
    "projective",
    "tensor",
    "Constituent",
    "tensor_and_decompose",
    "decompose",
    "socle_dimensions",
    "HighestWeightLabel",
    "singular_exponential",
    "singular_vector",
    "expected_label",
    "sugawara_combination",
    "singular_vector_check",
    "sugawara_identity_check",
    "verma_graded_dims",
    "truncated_decomposition_table",
]

CURRENTS = {"Psi+": PSI_PLUS, "Psi-": PSI_MINUS, "E": E_FIELD, "N": N_FIELD}


def sugawara_state() -> StateVector:
    """omega_{1/2} + gamma(-1)^2 1 / 2, the conformal vector of central charge 0."""
    extra = StateVector({BasisState._of(ZERO_VECTOR, ((2, 1), (2, 1))): Fraction(1, 2)})
    return omega_state(Fraction(1, 2)) + extra


SUGAWARA_FIELD = Field(sugawara_state(), "omega_c0")


# ---------------------------------------------------------------------------
# the finite-dimensional Lie superalgebra

_BRACKET = {
    ("Psi+", "Psi-"): ((1, "E"),),
    ("Psi-", "Psi+"): ((1, "E"),),
    ("N", "Psi+"): ((1, "Psi+"),),
    ("Psi+", "N"): ((-1, "Psi+"),),
    ("N", "Psi-"): ((-1, "Psi-"),),
    ("Psi-", "N"): ((1, "Psi-"),),
}

_FORM = {("Psi+", "Psi-"): 1, ("Psi-", "Psi+"): -1, ("N", "E"): 1, ("E", "N"): 1}

PARITY = {"Psi+": 1, "Psi-": 1, "E": 0, "N": 0}


def lie_bracket(x: str, y: str) -> tuple[tuple[int, str], ...]:
    """[x, y] in gl(1|1) as a list of (coefficient, generator)."""
    return _BRACKET.get((x, y), ())


def invariant_form(x: str, y: str) -> int:
    return _FORM.get((x, y), 0)


# ---------------------------------------------------------------------------
# finite-dimensional modules


def _supercommutator(x: Matrix, px: int, y: Matrix, py: int) -> Matrix:
    xy, yx = x @ y, y @ x
    return xy + yx if px and py else xy - yx


class FiniteGl11Module:
    """Action matrices of E, N, Psi+, Psi- on a Z/2-graded basis.

    The defining relations are checked exactly on construction.
    """

    def __init__(self, name: str, labels: Sequence[str], parity: Sequence[int], E, N, psi_plus, psi_minus):
        self.name = name
        self.labels = tuple(labels)
        self.parity = tuple(int(p) % 2 for p in parity)
        self.E, self.N, self.psi_plus, self.psi_minus = E, N, psi_plus, psi_minus
        n = len(self.labels)
        if any(m.shape != (n, n) for m in self.matrices().values()):
            raise ValueError("action matrices must be square of the module dimension")
        self._check_relations()

    @property
    def dimension(self) -> int:
        return len(self.labels)

    def matrices(self) -> dict[str, Matrix]:
        return {"E": self.E, "N": self.N, "Psi+": self.psi_plus, "Psi-": self.psi_minus}

    def _check_relations(self) -> None:
        mats = self.matrices()
        for x in mats:
            for y in mats:
                lhs = _supercommutator(mats[x], PARITY[x], mats[y], PARITY[y])
                rhs = Matrix.zeros(self.dimension)
                for c, z in lie_bracket(x, y):
                    rhs = rhs + mats[z].scale(c)
                if lhs != rhs:
                    raise ValueError(f"{self.name}: [{x}, {y}] violates the gl(1|1) relations")
        for x, m in mats.items():
            # even operators preserve parity, odd ones flip it
            for i in range(self.dimension):
                for j in range(self.dimension):
                    if not m[i, j].is_zero() and (self.parity[i] + self.parity[j] + PARITY[x]) % 2:
                        raise ValueError(f"{self.name}: {x} does not respect the grading")

    def __repr__(self):
        return f"FiniteGl11Module({self.name}, dim={self.dimension})"


def atypical(r) -> FiniteGl11Module:
    """A_r: one even vector with E = 0 and N = r."""
    r = scalar(r)
    z = Matrix.zeros(1)
    return FiniteGl11Module(f"A({r})", ["v"], [0], z, Matrix.diag([r]), z, z)


def verma(r, s) -> FiniteGl11Module:
    """V_{r,s}: highest weight vector v0 (N = r, E = s) and v1 = Psi- v0."""
    r, s = scalar(r), scalar(s)
    E = Matrix.diag([s, s])
    N = Matrix.diag([r, r - 1])
    psi_minus = Matrix([[ZERO, ZERO], [ONE, ZERO]])
    psi_plus = Matrix([[ZERO, s], [ZERO, ZERO]])
    return FiniteGl11Module(f"V({r},{s})", ["v0", "v1"], [0, 1], E, N, psi_plus, psi_minus)


def _kron(a: Matrix, b: Matrix, signs: Sequence[int] | None = None) -> Matrix:
    """a (x) b, with b's block for basis vector i of the left factor scaled by signs[i]."""
    n, m = a.nrows, b.nrows
    rows = []
    for i in range(n):
        for k in range(m):
            row = []
            for j in range(n):
                for l in range(m):
                    c = a[i, j] * b[k, l]
                    if signs is not None and not c.is_zero():
                        c = c * signs[j]
                    row.append(c)
            rows.append(row)
    return Matrix(rows, n * m)


def tensor(A: FiniteGl11Module, B: FiniteGl11Module) -> FiniteGl11Module:
    """A (x) B with x(a (x) b) = xa (x) b + (-1)^{|x||a|} a (x) xb."""
    ida, idb = Matrix.identity(A.dimension), Matrix.identity(B.dimension)
    koszul = [(-1) ** p for p in A.parity]
    ma, mb = A.matrices(), B.matrices()
    acts = {}
    for x in ma:
        left = _kron(ma[x], idb)
        right = _kron(ida, mb[x], koszul if PARITY[x] else None)
        acts[x] = left + right
    labels = [f"{a}*{b}" for a in A.labels for b in B.labels]
    parity = [p + q for p in A.parity for q in B.parity]
    return FiniteGl11Module(f"{A.name}*{B.name}", labels, parity, acts["E"], acts["N"], acts["Psi+"], acts["Psi-"])


def projective(r) -> FiniteGl11Module:
    """P_r, realised as V_{r,1} (x) V_{0,-1}: an extension of V_{r-1,0} by V_{r,0}."""
    m = tensor(verma(r, 1), verma(0, -1))
    m.name = f"P({scalar(r)})"
    return m


# ---------------------------------------------------------------------------
# decomposition


@dataclass
class Constituent:
    """A summand of a decomposition with the basis vectors (columns) spanning it."""

    kind: str  # "A", "V" or "P"
    n_label: Scalar
    e_label: Scalar
    parity: int  # parity of the generating vector
    basis: list  # list of coordinate tuples in the ambient module

    def __str__(self):
        shift = "" if self.parity == 0 else "'"
        if self.kind == "V":
            return f"V({self.n_label},{self.e_label}){shift}"
        return f"{self.kind}({self.n_label}){shift}"


def _diagonal(m: Matrix, what: str) -> list[Scalar]:
    for i in range(m.nrows):
        for j in range(m.ncols):
            if i != j and not m[i, j].is_zero():
                raise ValueError(f"{what} must act diagonally on the given basis")
    return [m[i, i] for i in range(m.nrows)]


def _solve(C: Matrix, b) -> tuple:
    aug = Matrix.from_columns(C.columns() + [tuple(b)])
    ker = kernel_basis(aug)
    for k in ker:
        last = k[-1]
        if not last.is_zero():
            return tuple(-x / last for x in k[:-1])
    raise ValueError("vector is not in the span of the given basis")


def _apply(m: Matrix, v) -> tuple:
    return m @ v


def _is_zero_vec(v) -> bool:
    return all(x.is_zero() for x in v)


def tensor_and_decompose(A: FiniteGl11Module, B: FiniteGl11Module) -> tuple[FiniteGl11Module, list[Constituent]]:
    """Form A (x) B and split it into A-, V- and P-type summands.

    Raises NonGenericError when kernel dimensions do not match the generic pattern.
    """
    T = tensor(A, B)
    return T, decompose(T)


def decompose(T: FiniteGl11Module) -> list[Constituent]:
    E = _diagonal(T.E, "E")
    N = _diagonal(T.N, "N")
    blocks: dict[Scalar, list[int]] = {}
    for i, e in enumerate(E):
        blocks.setdefault(e, []).append(i)
    out: list[Constituent] = []
    for s, idx in blocks.items():
        if not s.is_zero():
            out.extend(_decompose_typical(T, s, idx, N))
        else:
            out.extend(_decompose_atypical(T, idx, N))
    if sum(len(c.basis) for c in out) != T.dimension:
        raise NonGenericError("decomposition did not exhaust the module; specialise parameters deliberately")
    _verify_block_form(T, out)
    return out


def _unit(n: int, i: int) -> tuple:
    return tuple(ONE if j == i else ZERO for j in range(n))


def _weight_spaces(idx: list[int], N: list[Scalar]) -> dict[Scalar, list[int]]:
    spaces: dict[Scalar, list[int]] = {}
    for i in idx:
        spaces.setdefault(N[i], []).append(i)
    return spaces


def _decompose_typical(T: FiniteGl11Module, s: Scalar, idx: list[int], N: list[Scalar]) -> list[Constituent]:
    dim = T.dimension
    out = []
    for n, space in sorted(_weight_spaces(idx, N).items(), key=lambda kv: str(kv[0])):
        sub = T.psi_plus.submatrix(range(dim), space)
        for k in kernel_basis(sub):
            v = [ZERO] * dim
            for c, i in zip(k, space):
                v[i] = c
            v = tuple(v)
            w = _apply(T.psi_minus, v)
            parity = T.parity[space[0]]
            out.append(Constituent("V", n, s, parity, [v, w]))
    if 2 * len(out) != len(idx):
        raise NonGenericError(
            f"E = {s}: found {len(out)} highest weight vectors in a block of dimension {len(idx)}; "
            "the parameters are not generic, specialise them deliberately"
        )
    return out


def _decompose_atypical(T: FiniteGl11Module, idx: list[int], N: list[Scalar]) -> list[Constituent]:
    dim = T.dimension
    pp, pm = T.psi_plus, T.psi_minus
    spaces = _weight_spaces(idx, N)
    if all(pp[i, j].is_zero() and pm[i, j].is_zero() for i in idx for j in idx):
        return [Constituent("A", N[i], ZERO, T.parity[i], [_unit(dim, i)]) for i in idx]
    # a P-type head is a weight vector w with Psi- Psi+ w != 0
    heads = []
    for n, space in spaces.items():
        for i in space:
            w = _unit(dim, i)
            if not _is_zero_vec(_apply(pm, _apply(pp, w))):
                heads.append((n, i, w))
                break
        if heads:
            break
    if heads:
        n, i, w = heads[0]
        span = [w, _apply(pp, w), _apply(pm, w), _apply(pm, _apply(pp, w))]
        if Matrix.from_columns(span).rank() != 4 or len(idx) != 4:
            raise NonGenericError("E = 0 block is not a single projective cover; specialise parameters deliberately")
        # label and parity follow the top N-weight vector Psi+ w
        return [Constituent("P", n + 1, ZERO, 1 - T.parity[i], span)]
    if len(idx) == 2:
        for n, space in spaces.items():
            for i in space:
                w = _unit(dim, i)
                if _is_zero_vec(_apply(pp, w)) and not _is_zero_vec(_apply(pm, w)):
                    return [Constituent("V", n, ZERO, T.parity[i], [w, _apply(pm, w)])]
    raise NonGenericError("unsupported E = 0 block; specialise parameters deliberately")


def _verify_block_form(T: FiniteGl11Module, parts: list[Constituent]) -> None:
    """The constituents' spans are invariant and together give a change of basis."""
    cols = [v for c in parts for v in c.basis]
    C = Matrix.from_columns(cols)
    if C.rank() != T.dimension:
        raise NonGenericError("constituent bases are linearly dependent")
    for x, m in T.matrices().items():
        blocks = [Matrix.from_columns([_solve(Matrix.from_columns(c.basis), m @ v) for v in c.basis]) for c in parts]
        if m @ C != C @ block_diag(blocks):
            raise AssertionError(f"{x} is not block diagonal in the decomposition basis")


def socle_dimensions(M: FiniteGl11Module) -> list[int]:
    """Dimensions of K_1 < K_2 < ... with K_1 = ker Psi+ & ker Psi- and K_{j+1} = {v : Psi+- v in K_j}.

    On a module where E acts by zero the simple modules are one-dimensional and this is
    the socle series; the filtration stops early (possibly empty) when it stabilises.
    """
    dim = M.dimension
    current: list = []
    dims = []
    while len(current) < dim:
        # soc^{k+1} = {v : Psi+- v in soc^k}, computed inside the full space
        base = Matrix.from_columns(current) if current else None
        rows = []
        for op in (M.psi_plus, M.psi_minus):
            if base is None:
                rows.extend(op.rows)
            else:
                # component of op v orthogonal to span(current): use projection via kernel of [op | -base]
                rows.extend(_quotient_rows(op, base))
        space = kernel_basis(Matrix(rows, dim)) if rows else [_unit(dim, i) for i in range(dim)]
        if len(space) == len(current):
            break
        current = list(space)
        dims.append(len(current))
    return dims


def _quotient_rows(op: Matrix, base: Matrix) -> list:
    # rows of L @ op where L's rows span the annihilator of the column space of base
    ann = kernel_basis(base.transpose())
    return [tuple(sum((l[k] * op[k, j] for k in range(op.nrows)), ZERO) for j in range(op.ncols)) for l in ann]


# ---------------------------------------------------------------------------
# singular vectors and the Sugawara vector


@dataclass(frozen=True)
class HighestWeightLabel:
    n_eigen: Scalar
    e_eigen: Scalar
    level_shift: Scalar

    def __str__(self):
        return f"V^({self.n_eigen},{self.e_eigen}) at L(0) = {self.level_shift}"


def singular_exponential(r: int, x) -> LatticeVector:
    """r(beta+gamma) + x(alpha+beta)."""
    x = scalar(x)
    return LatticeVector(x, x + r, r)


def singular_vector(r: int, lam, n: int = 0) -> StateVector:
    return StateVector.exp(singular_exponential(r, scalar(lam) + n))


def expected_label(r: int, lam, n: int) -> HighestWeightLabel:
    x = scalar(lam) + n
    return HighestWeightLabel(r + x / 2, -x, Fraction(1 - 2 * r, 2) * x)


def singular_vector_check(r: int, n: int, lam, m_max: int = 4) -> list[tuple[str, StateVector]]:
    """[(description, residual)] for every singular-vector identity; all residuals vanish on success."""
    if m_max < 0:
        raise ValueError("m_max must be non-negative")
    v = singular_vector(r, lam, n)
    label = expected_label(r, lam, n)
    out = []
    for m in range(m_max + 1):
        out.append((f"Psi+({m}) v = 0", field_mode(PSI_PLUS, m, v)))
        out.append((f"Psi-({m + 1}) v = 0", field_mode(PSI_MINUS, m + 1, v)))
        e = label.e_eigen if m == 0 else ZERO
        out.append((f"E({m}) v = {e} v", field_mode(E_FIELD, m, v) - e * v))
        nn = label.n_eigen if m == 0 else ZERO
        out.append((f"N({m}) v = {nn} v", field_mode(N_FIELD, m, v) - nn * v))
    out.append((f"L(0) v = {label.level_shift} v", field_mode(SUGAWARA_FIELD, 1, v) - label.level_shift * v))
    return out


def sugawara_combination() -> StateVector:
    """(N(-1)E(-1) + E(-1)N(-1) - Psi+(-1)Psi-(-1) + Psi-(-1)Psi+(-1) + E(-1)^2) 1 / 2."""
    one = vacuum()

    def mm(f, g):
        return field_mode(f, -1, field_mode(g, -1, one))

    total = mm(N_FIELD, E_FIELD) + mm(E_FIELD, N_FIELD) - mm(PSI_PLUS, PSI_MINUS) + mm(PSI_MINUS, PSI_PLUS)
    total = total + mm(E_FIELD, E_FIELD)
    return Fraction(1, 2) * total


def sugawara_identity_check() -> StateVector:
    """Residual of the quadratic current expression against the lattice form of omega_c0."""
    target = StateVector({
        BasisState._of(ZERO_VECTOR, ((0, 1), (0, 1))): Fraction(1, 2),
        BasisState._of(ZERO_VECTOR, ((0, 2),)): Fraction(-1, 2),
        BasisState._of(ZERO_VECTOR, ((1, 1), (1, 1))): Fraction(-1, 2),
        BasisState._of(ZERO_VECTOR, ((2, 1), (2, 1))): Fraction(1, 2),
    })
    return sugawara_combination() - target


# ---------------------------------------------------------------------------
# truncated decomposition of S Pi_r(lam) into affine Verma modules


@lru_cache(maxsize=None)
def verma_graded_dims(max_level: int) -> tuple[int, ...]:
    """Graded dimensions of a level-1 affine Verma module with a 2-dimensional top.

    Brute-force count of PBW monomials in E(-n), N(-n) (any power) and Psi+(-n),
    Psi-(-n) (power at most one), n >= 1.
    """
    gens = []
    for n in range(1, max_level + 1):
        gens += [(n, False), (n, False), (n, True), (n, True)]
    counts = [0] * (max_level + 1)

    def rec(i: int, weight: int):
        if i == len(gens):
            counts[weight] += 1
            return
        n, odd = gens[i]
        k = 0
        while weight + k * n <= max_level and (not odd or k <= 1):
            rec(i + 1, weight + k * n)
            k += 1

    rec(0, 0)
    return tuple(2 * c for c in counts)


def _lattice_count(degree: int) -> int:
    return len(monomials_of_degree(degree, (0, 1, 2))) if degree >= 0 else 0


def _eigen(f: Field, k: int, nu: LatticeVector) -> Scalar:
    v = StateVector.exp(nu)
    out = field_mode(f, k, v)
    (b,) = v.terms
    c = out.coefficient(b)
    if out != c * v:
        raise AssertionError(f"{f!r} mode {k} is not diagonal on e^({nu})")
    return c


def truncated_decomposition_table(r: int, lam, max_level: int, s_range: Sequence[int] = range(-2, 3)) -> dict:
    """{s: (lattice dims by level, Verma dims by level)} for the E(0) = -lam-s eigenspaces.

    The lattice side enumerates exponentials r*beta + (lam+n)(alpha+beta) + c*gamma with
    E(0) and L(0) computed by mode action, and counts Heisenberg monomials at each level
    above the singular vector e^{r(beta+gamma)+(lam+s)(alpha+beta)}.
    """
    if max_level < 0:
        raise ValueError("max_level must be non-negative")
    lam = scalar(lam)
    verma_dims = list(verma_graded_dims(max_level))
    table = {}
    for s in s_range:
        base = _eigen(SUGAWARA_FIELD, 1, singular_exponential(r, lam + s))
        dims = [0] * (max_level + 1)
        # the level grows quadratically in d = c - r, so a window of width ~max_level suffices
        for d in range(-max_level - 2, max_level + 3):
            c = r + d
            nu = LatticeVector(lam + s + d, lam + s + d + r, c)
            e = _eigen(E_FIELD, 0, nu)
            if e != -lam - s:
                raise AssertionError(f"E(0) on e^({nu}) is {e}, expected {-lam - s}")
            shift = _eigen(SUGAWARA_FIELD, 1, nu) - base
            if not shift.is_integer():
                raise AssertionError(f"non-integral level {shift} on e^({nu})")
            shift = int(shift)
            if shift < 0:
                raise AssertionError(f"e^({nu}) lies below the singular vector")
            for level in range(shift, max_level + 1):
                dims[level] += _lattice_count(level - shift)
        table[s] = {
            "label": expected_label(r, lam, s),
            "lattice": dims,
            "verma": verma_dims,
        }
    return table
