"""Exact rational functions in named formal parameters, and small dense matrices over them.

A :class:`Scalar` is an element of Q(p_1, ..., p_k).  Numerator and denominator are
multivariate polynomials over Q (python-flint ``fmpq_mpoly``) in one process-wide
context.  The stored form is canonical: gcd(num, den) = 1 and ``den`` is monic under
the graded-lex order on the parameters (sorted by name), so equality is structural.
:meth:`Scalar.integer_form` gives the equivalent normalisation with coprime integer
coefficients and a positive leading denominator coefficient.

The shared polynomial context also carries internal variables that the Fock-space
code uses to encode Heisenberg monomials (``_a3`` stands for alpha(-3)) and batch tags
(``_t0``...).  They never appear in user-facing Scalars.

Nothing here ever touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

import flint

__all__ = [
    "Scalar",
    "Matrix",
    "NonGenericError",
    "param",
    "params",
    "scalar",
    "substitute",
    "kernel_basis",
    "block_diag",
    "ZERO",
    "ONE",
]


class NonGenericError(ValueError):
    """A specialisation hit a value the generic-parameter model cannot handle."""


# ---------------------------------------------------------------------------
# the shared polynomial context

# internal Heisenberg coordinates, see fock.INTERNAL_BASIS
HEIS_LETTERS = "uvw"


class _Layout:
    """Variable layout: sorted parameters, the batch tag, then Heisenberg modes."""

    __slots__ = ("params", "depth", "ctx", "names", "nparams", "heis0", "gens", "one")

    def __init__(self, params: tuple[str, ...], depth: int):
        self.params = params
        self.depth = depth
        self.names = (
            params
            + ("_t",)
            + tuple(f"_{HEIS_LETTERS[g]}{n}" for n in range(1, depth + 1) for g in range(3))
        )
        self.ctx = flint.fmpq_mpoly_ctx.get(self.names, "deglex")
        self.nparams = len(params)
        self.heis0 = len(params) + 1
        self.gens = self.ctx.gens()
        self.one = self.ctx.constant(1)

    def heis_index(self, g: int, n: int) -> int:
        return self.heis0 + 3 * (n - 1) + g


_L = _Layout((), 8)
_generation = 0


def layout() -> _Layout:
    return _L


def generation() -> int:
    """Bumped whenever the shared context changes; kernel caches key on it."""
    return _generation


def _switch(params: tuple[str, ...], depth: int) -> _Layout:
    global _L, _generation
    if (params, depth) != (_L.params, _L.depth):
        _L = _Layout(params, depth)
        _generation += 1
    return _L


def _register(*names: str) -> _Layout:
    if all(n in _L.params for n in names):
        return _L
    for n in names:
        if not n.isidentifier() or n.startswith("_"):
            raise ValueError(f"invalid parameter name {n!r}")
    return _switch(tuple(sorted(set(_L.params) | set(names))), _L.depth)


def ensure_depth(n: int) -> _Layout:
    """Make room for Heisenberg modes of depth up to n."""
    if n <= _L.depth:
        return _L
    # small steps keep the exponent vectors short
    return _switch(_L.params, max(n, _L.depth + 8))


def tag(i: int) -> "Scalar":
    """The i-th batching tag t^(i+1), where t is a formal variable no operator touches."""
    return Scalar._from_poly(_L.gens[_L.nparams] ** (i + 1))


def tag_split(x: "Scalar") -> dict[int, "Scalar"]:
    """{i: coefficient of tag i in x}; the tag-free part is dropped."""
    x._current()
    t = _L.nparams
    parts: dict[int, dict] = {}
    for exps, c in x.num.to_dict().items():
        e = int(exps[t])
        if e:
            parts.setdefault(e - 1, {})[exps[:t] + (0,) + exps[t + 1 :]] = c
    out = {}
    for i, d in parts.items():
        p = _L.ctx.from_dict(d)
        out[i] = Scalar._from_poly(p) if x._poly else Scalar._normalized(p, x.den)
    return out


def lift(p):
    """Move a polynomial into the current context (by variable name)."""
    ctx = _L.ctx
    if p.context() is ctx:
        return p
    return p.project_to_context(ctx)


# ---------------------------------------------------------------------------
# scalars


class Scalar:
    """Immutable element of the rational function field over Q."""

    __slots__ = ("num", "den", "_poly", "_hash", "_const")

    def __init__(self, value=0):
        if isinstance(value, Scalar):
            self.num, self.den, self._poly = value.num, value.den, value._poly
        else:
            if isinstance(value, Fraction):
                value = flint.fmpq(value.numerator, value.denominator)
            elif not isinstance(value, (int, flint.fmpq, flint.fmpz)):
                raise TypeError(f"cannot make a Scalar from {type(value).__name__}")
            self.num = _L.ctx.constant(value)
            self.den = _L.one
            self._poly = True
        self._hash = None
        self._const = None

    @classmethod
    def _raw(cls, num, den, poly: bool) -> "Scalar":
        s = object.__new__(cls)
        s.num = num
        s.den = den
        s._poly = poly
        s._hash = None
        s._const = None
        return s

    @classmethod
    def _from_poly(cls, p) -> "Scalar":
        return cls._raw(p, p.context().constant(1), True)

    @classmethod
    def _normalized(cls, num, den) -> "Scalar":
        if num.is_zero():
            return cls._raw(num, num.context().constant(1), True)
        if den.is_constant():
            c = den.leading_coefficient()
            if c != 1:
                num = num / c
            return cls._raw(num, den.context().constant(1), True)
        g = num.gcd(den)
        if not g.is_one():
            num = num / g
            den = den / g
        lc = den.leading_coefficient()
        if lc != 1:
            num = num / lc
            den = den / lc
        if den.is_constant():
            return cls._raw(num, den, True)
        return cls._raw(num, den, False)

    def _ground(self):
        """The rational value if constant, else None (cached)."""
        c = self._const
        if c is None:
            if self._poly and self.num.is_constant():
                c = self.num.leading_coefficient() if not self.num.is_zero() else flint.fmpq(0)
            else:
                c = False
            self._const = c
        return None if c is False else c

    def _current(self) -> "Scalar":
        # refresh in place to the current context; the value is unchanged
        ctx = _L.ctx
        if self.num.context() is not ctx:
            self.num = self.num.project_to_context(ctx)
            self.den = self.den.project_to_context(ctx)
            if not self._poly:
                lc = self.den.leading_coefficient()
                if lc != 1:
                    self.num = self.num / lc
                    self.den = self.den / lc
        return self

    # -- coercion -------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "Scalar | None":
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction, flint.fmpq)):
            return Scalar(other)
        return None

    @staticmethod
    def _pair(a: "Scalar", b: "Scalar"):
        if a.num.context() is not b.num.context():
            a._current()
            b._current()
        return a, b

    # -- field operations ---------------------------------------------------
    def __add__(self, other):
        if isinstance(other, int):
            if other == 0:
                return self
            if self._poly:
                return Scalar._raw(self.num + other, self.den, True)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        c = other._ground()
        if c is not None:
            if not c:
                return self
            if self._poly:
                return Scalar._raw(self.num + c, self.den, True)
            return Scalar._raw(self.num + self.den * c, self.den, False)
        c = self._ground()
        if c is not None:
            if not c:
                return other
            if other._poly:
                return Scalar._raw(other.num + c, other.den, True)
            return Scalar._raw(other.num + other.den * c, other.den, False)
        a, b = self._pair(self, other)
        if a._poly and b._poly:
            return Scalar._raw(a.num + b.num, a.den, True)
        if a.den == b.den:
            return Scalar._normalized(a.num + b.num, a.den)
        return Scalar._normalized(a.num * b.den + b.num * a.den, a.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(-self.num, self.den, self._poly)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 1:
                return self
            if other == 0:
                return ZERO
            return Scalar._raw(self.num * other, self.den, self._poly)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        c = other._ground()
        if c is not None:
            return _scale(self, c)
        c = self._ground()
        if c is not None:
            return _scale(other, c)
        a, b = self._pair(self, other)
        if a._poly and b._poly:
            return Scalar._raw(a.num * b.num, a.den, True)
        return Scalar._normalized(a.num * b.num, a.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero Scalar")
        c = other._ground()
        if c is not None:
            return _scale(self, 1 / c)
        a, b = self._pair(self, other)
        return Scalar._normalized(a.num * b.den, a.den * b.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return ONE / (self ** (-k))
        return Scalar._raw(self.num**k, self.den**k, self._poly)

    # -- comparison -----------------------------------------------------------
    def __eq__(self, other):
        if self is other:
            return True
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        ca = self._ground()
        cb = other._ground()
        if ca is not None or cb is not None:
            return ca == cb
        a, b = self._pair(self, other)
        return a.num == b.num and a.den == b.den

    def __hash__(self):
        h = self._hash
        if h is None:
            c = self._ground()
            if c is not None:
                h = hash(Fraction(int(c.p), int(c.q)))
            else:
                names = self.num.context().names()

                def key(p):
                    return frozenset(
                        (tuple((names[i], e) for i, e in enumerate(m) if e), Fraction(int(c.p), int(c.q)))
                        for m, c in p.terms()
                    )

                h = hash((key(self.num), key(self.den)))
            self._hash = h
        return h

    def __bool__(self):
        return not self.num.is_zero()

    # -- inspection ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self._ground() is not None

    def is_integer(self) -> bool:
        c = self._ground()
        return c is not None and c.q == 1

    def is_polynomial(self) -> bool:
        return self._poly

    def to_fraction(self) -> Fraction:
        c = self._ground()
        if c is None:
            raise ValueError(f"{self} is not a constant")
        return Fraction(int(c.p), int(c.q))

    def __int__(self):
        f = self.to_fraction()
        if f.denominator != 1:
            raise ValueError(f"{self} is not an integer")
        return f.numerator

    def parameters(self) -> tuple[str, ...]:
        names = self.num.context().names()
        used = set()
        for p in (self.num, self.den):
            for m in p.monoms():
                used.update(names[i] for i, e in enumerate(m) if e)
        return tuple(sorted(used))

    def affine_parts(self) -> tuple[Fraction, dict[str, Fraction]]:
        """Split an affine-linear polynomial into (constant, {param: coefficient})."""
        if not self._poly:
            raise ValueError(f"{self} is not a polynomial")
        names = self.num.context().names()
        const = Fraction(0)
        lin: dict[str, Fraction] = {}
        for m, c in self.num.terms():
            d = sum(m)
            c = Fraction(int(c.p), int(c.q))
            if d == 0:
                const = c
            elif d == 1:
                lin[names[m.index(1)]] = c
            else:
                raise ValueError(f"{self} is not affine-linear")
        return const, lin

    def is_affine(self) -> bool:
        try:
            self.affine_parts()
        except ValueError:
            return False
        return True

    def integer_form(self) -> tuple[str, str]:
        """Canonical (numerator, denominator) strings with coprime integer coefficients."""
        self._current()
        coeffs = list(self.num.coeffs()) + list(self.den.coeffs())
        den_l = reduce(lcm, (int(c.q) for c in coeffs), 1)
        ints = [int(c.p) * (den_l // int(c.q)) for c in coeffs]
        g = reduce(gcd, ints, 0) or 1
        scale = flint.fmpq(den_l, g)
        return _poly_str(self.num * scale), _poly_str(self.den * scale)

    # -- substitution -----------------------------------------------------------
    def substitute(self, bindings: Mapping[str, "Scalar | int | Fraction"]) -> "Scalar":
        return substitute(self, bindings)

    # -- text ---------------------------------------------------------------
    def __str__(self):
        n, d = self.integer_form()
        if d == "1":
            return n
        if len(self.num) > 1:
            n = f"({n})"
        if not (d.isidentifier() or d.isdigit()):
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self):
        return f"Scalar('{self}')"

    def __reduce__(self):
        names = self.num.context().names()

        def dump(p):
            return [(m, (int(c.p), int(c.q))) for m, c in p.terms()]

        return (_rebuild, (names, dump(self.num), dump(self.den)))


def _rebuild(names, num_terms, den_terms) -> Scalar:
    params = tuple(n for n in names if not n.startswith("_"))
    _register(*params)
    src = flint.fmpq_mpoly_ctx.get(tuple(names), "deglex")
    num = src.from_dict({tuple(m): flint.fmpq(a, b) for m, (a, b) in num_terms})
    den = src.from_dict({tuple(m): flint.fmpq(a, b) for m, (a, b) in den_terms})
    s = Scalar._raw(num, den, den.is_one())
    return s._current()


def _scale(a: Scalar, c) -> Scalar:
    if c == 1:
        return a
    if not c:
        return ZERO
    return Scalar._raw(a.num * c, a.den, a._poly)


def _fmt_coeff(c) -> str:
    if c.q == 1:
        return str(int(c.p))
    return f"{int(c.p)}/{int(c.q)}"


def _poly_str(p) -> str:
    if p.is_zero():
        return "0"
    names = p.context().names()
    out = []
    for m, c in p.terms():
        mono = "*".join(names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(m) if e)
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = _fmt_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(a)}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append(("-" if neg else "+") + body)
    return "".join(out)


ZERO = Scalar(0)
ONE = Scalar(1)


def param(name: str) -> Scalar:
    """The formal parameter called ``name`` as a Scalar."""
    lay = _register(name)
    g = lay.gens[lay.params.index(name)]
    return Scalar._raw(g, lay.one, True)


def params(*names: str) -> tuple[Scalar, ...]:
    _register(*names)
    return tuple(param(n) for n in names)


def scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, str):
        from .parsing import parse_scalar

        return parse_scalar(x)
    return Scalar(x)


def _eval_poly(p, values: dict[str, Scalar]) -> Scalar:
    names = p.context().names()
    total = ZERO
    for m, c in p.terms():
        term = Scalar(c)
        for i, e in enumerate(m):
            if e:
                term = term * (values[names[i]] ** int(e))
        total = total + term
    return total


def substitute(a: Scalar, bindings: Mapping[str, Scalar | int | Fraction]) -> Scalar:
    """Simultaneously replace parameters by Scalars.

    Raises :class:`NonGenericError` when the denominator vanishes identically.
    """
    values: dict[str, Scalar] = {}
    for name, v in bindings.items():
        v = scalar(v)
        if name in v.parameters():
            raise ValueError(f"binding for {name!r} mentions {name!r} itself")
        values[name] = v
    for n in a.num.context().names():
        if n not in values and not n.startswith("_"):
            values[n] = param(n)
    num = _eval_poly(a.num, values)
    den = _eval_poly(a.den, values)
    if den.is_zero():
        raise NonGenericError(f"substitution {dict(bindings)} makes the denominator of {a} vanish")
    return num / den


# ---------------------------------------------------------------------------
# matrices


class Matrix:
    """Dense immutable matrix of Scalars."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        self.rows = tuple(tuple(scalar(x) for x in row) for row in rows)
        self.nrows = len(self.rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        self.ncols = ncols
        if any(len(r) != ncols for r in self.rows):
            raise ValueError("ragged matrix")

    @classmethod
    def zeros(cls, n: int, m: int | None = None) -> "Matrix":
        m = n if m is None else m
        return cls([[ZERO] * m for _ in range(n)], m)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @classmethod
    def diag(cls, entries: Sequence) -> "Matrix":
        n = len(entries)
        return cls([[scalar(entries[i]) if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int | None = None) -> "Matrix":
        if not cols:
            return cls([[] for _ in range(nrows or 0)], 0)
        return cls([[col[i] for col in cols] for i in range(len(cols[0]))], len(cols))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple[Scalar, ...]:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple[Scalar, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> "Matrix":
        return Matrix([self.column(j) for j in range(self.ncols)], self.nrows)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __add__(self, other: "Matrix") -> "Matrix":
        _same_shape(self, other)
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        _same_shape(self, other)
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self):
        return Matrix([[-a for a in r] for r in self.rows], self.ncols)

    def scale(self, c) -> "Matrix":
        c = scalar(c)
        return Matrix([[c * a for a in r] for r in self.rows], self.ncols)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.columns()
            return Matrix([[_dot(r, c) for c in cols] for r in self.rows], other.ncols)
        vec = [scalar(x) for x in other]
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        return tuple(_dot(r, vec) for r in self.rows)

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix([[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def rank(self) -> int:
        _, pivots = _echelon(self)
        return len(pivots)

    def kernel_basis(self) -> list[tuple[Scalar, ...]]:
        return kernel_basis(self)

    def inverse(self) -> "Matrix":
        n = self.nrows
        if n != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(self.rows)]
        for c in range(n):
            p = next((i for i in range(c, n) if not aug[i][c].is_zero()), None)
            if p is None:
                raise ZeroDivisionError("matrix is singular")
            aug[c], aug[p] = aug[p], aug[c]
            inv = ONE / aug[c][c]
            aug[c] = [x * inv for x in aug[c]]
            for i in range(n):
                if i != c and not aug[i][c].is_zero():
                    f = aug[i][c]
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
        return Matrix([r[n:] for r in aug], n)

    def __repr__(self):
        body = "; ".join(", ".join(str(a) for a in r) for r in self.rows)
        return f"Matrix([{body}])"


def block_diag(blocks: Sequence[Matrix]) -> Matrix:
    n = sum(b.nrows for b in blocks)
    rows = []
    off = 0
    for b in blocks:
        for r in b.rows:
            rows.append([ZERO] * off + list(r) + [ZERO] * (n - off - b.ncols))
        off += b.ncols
    return Matrix(rows, n)


def _same_shape(a: Matrix, b: Matrix):
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")


def _dot(r, c) -> Scalar:
    acc = ZERO
    for a, b in zip(r, c):
        if a and b:
            acc = acc + a * b
    return acc


def _clear_row(row: list[Scalar]) -> list[Scalar]:
    # scale a row so every entry is a polynomial; the row space is unchanged
    dens = [x._current().den for x in row if not x._poly]
    if not dens:
        return list(row)
    m = dens[0]
    for d in dens[1:]:
        m = m * (d / m.gcd(d))
    f = Scalar._from_poly(m)
    return [x * f for x in row]


def _echelon(m: Matrix) -> tuple[list[list[Scalar]], list[int]]:
    """Fraction-free (Bareiss) row echelon form; returns rows and pivot columns."""
    rows = [_clear_row(list(r)) for r in m.rows]
    nr, nc = m.nrows, m.ncols
    pivots: list[int] = []
    prev = ONE
    r = 0
    for c in range(nc):
        if r >= nr:
            break
        p = next((i for i in range(r, nr) if not rows[i][c].is_zero()), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nr):
            a = rows[i][c]
            new = [ZERO] * nc
            for j in range(c + 1, nc):
                v = piv * rows[i][j] - a * rows[r][j]
                new[j] = v if prev == ONE else v / prev
            rows[i] = new
        prev = piv
        pivots.append(c)
        r += 1
    return rows, pivots


def kernel_basis(m: Matrix) -> list[tuple[Scalar, ...]]:
    """Basis of the right kernel over the rational function field.

    Each vector is scaled so that its first nonzero entry is 1.
    """
    if m.ncols == 0:
        return []
    rows, pivots = _echelon(m)
    free = [c for c in range(m.ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [ZERO] * m.ncols
        x[f] = ONE
        for i in reversed(range(len(pivots))):
            pc = pivots[i]
            acc = ZERO
            for j in range(pc + 1, m.ncols):
                if x[j] and rows[i][j]:
                    acc = acc + rows[i][j] * x[j]
            x[pc] = -acc / rows[i][pc]
        lead = next(v for v in x if not v.is_zero())
        if lead != ONE:
            x = [v / lead for v in x]
        basis.append(tuple(x))
    return basis
