"""Verification suites: exact identity checks with serialised failure witnesses.

Each suite applies operator identities to a batch of basis states at once by tagging
state i with a formal variable t^(i+1); a nonzero residual is split back by tag to
report the first failing basis state.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Callable, Sequence

from .fields import (
    A,
    A_STAR,
    BETA_FIELD,
    E_FIELD,
    N_FIELD,
    PSI,
    PSI_MINUS,
    PSI_PLUS,
    PSI_STAR,
    SCREENING,
    central_charge,
    field_mode,
    omega_state,
    spectral_flow_twist,
    virasoro_field,
)
from .fock import (
    BasisState,
    LatticeVector,
    StateVector,
    ZERO_VECTOR,
    enumerate_basis,
    pi_exponential,
    tagged_sum,
    untag,
)
from .gl11 import (
    CURRENTS,
    PARITY,
    invariant_form,
    lie_bracket,
    singular_vector_check,
    sugawara_identity_check,
    sugawara_state,
    sugawara_combination,
)
from .labels import SC, W
from .scalar import ONE, ZERO, param, scalar, tag
from .weyl import (
    G,
    SIGMA,
    AutomorphismWord,
    WeylModuleHandle,
    act_on_label,
    apply_automorphism,
    l0_eigenvalue,
    l0_from_engine,
    mode_word_state,
    rho,
    sigma0_check,
    weyl_mode,
)

__all__ = ["Check", "RunReport", "SUITES", "DEFAULT_LEVELS", "default_level", "run_suite"]

DEFAULT_LEVELS = {
    "weyl": 5,
    "virasoro": 4,
    "gl11": 4,
    "fermion": 4,
    "screening": 3,
    "singular": 4,
    "sugawara": 1,
    "automorphism": 4,
}


def default_level(suite: str) -> int:
    env = os.environ.get("VERTEXLAB_LEVEL_DEFAULT")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"VERTEXLAB_LEVEL_DEFAULT must be an integer, got {env!r}") from None
        if value < 1:
            raise ValueError("VERTEXLAB_LEVEL_DEFAULT must be at least 1")
        return value
    return DEFAULT_LEVELS[suite]


@dataclass
class Check:
    identity: str
    passed: bool
    witness: dict | None = None
    detail: str = ""

    def to_json(self) -> dict:
        out = {"identity": self.identity, "status": "pass" if self.passed else "fail"}
        if self.detail:
            out["detail"] = self.detail
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class RunReport:
    suite: str
    parameters: dict
    checks: list[Check] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "status": "pass" if self.passed else "fail",
            "parameters": self.parameters,
            "checks": [c.to_json() for c in self.checks],
            "passed": sum(c.passed for c in self.checks),
            "failed": len(self.failures()),
            "wall_time": round(self.wall_time, 3),
        }

    def to_text(self) -> str:
        lines = [f"suite {self.suite}: {'PASS' if self.passed else 'FAIL'}"]
        params = ", ".join(f"{k}={v}" for k, v in self.parameters.items())
        lines.append(f"  parameters: {params}")
        lines.append(f"  checks: {len(self.checks)} run, {len(self.failures())} failed")
        for c in self.checks:
            if not c.passed or c.detail:
                status = "ok  " if c.passed else "FAIL"
                extra = f"  [{c.detail}]" if c.detail else ""
                lines.append(f"  {status} {c.identity}{extra}")
                if c.witness is not None:
                    lines.append(f"       witness state: {c.witness.get('state')}")
                    lines.append(f"       residual: {c.witness.get('residual_text')}")
        lines.append(f"  wall time: {self.wall_time:.2f} s")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# batched operator checks


class Batch:
    """A tagged sum of states plus a cache of single mode actions on it."""

    def __init__(self, name: str, states: Sequence, ops: dict[str, tuple[Callable, int]], tagged: StateVector | None = None):
        self.name = name
        self.states = list(states)
        self.vector = tagged if tagged is not None else tagged_sum(self.states)
        self.ops = ops
        self._cache: dict = {}

    def act(self, op: str, n, v: StateVector | None = None) -> StateVector:
        fn = self.ops[op][0]
        if v is not None:
            return fn(n, v)
        key = (op, n)
        if key not in self._cache:
            self._cache[key] = fn(n, self.vector)
        return self._cache[key]

    def bracket(self, x: str, n, y: str, m) -> StateVector:
        xy = self.act(x, n, self.act(y, m))
        yx = self.act(y, m, self.act(x, n))
        odd = self.ops[x][1] and self.ops[y][1]
        return xy + yx if odd else xy - yx

    def check(self, identity: str, residual: StateVector) -> Check:
        if residual.is_zero():
            return Check(identity, True)
        return Check(identity, False, self.witness(residual))

    def witness(self, residual: StateVector) -> dict:
        parts = untag(residual)
        i, res = next(iter(parts.items()))
        state = self.states[i]
        text = str(state) if isinstance(state, BasisState) else str(state)
        return {
            "module": self.name,
            "state": text,
            "state_terms": state.to_json() if hasattr(state, "to_json") else str(state),
            "residual": res.to_json(),
            "residual_text": str(res),
        }


def _delta(a, b) -> bool:
    return scalar(a + b).is_zero()


def _weyl_ops() -> dict:
    return {
        "a": (lambda n, v: field_mode(A, n, v), 0),
        "a*": (lambda n, v: field_mode(A_STAR, n - 1, v), 0),
    }


def _weyl_modules(lam) -> list[tuple[str, int, object]]:
    return [("M", 0, 0)] + [(f"Pi({r},{lam})", r, lam) for r in (-1, 0, 1, 2)]


def _module_states(r, lam, level, sectors=(-1, 0, 1)):
    exps = [pi_exponential(r, lam, n) for n in sectors]
    return enumerate_basis(exps, level, (0, 1))


def suite_weyl(level: int, modes: int = 3, sectors=(-1, 0, 1)) -> list[Check]:
    lam = param("lam")
    checks = []
    rng = range(-modes, modes + 1)
    for name, r, l in _weyl_modules(lam):
        batch = Batch(name, _module_states(r, l, level, sectors), _weyl_ops())
        v = batch.vector
        for n, m in cartesian(rng, rng):
            expected = v if n + m == 0 else StateVector()
            checks.append(batch.check(f"{name}: [a({n}), a*({m})] = {int(n + m == 0)}", batch.bracket("a", n, "a*", m) - expected))
            if n <= m:
                checks.append(batch.check(f"{name}: [a({n}), a({m})] = 0", batch.bracket("a", n, "a", m)))
                checks.append(batch.check(f"{name}: [a*({n}), a*({m})] = 0", batch.bracket("a*", n, "a*", m)))
    return checks


def suite_virasoro(level: int, modes: int = 2, sectors=(-1, 0, 1)) -> list[Check]:
    lam, mu = param("lam"), param("mu")
    checks = []
    rng = range(-modes, modes + 1)
    for value, expected in ((0, 2), (Fraction(1, 2), -1), (1, 2)):
        c = central_charge(value)
        checks.append(Check(f"c at mu = {value} is {expected}", c == expected, detail=f"c = {c}"))
    for name, r, l in _weyl_modules(lam):
        ops = _weyl_ops()
        ops["beta"] = (lambda n, v: field_mode(BETA_FIELD, n, v), 0)
        ops["L"] = (lambda n, v: field_mode(virasoro_field(0), n + 1, v), 0)
        ops["Lmu"] = (lambda n, v: field_mode(virasoro_field(mu), n + 1, v), 0)
        batch = Batch(name, _module_states(r, l, level, sectors), ops)
        v = batch.vector
        cmu = central_charge(mu)
        for n, m in cartesian(rng, rng):
            d = n + m == 0
            checks.append(batch.check(f"{name}: [beta({n}), beta({m})] = {-n * d}", batch.bracket("beta", n, "beta", m) - (-n * d) * v))
            checks.append(batch.check(f"{name}: [beta({n}), a({m})] = -a({n + m})", batch.bracket("beta", n, "a", m) + batch.act("a", n + m)))
            checks.append(batch.check(f"{name}: [beta({n}), a*({m})] = a*({n + m})", batch.bracket("beta", n, "a*", m) - batch.act("a*", n + m)))
            checks.append(batch.check(f"{name}: [L({n}), a({m})] = {-m} a({n + m})", batch.bracket("L", n, "a", m) + m * batch.act("a", n + m)))
            checks.append(batch.check(
                f"{name}: [L({n}), a*({m})] = {-(m + n)} a*({n + m})",
                batch.bracket("L", n, "a*", m) + (m + n) * batch.act("a*", n + m),
            ))
            # a has weight 1 - mu and a* has weight mu for omega_mu
            ca = -mu * (n + 1) - m
            cb = mu * (n + 1) - (m + n)
            checks.append(batch.check(f"{name}: [L^mu({n}), a({m})] = ({ca}) a({n + m})", batch.bracket("Lmu", n, "a", m) - ca * batch.act("a", n + m)))
            checks.append(batch.check(f"{name}: [L^mu({n}), a*({m})] = ({cb}) a*({n + m})", batch.bracket("Lmu", n, "a*", m) - cb * batch.act("a*", n + m)))
            central = cmu * Fraction(n ** 3 - n, 12) if d else ZERO
            checks.append(batch.check(
                f"{name}: [L^mu({n}), L^mu({m})] = {n - m} L^mu({n + m}) + {central}",
                batch.bracket("Lmu", n, "Lmu", m) - (n - m) * batch.act("Lmu", n + m) - central * v,
            ))
    checks.extend(_eigenvalue_checks())
    checks.extend(_zhu_checks())
    return checks


def _eigenvalue_checks(rs=range(-2, 3), ns=range(-2, 3)) -> list[Check]:
    lam = param("lam")
    checks = []
    for r, n in cartesian(rs, ns):
        x = lam + n
        for mu in (0, 1):
            engine = l0_from_engine(r, x, mu)
            closed = l0_eigenvalue(r, x, mu)
            checks.append(Check(
                f"L^{mu}(0) on e^({r}beta + (lam+{n})(alpha+beta)) matches the closed form",
                engine == closed,
                detail="" if engine == closed else f"engine {engine}, closed form {closed}",
            ))
    return checks


def _zhu_checks() -> list[Check]:
    lam = param("lam")
    module = WeylModuleHandle.pi(1, lam)
    bad = []
    for n in range(-3, 4):
        v = StateVector.exp(module.exponential(n))
        if not field_mode(virasoro_field(0), 1, v).is_zero():
            bad.append(n)
    return [Check("L(0) vanishes on the level-0 states of Pi(1,lam), n in -3..3", not bad, detail=f"failing n: {bad}" if bad else "")]


def _gl11_states(level: int, sectors=(-1, 0, 1), charges=(-1, 0, 1)):
    exps = [LatticeVector(n, n, c) for n in sectors for c in charges]
    return enumerate_basis(exps, level, (0, 1, 2))


def suite_gl11(level: int, modes: int = 2) -> list[Check]:
    ops = {name: ((lambda f: lambda n, v: field_mode(f, n, v))(f), PARITY[name]) for name, f in CURRENTS.items()}
    batch = Batch("M*F", _gl11_states(level), ops)
    v = batch.vector
    rng = range(-modes, modes + 1)
    checks = []
    names = list(CURRENTS)
    for x, y in cartesian(names, names):
        for n, m in cartesian(rng, rng):
            expected = StateVector()
            for c, z in lie_bracket(x, y):
                expected = expected + c * batch.act(z, n + m)
            k = invariant_form(x, y) * n if n + m == 0 else 0
            if k:
                expected = expected + k * v
            rhs = " + ".join([f"{c} {z}({n + m})" for c, z in lie_bracket(x, y)] + ([str(k)] if k else [])) or "0"
            checks.append(batch.check(f"[{x}({n}), {y}({m})] = {rhs}", batch.bracket(x, n, y, m) - expected))
    return checks


def suite_fermion(level: int, modes: int = 2, charges=range(-2, 3)) -> list[Check]:
    # psi(k + 1/2) is the mode k of Y(e^gamma, z)
    ops = {
        "psi": (lambda n, v: field_mode(PSI, n, v), 1),
        "psi*": (lambda n, v: field_mode(PSI_STAR, n, v), 1),
    }
    states = enumerate_basis([LatticeVector(0, 0, c) for c in charges], level, (2,))
    batch = Batch("F", states, ops)
    v = batch.vector
    rng = range(-modes - 1, modes + 1)
    checks = []
    for n, m in cartesian(rng, rng):
        r, s = Fraction(2 * n + 1, 2), Fraction(2 * m + 1, 2)
        d = r + s == 0
        checks.append(batch.check(f"[psi({r}), psi*({s})] = {int(d)}", batch.bracket("psi", n, "psi*", m) - (v if d else StateVector())))
        checks.append(batch.check(f"[psi({r}), psi({s})] = 0", batch.bracket("psi", n, "psi", m)))
        checks.append(batch.check(f"[psi*({r}), psi*({s})] = 0", batch.bracket("psi*", n, "psi*", m)))
    return checks


def weyl_pbw_words(level: int) -> list[tuple[tuple[str, int], ...]]:
    """Ordered monomials in a(-n) (n >= 1, degree n) and a*(-m) (m >= 0, degree m+1) of degree <= level."""
    gens = [("a", -n, n) for n in range(1, level + 1)] + [("a_star", -m, m + 1) for m in range(0, level)]
    out = []

    def rec(i, left, acc):
        if i == len(gens):
            out.append(tuple(acc))
            return
        gen, n, deg = gens[i]
        k = 0
        while k * deg <= left:
            rec(i + 1, left - k * deg, acc + [(gen, n)] * k)
            k += 1

    rec(0, level, [])
    return sorted(out, key=lambda w: (len(w), w))


def suite_screening(level: int) -> list[Check]:
    words = weyl_pbw_words(level)
    states = [mode_word_state(w) for w in words]
    tagged = StateVector()
    for i, s in enumerate(states):
        tagged = tagged + tag(i) * s
    names = [" ".join(f"{g}({n})" for g, n in w) + " 1" if w else "1" for w in words]

    class _Named:
        def __init__(self, text, state):
            self.text, self.state = text, state

        def __str__(self):
            return self.text

        def to_json(self):
            return self.state.to_json()

    batch = Batch("M", [_Named(t, s) for t, s in zip(names, states)], {}, tagged=tagged)
    checks = [
        Check("a = a(-1)1 and a* = a*(0)1 are nonzero", not mode_word_state([("a", -1)]).is_zero() and not mode_word_state([("a_star", 0)]).is_zero()),
        batch.check(f"e^alpha_0 annihilates all {len(words)} PBW states of degree <= {level}", field_mode(SCREENING, 0, tagged)),
    ]
    return checks


def suite_singular(level: int, rs=range(-2, 3), ns=range(-2, 3)) -> list[Check]:
    lam = param("lam")
    checks = []
    for r, n in cartesian(rs, ns):
        for desc, residual in singular_vector_check(r, n, lam, level):
            v = f"e^({r}(beta+gamma) + (lam+{n})(alpha+beta))"
            c = Check(f"{v}: {desc}", residual.is_zero())
            if not c.passed:
                c.witness = {"state": v, "residual": residual.to_json(), "residual_text": str(residual)}
            checks.append(c)
    return checks


def _literal(terms: dict) -> StateVector:
    return StateVector({BasisState._of(ZERO_VECTOR, mono): c for mono, c in terms.items()})


def suite_sugawara(level: int) -> list[Check]:
    half = Fraction(1, 2)
    omega_lattice = _literal({((0, 1), (0, 1)): half, ((0, 2),): -half, ((1, 1), (1, 1)): -half, ((1, 2),): half})
    omega_one = omega_lattice - _literal({((1, 2),): 1})
    omega = mode_word_state([("a", -1), ("a_star", -1)])
    g_omega = mode_word_state([("a", -1), ("a_star", -1)], G)
    checks = []

    def eq(identity, lhs, rhs):
        diff = lhs - rhs
        c = Check(identity, diff.is_zero(), detail="state difference 0" if diff.is_zero() else "")
        if not c.passed:
            c.witness = {"state": identity, "residual": diff.to_json(), "residual_text": str(diff)}
        checks.append(c)

    eq("a(-1)a*(-1)1 = (alpha(-1)^2 - alpha(-2) - beta(-1)^2 + beta(-2))1 / 2", omega, omega_lattice)
    eq("g(omega) = -a(-2)a*(0)1 = omega_1", g_omega, omega_one)
    eq("omega_1 = omega - beta(-2)1", omega_state(1), omega_one)
    eq("quadratic gl(1|1) current expression = (alpha(-1)^2 - alpha(-2) - beta(-1)^2 + gamma(-1)^2)1 / 2",
       sugawara_identity_check(), StateVector())
    eq("quadratic gl(1|1) current expression = omega_{1/2} + gamma(-1)^2 1 / 2", sugawara_combination(), sugawara_state())
    return checks


def suite_automorphism(level: int, shifts=range(-2, 3), modes: int = 2) -> list[Check]:
    lam = param("lam")
    checks = []
    ident = AutomorphismWord()
    checks.append(Check("g^4 = id on mode labels", (G ** 4).mode_map() == ident.mode_map()))
    checks.append(Check("g = rho_{-1} o sigma", G.mode_map() == (rho(-1) @ SIGMA).mode_map()))
    checks.append(Check("g = sigma o rho_1", G.mode_map() == (SIGMA @ rho(1)).mode_map()))
    checks.append(Check("g o g = rho_{-1} o sigma o rho_{-1} o sigma", (G @ G).mode_map() == (rho(-1) @ SIGMA @ rho(-1) @ SIGMA).mode_map()))
    checks.append(Check("rho_a o rho_b = rho_{a+b}", all((rho(a) @ rho(b)).mode_map() == rho(a + b).mode_map() for a in shifts for b in shifts)))
    checks.append(Check("sigma^2 = -1 on the generators", (SIGMA ** 2).mode_map().normal_form() == (0, 0, -1)))
    for ell in shifts:
        u = W(ell, lam)
        checks.append(Check(f"g(rho_{ell}(U(lam))) = rho_{1 - ell}(U(-lam))", act_on_label(G, u) == W(1 - ell, -lam)))
        pi = WeylModuleHandle.pi(ell, lam)
        checks.append(Check(f"Pi({ell},lam) = rho_{1 - ell}(U(-lam))", pi.label() == W(1 - ell, -lam)))
        checks.append(Check(f"Pi({ell},lam)^g = rho_{ell}(U(lam))", apply_automorphism(G, pi).label() == W(ell, lam)))
        checks.append(Check(f"g(SC({ell})) = SC({-ell})", act_on_label(G, SC(ell)) == SC(-ell)))
    for name, ok in sigma0_check().items():
        checks.append(Check(name, ok))
    # spectral flow twisted generators on the lattice states
    states = _module_states(0, 0, level)
    rng = range(-modes, modes + 1)
    for s in shifts:
        ta, tb = spectral_flow_twist(s, A), spectral_flow_twist(s, A_STAR)
        ops = {
            "a": (lambda n, v, f=ta: f.mode(n, v), 0),
            "a*": (lambda n, v, f=tb: f.mode(n - 1, v), 0),
        }
        batch = Batch(f"rho_{s}(M)", states, ops)
        v = batch.vector
        for n, m in cartesian(rng, rng):
            expected = v if n + m == 0 else StateVector()
            checks.append(batch.check(f"rho_{s}: [a({n}), a*({m})] = {int(n + m == 0)}", batch.bracket("a", n, "a*", m) - expected))
            checks.append(batch.check(f"rho_{s}: [a({n}), a({m})] = 0", batch.bracket("a", n, "a", m)))
            checks.append(batch.check(f"rho_{s}: [a*({n}), a*({m})] = 0", batch.bracket("a*", n, "a*", m)))
        for n in rng:
            checks.append(batch.check(f"rho_{s}(a)({n}) = a({n + s})", batch.act("a", n) - field_mode(A, n + s, v)))
            checks.append(batch.check(f"rho_{s}(a*)({n}) = a*({n - s})", batch.act("a*", n) - field_mode(A_STAR, n - s - 1, v)))
    # twisted module handles act through the relabelled modes
    inner = WeylModuleHandle.pi(1, lam)
    for word in (SIGMA, G, rho(2), G @ rho(-1)):
        module = apply_automorphism(word, inner)
        states = _module_states(1, lam, min(level, 3))
        batch = Batch(str(module), states, {
            "a": (lambda n, v, h=module: weyl_mode("a", n, v, h), 0),
            "a*": (lambda n, v, h=module: weyl_mode("a_star", n, v, h), 0),
        })
        v = batch.vector
        for n, m in cartesian(rng, rng):
            expected = v if n + m == 0 else StateVector()
            checks.append(batch.check(f"{module}: [a({n}), a*({m})] = {int(n + m == 0)}", batch.bracket("a", n, "a*", m) - expected))
    return checks


SUITES: dict[str, Callable[[int], list[Check]]] = {
    "weyl": suite_weyl,
    "virasoro": suite_virasoro,
    "gl11": suite_gl11,
    "fermion": suite_fermion,
    "screening": suite_screening,
    "singular": suite_singular,
    "sugawara": suite_sugawara,
    "automorphism": suite_automorphism,
}


def run_suite(name: str, level: int | None = None, **options) -> RunReport:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if level is None:
        level = default_level(name)
    if level < 1:
        raise ValueError("level must be at least 1")
    start = time.perf_counter()
    checks = SUITES[name](level, **options)
    params = {"level": level}
    params.update({k: (list(v) if isinstance(v, range) else v) for k, v in options.items()})
    return RunReport(name, params, checks, time.perf_counter() - start)
