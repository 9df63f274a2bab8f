"""Command-line entry point: ``vertexlab verify|fuse|character|decompose|commutator``.

Exit codes: 0 success, 1 a verification check failed, 2 usage, parse or domain error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

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
    CosetError,
    superbracket,
    virasoro_field,
)
from .fock import LatticeVector, StateVector
from .fusion import evaluate
from .gl11 import atypical, projective, tensor_and_decompose, truncated_decomposition_table, verma
from .labels import W, NonGenericLabelError
from .parsing import LabelNode, ParseError, parse_call, parse_label_expression
from .scalar import NonGenericError
from .suites import DEFAULT_LEVELS, default_level, run_suite
from .weyl import WeylModuleHandle, character

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, text: str, payload) -> None:
    out = json.dumps(payload, indent=2, sort_keys=False) if args.format == "json" else text
    if args.out:
        Path(args.out).write_text(out + "\n")
    print(out)


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    if args.level is not None and args.level < 1:
        raise UsageError("--level must be at least 1")
    options = {}
    if args.modes is not None:
        options["modes"] = args.modes
    if args.suite == "singular":
        if args.r is not None:
            options["rs"] = [args.r]
        if args.n is not None:
            options["ns"] = [args.n]
    elif args.r is not None or args.n is not None:
        raise UsageError("--r and --n only apply to the singular suite")
    if "modes" in options and args.suite not in ("weyl", "virasoro", "gl11", "fermion", "automorphism"):
        raise UsageError(f"--modes does not apply to the {args.suite} suite")
    try:
        level = args.level if args.level is not None else default_level(args.suite)
    except ValueError as e:
        raise UsageError(str(e)) from None
    report = run_suite(args.suite, level, **options)
    text = report.to_text()
    if args.suite == "singular" and report.passed:
        from .gl11 import expected_label
        from .scalar import param

        rs = options.get("rs", range(-2, 3))
        ns = options.get("ns", range(-2, 3))
        lines = [text]
        for r in rs:
            for n in ns:
                lab = expected_label(r, param("lam"), n)
                lines.append(f"  r={r} n={n}: N(0) = {lab.n_eigen}, E(0) = {lab.e_eigen}, L(0) = {lab.level_shift}")
        text = "\n".join(lines)
    _emit(args, text, report.to_json())
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# fuse


def cmd_fuse(args) -> int:
    result = evaluate(parse_label_expression(args.expr))
    _emit(args, str(result), {"expression": args.expr, "result": result.to_json(), "text": str(result)})
    return EXIT_OK


# ---------------------------------------------------------------------------
# character


def _module_from_text(text: str):
    node = parse_label_expression(text)
    if not isinstance(node, LabelNode):
        raise UsageError("character expects a single module, not a sum or product")
    if node.kind == "M" or (node.kind == "SC" and node.index == 0):
        return "weyl", WeylModuleHandle.vacuum()
    if node.kind == "Pi":
        return "weyl", WeylModuleHandle.pi(node.index, node.param)
    if node.kind == "W":
        lab = W(node.index, node.param)
        return "weyl", WeylModuleHandle.relaxed(lab.ell, lab.lam)
    if node.kind == "SPi":
        return "super", (node.index, node.param)
    raise UsageError(f"no realisation available for {text}")


def cmd_character(args) -> int:
    if args.max_level < 0:
        raise UsageError("--max-level must be non-negative")
    kind, module = _module_from_text(args.module)
    if kind == "weyl":
        table = character(module, args.max_level)
        charges = sorted({n for n, _ in table})
        lines = [f"character of {args.module} (rows: level, columns: sector n)"]
        lines.append("level " + " ".join(f"{n:>5}" for n in charges))
        for level in range(args.max_level + 1):
            lines.append(f"{level:>5} " + " ".join(f"{table.get((n, level), 0):>5}" for n in charges))
        payload = {
            "module": args.module,
            "max_level": args.max_level,
            "table": [{"sector": n, "level": lv, "dimension": d} for (n, lv), d in sorted(table.items())],
        }
        _emit(args, "\n".join(lines), payload)
        return EXIT_OK
    r, lam = module
    table = truncated_decomposition_table(r, lam, args.max_level)
    lines = [f"E(0)-eigenspaces of {args.module} (dimensions by level; affine Verma count in brackets)"]
    ok = True
    rows = []
    for s, row in table.items():
        match = row["lattice"] == row["verma"]
        ok &= match
        lab = row["label"]
        lines.append(
            f"  E(0) = {str(lab.e_eigen):<10} {row['lattice']} [{', '.join(map(str, row['verma']))}] "
            f"{'match' if match else 'MISMATCH'}"
        )
        rows.append({
            "s": s,
            "e_eigenvalue": list(lab.e_eigen.integer_form()),
            "n_label": list(lab.n_eigen.integer_form()),
            "l0": list(lab.level_shift.integer_form()),
            "lattice": row["lattice"],
            "verma": row["verma"],
            "match": match,
        })
    _emit(args, "\n".join(lines), {"module": args.module, "max_level": args.max_level, "eigenspaces": rows})
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# decompose


def _finite_module(text: str):
    name, argv = parse_call(text)
    builders = {"A": (atypical, 1), "V": (verma, 2), "P": (projective, 1)}
    if name not in builders:
        raise UsageError(f"unknown gl(1|1) module {name!r}; use A(r), V(r,s) or P(r)")
    fn, arity = builders[name]
    if len(argv) != arity:
        raise UsageError(f"{name} takes {arity} argument(s)")
    return fn(*argv)


def cmd_decompose(args) -> int:
    left, right = _finite_module(args.left), _finite_module(args.right)
    T, parts = tensor_and_decompose(left, right)
    text = f"{left.name} (x) {right.name} = " + " + ".join(str(p) for p in parts)
    payload = {
        "left": left.name,
        "right": right.name,
        "dimension": T.dimension,
        "constituents": [
            {"kind": p.kind, "n_label": list(p.n_label.integer_form()), "e_label": list(p.e_label.integer_form()),
             "parity": p.parity, "dimension": len(p.basis), "text": str(p)}
            for p in parts
        ],
    }
    _emit(args, text, payload)
    return EXIT_OK


# ---------------------------------------------------------------------------
# commutator


def _generator(name: str):
    """(field, kernel mode shift) for a named generator."""
    table = {
        "a": (A, 0),
        "a_star": (A_STAR, -1),
        "beta": (BETA_FIELD, 0),
        "L": (virasoro_field(0), 1),
        "Psi+": (PSI_PLUS, 0),
        "Psi-": (PSI_MINUS, 0),
        "E": (E_FIELD, 0),
        "N": (N_FIELD, 0),
        "psi": (PSI, 0),
        "psi_star": (PSI_STAR, 0),
        "screening": (SCREENING, 0),
    }
    if name not in table:
        raise UsageError(f"unknown generator {name!r}; choose from {', '.join(table)}")
    return table[name]


def _state(text: str) -> StateVector:
    name, argv = parse_call(text)
    if name in ("vac", "vacuum") and not argv:
        return StateVector.exp(LatticeVector(0, 0, 0))
    if name == "e" and len(argv) == 3:
        return StateVector.exp(LatticeVector(*argv))
    raise UsageError("state must be 'vacuum' or 'e(c_alpha, c_beta, c_gamma)'")


def cmd_commutator(args) -> int:
    f, sf = _generator(args.x)
    g, sg = _generator(args.y)
    v = _state(args.state)
    result = superbracket(f, args.n + sf, g, args.m + sg, v)
    text = f"[{args.x}({args.n}), {args.y}({args.m})] {args.state} = {result}"
    _emit(args, text, {"x": args.x, "n": args.n, "y": args.y, "m": args.m, "state": args.state, "result": result.to_json()})
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="also write the report to this file")

    parser = argparse.ArgumentParser(prog="vertexlab", description="Exact verification tools for the Weyl vertex algebra.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=tuple(DEFAULT_LEVELS))
    p.add_argument("--level", type=int, help="maximal Heisenberg degree (default from VERTEXLAB_LEVEL_DEFAULT or per suite)")
    p.add_argument("--modes", type=int, help="bound on |n|, |m| for mode indices")
    p.add_argument("--r", type=int, help="singular suite: restrict to this r")
    p.add_argument("--n", type=int, help="singular suite: restrict to this n")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fuse", parents=[common], help="evaluate a fusion product")
    p.add_argument("expr", help="e.g. 'W(0,a) * W(0,b)'")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("character", parents=[common], help="graded dimensions of a module")
    p.add_argument("module", help="M, Pi(r,expr), W(l,expr) or SPi(r,expr)")
    p.add_argument("--max-level", type=int, default=2)
    p.set_defaults(func=cmd_character)

    p = sub.add_parser("decompose", parents=[common], help="decompose a tensor product of gl(1|1) modules")
    p.add_argument("left", help="A(r), V(r,s) or P(r)")
    p.add_argument("right", help="A(r), V(r,s) or P(r)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("commutator", parents=[common], help="superbracket of two generator modes on a state")
    p.add_argument("x")
    p.add_argument("n", type=int)
    p.add_argument("y")
    p.add_argument("m", type=int)
    p.add_argument("--state", default="vacuum", help="'vacuum' or 'e(c_alpha, c_beta, c_gamma)'")
    p.set_defaults(func=cmd_commutator)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParseError, NonGenericLabelError, NonGenericError, CosetError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
