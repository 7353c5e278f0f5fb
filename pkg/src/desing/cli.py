"""Command-line front end.

Problem files are line directives::

    # the cusp
    vars x y
    gens x^2 - y^3
    control 2
    divisor y minus

Commands: ``resolve``, ``principalize``, ``embedded``, ``verify`` (on a
problem file), ``trick B' B N`` and ``selftest``.  Exit codes: 0 success,
1 I/O error, 2 parse error, 3 step limit, 4 internal assertion.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Ideal, ParseError, Poly, VarContext, parse_poly
from .charts import MINUS, PLUS
from .resolver import (
    DEFAULT_MAX_STEPS,
    AlreadyResolved,
    ResolutionTree,
    StepLimitExceeded,
    embedded_resolve,
    hironaka_trick,
    principalize,
    resolve_ideal,
    trick_bound,
)

log = logging.getLogger("desing")

EXIT_OK, EXIT_IO, EXIT_PARSE, EXIT_STEPS, EXIT_ASSERT = 0, 1, 2, 3, 4

_NAME_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_0123456789")


@dataclass(frozen=True)
class ProblemFile:
    vars: tuple[str, ...]
    gens: tuple[Poly, ...]
    control: int
    divisors: tuple[tuple[str, str], ...] = ()

    @property
    def ctx(self) -> VarContext:
        return VarContext(self.vars)

    @property
    def ideal(self) -> Ideal:
        return Ideal(self.ctx, self.gens)


def parse_problem(text: str) -> ProblemFile:
    """Parse the directive format; errors carry 1-based line and column."""
    names = None
    gens: list[Poly] = []
    control = None
    divisors: list[tuple[str, str]] = []
    pending_gens: list[tuple[str, int, int]] = []
    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        indent = len(body) - len(body.lstrip())
        directive = stripped.split(None, 1)[0]
        rest = stripped[len(directive):]
        rest_col = indent + len(directive) + 1
        args = rest.split()
        if directive == "vars":
            if names is not None:
                raise ParseError("duplicate vars directive", lineno, indent + 1)
            if not args:
                raise ParseError("vars needs at least one variable", lineno, rest_col)
            col = rest_col
            seen = []
            for a in args:
                col = body.index(a, col - 1) + 1
                if not (a[0].isalpha() or a[0] == "_") or not set(a) <= _NAME_CHARS:
                    raise ParseError(f"bad variable name {a!r}", lineno, col)
                if a in seen:
                    raise ParseError(f"variable {a} declared twice", lineno, col)
                seen.append(a)
                col += len(a)
            names = tuple(seen)
        elif directive == "gens":
            if not rest.strip():
                raise ParseError("gens needs at least one polynomial", lineno, rest_col)
            offset = indent + len(directive)
            for piece in rest.split(","):
                pending_gens.append((piece, lineno, offset + 1))
                offset += len(piece) + 1
        elif directive == "control":
            if control is not None:
                raise ParseError("duplicate control directive", lineno, indent + 1)
            if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                col = body.index(args[0], rest_col - 1) + 1 if args else rest_col
                raise ParseError("control must be a positive integer", lineno, col)
            control = int(args[0])
        elif directive == "divisor":
            if len(args) != 2:
                raise ParseError("divisor needs a variable and a sign", lineno, rest_col)
            v, sign = args
            if names is None or v not in names:
                raise ParseError(f"divisor on undeclared variable {v!r}", lineno, body.index(v, rest_col - 1) + 1)
            if sign not in (PLUS, MINUS):
                raise ParseError(f"sign must be plus or minus, not {sign!r}", lineno, body.rindex(sign) + 1)
            if any(v == d for d, _ in divisors):
                raise ParseError(f"divisor {v} given twice", lineno, rest_col)
            divisors.append((v, sign))
        else:
            raise ParseError(f"unknown directive {directive!r}", lineno, indent + 1)
    last = len(lines) + 1
    if names is None:
        raise ParseError("missing vars directive", last, 1)
    ctx = VarContext(names)
    for piece, lineno, col in pending_gens:
        p = parse_poly(piece, ctx, lineno, col)
        if p.is_zero():
            lead = len(piece) - len(piece.lstrip())
            raise ParseError("generator is zero", lineno, col + lead)
        gens.append(p)
    if not gens:
        raise ParseError("missing gens directive", last, 1)
    if control is None:
        raise ParseError("missing control directive", last, 1)
    return ProblemFile(names, tuple(gens), control, tuple(divisors))


def print_problem(problem: ProblemFile) -> str:
    out = [
        "vars " + " ".join(problem.vars),
        "gens " + ", ".join(g.to_str() for g in problem.gens),
        f"control {problem.control}",
    ]
    out += [f"divisor {v} {s}" for v, s in problem.divisors]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# output


def _rat(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def tree_to_json(tree: ResolutionTree) -> dict:
    nodes = []
    for node in tree.nodes:
        charts = []
        for s in node.obj.states:
            charts.append(
                {
                    "id": s.id,
                    "vars": list(s.chart.ctx.names),
                    "J": s.J.to_strs(),
                    "exceptionals": [
                        {"var": r.var, "birth": r.birth, "a": r.a_num, "sign": r.sign} for r in s.chart.exceptionals
                    ],
                }
            )
        nodes.append(
            {
                "id": node.id,
                "parent": node.parent,
                "invariant": None if node.value is None else node.value.serialize(),
                "charts": charts,
                "center": None if node.center is None else node.center.to_strs(),
                "subst": {cid: m.to_strs() for cid, (_, m) in sorted(node.substs.items())},
            }
        )
    return {"control": tree.control, "nodes": nodes, "terminal": tree.terminal}


def emit_tree(tree: ResolutionTree, path: str) -> None:
    text = json.dumps(tree_to_json(tree), indent=2, ensure_ascii=False) + "\n"
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def trace_line(node) -> str:
    v = node.value
    top = v.components[0]
    maxw = _rat(v.word)
    t = f"({_rat(top.q)},{top.n})" if top.kind == "QZ" else "-"
    center = "; ".join(f"{cid}: <{', '.join(gens)}>" for cid, gens in node.center.to_strs().items())
    return f"step {node.step}: maxw={maxw}, t={t}, center={center}"


# ---------------------------------------------------------------------------
# commands


def _read_problem(path: str) -> ProblemFile:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


def _on_step(args):
    if not args.trace:
        return None

    def emit(node):
        print(trace_line(node), flush=True)

    return emit


def _summary(tree: ResolutionTree) -> None:
    print(f"resolved in {tree.steps} blow-ups ({len(tree.final.states)} charts)")


def cmd_resolve(args) -> int:
    prob = _read_problem(args.file)
    try:
        tree = resolve_ideal(
            prob.ctx, prob.ideal, prob.control, prob.divisors, max_steps=args.max_steps, on_step=_on_step(args)
        )
    except AlreadyResolved:
        print("already resolved")
        return EXIT_OK
    _summary(tree)
    if args.json:
        emit_tree(tree, args.json)
    return EXIT_OK


def cmd_principalize(args) -> int:
    from .verify import check_monomial_final, check_snc

    prob = _read_problem(args.file)
    J = prob.ideal
    if J.is_unit():
        print("already resolved")
        return EXIT_OK
    tree = principalize(prob.ctx, J, prob.divisors, max_steps=args.max_steps, on_step=_on_step(args))
    _summary(tree)
    mono = check_monomial_final(tree.final, J)
    snc = check_snc([s.chart for s in tree.final.states])
    for cid, exps in mono.report.items():
        print(f"  {cid}: " + (" * ".join(f"{v}^{e}" for v, e in exps.items() if e) or "1"))
    print(mono)
    print(snc)
    if args.json:
        emit_tree(tree, args.json)
    return EXIT_OK if mono.passed and snc.passed else EXIT_ASSERT


def cmd_embedded(args) -> int:
    from .algebra import is_smooth
    from .verify import check_snc

    prob = _read_problem(args.file)
    if len(prob.gens) != 1:
        print("error: embedded resolution needs exactly one generator", file=sys.stderr)
        return EXIT_PARSE
    f = prob.gens[0]
    if f.is_constant():
        print("already resolved")
        return EXIT_OK
    tree = embedded_resolve(prob.ctx, f, prob.divisors, max_steps=args.max_steps, on_step=_on_step(args))
    _summary(tree)
    B = tree.final
    smooth = all(is_smooth(Ideal(s.chart.ctx, [s.strict]), s.inverted) for s in B.states)
    snc = check_snc([s.chart for s in B.states], [[s.strict] for s in B.states])
    print(f"strict transform smooth: {'yes' if smooth else 'NO'}")
    print(snc)
    if args.json:
        emit_tree(tree, args.json)
    return EXIT_OK if smooth and snc.passed else EXIT_ASSERT


def cmd_trick(args) -> int:
    bp, b, N = args.bprime, args.b, args.N
    if not (bp >= b >= 1 and N >= 2):
        print("error: need B' >= B >= 1 and N >= 2", file=sys.stderr)
        return EXIT_PARSE
    S, steps = hironaka_trick(bp, b, N)
    if args.trace:
        for st in steps:
            print(f"step {st.step}: {st.kind} blow-up, exponent {st.a}/{b} (expected {st.expected}/{b})")
    bound = trick_bound(bp, b, N)
    print(f"S_max = {S}")
    ok = S == bound
    print(f"bound floor((N-1)(B'/B-1)) = {bound}: {'ok' if ok else 'MISMATCH'}")
    return EXIT_OK if ok else EXIT_ASSERT


def cmd_verify(args) -> int:
    from .verify import check_invariants, check_pullback_compat, check_weak_equiv_scaling

    prob = _read_problem(args.file)
    try:
        tree = resolve_ideal(prob.ctx, prob.ideal, prob.control, prob.divisors, max_steps=args.max_steps)
    except AlreadyResolved:
        print("already resolved")
        return EXIT_OK
    certs = [check_invariants(tree)]
    if not prob.divisors:
        certs.append(check_weak_equiv_scaling(prob.ctx, prob.ideal, prob.control, 2, args.max_steps))
        certs.append(check_pullback_compat(prob.ctx, prob.ideal, prob.control, args.max_steps))
    for c in certs:
        print(c)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump([c.to_json() for c in certs], fh, indent=2)
            fh.write("\n")
    return EXIT_OK if all(c.passed for c in certs) else EXIT_ASSERT


def cmd_selftest(args) -> int:
    from .verify import check_monomial_final, check_snc

    ok = True

    def report(name, passed, t0):
        nonlocal ok
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} {name} ({time.perf_counter() - t0:.2f}s)")

    t0 = time.perf_counter()
    ctx1 = VarContext(("x",))
    x = Poly.var(ctx1, "x")
    good = True
    for a in range(1, 9):
        for b in range(1, a + 1):
            tree = resolve_ideal(ctx1, Ideal(ctx1, [x**a]), b)
            good &= tree.steps == a // b
    report("floor(a/b) law, a <= 8", good, t0)
    t0 = time.perf_counter()
    report("trick 3 2 5", hironaka_trick(3, 2, 5)[0] == trick_bound(3, 2, 5) == 2, t0)
    t0 = time.perf_counter()
    ctx = VarContext(("x", "y"))
    J = Ideal(ctx, [parse_poly("x^2 - y^3", ctx)])
    tree = principalize(ctx, J)
    good = check_monomial_final(tree.final, J).passed and check_snc([s.chart for s in tree.final.states]).passed
    report("principalize cusp", good and tree.steps <= 10, t0)
    t0 = time.perf_counter()
    tree = embedded_resolve(ctx, J.gens[0])
    B = tree.final
    report("embedded cusp", check_snc([s.chart for s in B.states], [[s.strict] for s in B.states]).passed, t0)
    return EXIT_OK if ok else EXIT_ASSERT


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="desing", description="Constructive resolution of basic objects over Q.")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging to standard error")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, json_help="write the resolution tree as JSON to PATH ('-' for stdout)"):
        p.add_argument("file")
        p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
        p.add_argument("--json", metavar="PATH", help=json_help)
        p.add_argument("--trace", action="store_true", help="print one line per blow-up")

    for name, fn, helptext in (
        ("resolve", cmd_resolve, "resolve (J, b)"),
        ("principalize", cmd_principalize, "principalize J (control ignored)"),
        ("embedded", cmd_embedded, "embedded resolution of the hypersurface V(f) (control ignored)"),
    ):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.set_defaults(func=fn)
    p = sub.add_parser("verify", help="resolve and run the certificate suite")
    common(p, json_help="write the certificates as JSON to PATH")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("trick", help="Hironaka's trick on (<x^B'>, B) with N - 1 point blow-ups")
    p.add_argument("bprime", type=int, metavar="B'")
    p.add_argument("b", type=int, metavar="B")
    p.add_argument("N", type=int)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_trick)
    p = sub.add_parser("selftest", help="quick end-to-end checks")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if getattr(args, "max_steps", 1) < 1:
        print("error: --max-steps must be positive", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"{getattr(args, 'file', '<input>')}:{exc}", file=sys.stderr)
        return EXIT_PARSE
    except StepLimitExceeded as exc:
        print(f"step limit: {exc}", file=sys.stderr)
        if getattr(args, "json", None) and exc.tree is not None:
            try:
                emit_tree(exc.tree, args.json)
            except OSError:
                pass
        return EXIT_STEPS
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # assertions and engine failures
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ASSERT


if __name__ == "__main__":
    sys.exit(main())
