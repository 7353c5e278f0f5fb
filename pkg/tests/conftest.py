from __future__ import annotations

import sympy
from hypothesis import HealthCheck, settings

from desing.algebra import Ideal, Poly, VarContext, parse_poly

settings.register_profile(
    "desing", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("desing")

XY = VarContext(("x", "y"))
XYZ = VarContext(("x", "y", "z"))
X = VarContext(("x",))


def P(text: str, ctx: VarContext = XY) -> Poly:
    return parse_poly(text, ctx)


def I(*texts: str, ctx: VarContext = XY) -> Ideal:
    return Ideal(ctx, [parse_poly(t, ctx) for t in texts])


def to_sympy(p: Poly):
    syms = sympy.symbols(p.ctx.names)
    expr = sympy.Integer(0)
    for m, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, e in zip(syms, m):
            term *= s**e
        expr += term
    return sympy.expand(expr)


def from_sympy(expr, ctx: VarContext) -> Poly:
    syms = sympy.symbols(ctx.names)
    poly = sympy.Poly(sympy.expand(expr), *syms)
    terms = {}
    from fractions import Fraction

    for m, c in poly.terms():
        c = sympy.Rational(c)
        terms[tuple(m)] = Fraction(int(c.p), int(c.q))
    return Poly(ctx, terms)


# one verdict line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
