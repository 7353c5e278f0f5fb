"""Minimal primes by factorization and linear elimination; Jacobian smoothness.

This is a desk-scale heuristic.  Inputs it cannot certify raise
``DecompositionUnsupported`` instead of returning a guess.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from sympy import QQ
from sympy.polys.rings import ring

from .groebner import groebner
from .ideal import Ideal, dimension, locus_empty, radical_contains
from .poly import Poly, VarContext, elimination, lex


class DecompositionUnsupported(Exception):
    """The component-splitting heuristic could not certify primality."""


@lru_cache(maxsize=64)
def _sympy_ring(names: tuple[str, ...]):
    return ring(",".join(names), QQ)[0]


def factor(p: Poly) -> list[tuple[Poly, int]]:
    """Irreducible factors over Q with multiplicities (constants dropped)."""
    if p.is_constant():
        return []
    R = _sympy_ring(p.ctx.names)
    elem = R.from_dict({m: QQ(c.numerator, c.denominator) for m, c in p.terms.items()})
    _, facs = elem.factor_list()
    out = []
    for f, k in facs:
        terms = {
            tuple(m): Fraction(int(c.numerator), int(c.denominator)) for m, c in f.items()
        }
        out.append((Poly(p.ctx, terms).primitive(), k))
    out.sort(key=lambda fk: (fk[0].degree(), fk[0].to_str()))
    return out


def _linear_solution(g: Poly, allowed: tuple[str, ...]):
    """Return (var, image) when g = c*var + h with c constant and h free of var."""
    for name in allowed:
        i = g.ctx.index(name)
        lin = [(m, c) for m, c in g.terms.items() if m[i]]
        if len(lin) == 1 and lin[0][0][i] == 1 and sum(lin[0][0]) == 1:
            c = lin[0][1]
            rest = {m: -v / c for m, v in g.terms.items() if not m[i]}
            return name, Poly(g.ctx, rest)
    return None


def _split(ideal: Ideal, depth: int = 0) -> list[Ideal]:
    if depth > 40:
        raise DecompositionUnsupported(f"splitting did not stabilise on {ideal}")
    base = ideal.reduced()
    if base.is_unit():
        return []
    if base.is_zero():
        return [base]
    for g in base.gens:
        facs = factor(g)
        if len(facs) > 1 or facs[0][1] > 1:
            out = []
            others = [h for h in base.gens if h != g]
            for f, _ in facs:
                out.extend(_split(Ideal(base.ctx, others + [f]), depth + 1))
            return out
    if len(base.gens) == 1:
        return [base]
    for g in sorted(base.gens, key=lambda p: (p.degree(), len(p.terms))):
        sol = _linear_solution(g, g.ctx.names)
        if sol is None:
            continue
        name, image = sol
        if name in image.variables():
            continue
        rest = [h.subs({name: image}, h.ctx) for h in base.gens if h != g]
        comps = _split(Ideal(base.ctx, rest), depth + 1)
        return [Ideal(base.ctx, list(P.gens) + [g]).reduced() for P in comps]
    lex_gens = groebner(list(base.gens), lex)
    for g in lex_gens:
        facs = factor(g)
        if len(facs) > 1 or facs[0][1] > 1:
            others = [h for h in lex_gens if h != g]
            out = []
            for f, _ in facs:
                out.extend(_split(Ideal(base.ctx, others + [f]), depth + 1))
            return out
    raise DecompositionUnsupported(f"cannot certify primality of {base}")


def minimalize(primes: list[Ideal], inverted: Poly | None = None) -> list[Ideal]:
    if inverted is not None and not inverted.is_constant():
        primes = [P for P in primes if inverted not in P]
    uniq: list[Ideal] = []
    for P in primes:
        if not any(P == Q for Q in uniq):
            uniq.append(P)
    out = [P for P in uniq if not any(Q is not P and P.contains(Q) and not Q.contains(P) for Q in uniq)]
    out.sort(key=lambda P: (-dimension(P), [g.to_str() for g in P.gens]))
    return out


def components_of(ideal: Ideal, inverted: Poly | None = None) -> list[Ideal]:
    """Minimal primes of ``ideal`` (those not inside V(inverted))."""
    return minimalize(_split(ideal), inverted)


# ---------------------------------------------------------------------------


def determinant(rows: list[list[Poly]], ctx: VarContext) -> Poly:
    n = len(rows)
    if n == 0:
        return Poly.const(ctx, 1)
    if n == 1:
        return rows[0][0]
    total = Poly.const(ctx, 0)
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * determinant(minor, ctx)
        total = total + term if j % 2 == 0 else total - term
    return total


def jacobian_minors(polys: list[Poly], size: int, variables: tuple[str, ...]) -> list[Poly]:
    ctx = polys[0].ctx
    jac = [[p.diff(v) for v in variables] for p in polys]
    out = []
    for rows in combinations(range(len(polys)), size):
        for cols in combinations(range(len(variables)), size):
            d = determinant([[jac[r][c] for c in cols] for r in rows], ctx)
            if not d.is_zero():
                out.append(d)
    return out


def prime_is_smooth(P: Ideal, inverted: Poly | None = None) -> bool:
    names = P.ctx.names
    codim = len(names) - dimension(P)
    if codim == 0:
        return True
    minors = jacobian_minors(list(P.gens), codim, names)
    return locus_empty(P.add_polys(minors), None, inverted)


def is_smooth(ideal: Ideal, inverted: Poly | None = None) -> bool:
    """Jacobian criterion on every component, plus pairwise disjointness."""
    comps = components_of(ideal, inverted)
    if not all(prime_is_smooth(P, inverted) for P in comps):
        return False
    for P, Q in combinations(comps, 2):
        if not locus_empty(P, Q, inverted):
            return False
    return True


def radical(ideal: Ideal, inverted: Poly | None = None) -> Ideal:
    """Intersection of the minimal primes (desk-scale)."""
    comps = components_of(ideal, inverted)
    if not comps:
        return Ideal.unit(ideal.ctx)
    out = comps[0]
    for P in comps[1:]:
        out = intersect(out, P)
    return out


def intersect(a: Ideal, b: Ideal) -> Ideal:
    """a ∩ b via elimination of s from s*a + (1-s)*b."""
    ctx = a.ctx
    aux = ctx.fresh_name("_int")
    big = ctx.extend(aux)
    s = Poly.var(big, aux)
    polys = [s * g.to_context(big) for g in a.gens] + [(1 - s) * g.to_context(big) for g in b.gens]
    basis = groebner(polys, elimination([len(ctx)]))
    keep = [Poly._raw(ctx, {m[:-1]: c for m, c in g.terms.items()}) for g in basis if g.degree_in(aux) <= 0]
    return Ideal(ctx, keep).reduced()


__all__ = [
    "DecompositionUnsupported",
    "components_of",
    "factor",
    "intersect",
    "is_smooth",
    "prime_is_smooth",
    "radical",
    "radical_contains",
]
