"""Descent in dimension through hypersurfaces of maximal contact.

Given the locus Max t of a level, :func:`descend` builds a simple object
(D, e) with Sing(D, e) = Max t, picks an order-one element z of
Delta^(e-1)(D), makes V(z) a coordinate hyperplane and restricts the weighted
z-expansion coefficients of D to it.  The result is the next level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Mapping

from .algebra import (
    Ideal,
    Poly,
    components_of,
    delta_power,
    dimension,
    factor,
    groebner,
    same_locus,
)
from .basic_object import ClosedSet
from .charts import SubstitutionMap, contact_change
from .invariants import LevelChart, k_ideal


class NoContactElement(AssertionError):
    """No order-one element of the derivative ideal could be made a coordinate."""


class ZeroCoefficientIdeal(Exception):
    """The coefficient ideal vanishes: Sing(D, e) is the whole contact hypersurface."""


class LocusMismatch(AssertionError):
    """A locus that theory says must coincide does not."""


@dataclass
class DescentFrame:
    """One restriction step: the contact variable, the lower object and the link back."""

    chart_id: str
    var: str
    lower: LevelChart | None
    link: SubstitutionMap | None
    D: Ideal
    e: int
    C: Ideal | None = None
    control: int | None = None
    checks: dict = field(default_factory=dict)
    parent: LevelChart | None = None
    bwd: SubstitutionMap | None = None  # lower-level coordinates -> parent-level coordinates


# ---------------------------------------------------------------------------


def r1_of_ideal(F: Ideal, ambient_dim: int, inverted: Poly | None = None) -> list[Ideal]:
    """Codimension-one components (in an ambient of dimension ``ambient_dim``) of V(F)."""
    if F.is_unit():
        return []
    return [P for P in components_of(F, inverted) if dimension(P) == ambient_dim - 1]


def r1_components(F: ClosedSet, d: int, inverted: Mapping[str, Poly | None] | None = None) -> ClosedSet:
    """Union of the codimension-one components of F on each chart (charts without any are omitted)."""
    out = {}
    for cid, I in F.ideals.items():
        comps = r1_of_ideal(I, d, (inverted or {}).get(cid))
        if comps:
            ideal = comps[0]
            for P in comps[1:]:
                ideal = (ideal * P).reduced()
            out[cid] = ideal
    return ClosedSet(out)


def pair_intersection(A: Ideal, a: int, B: Ideal, b: int) -> tuple[Ideal, int]:
    """(A^(l/a) + B^(l/b), l) with l = lcm(a, b); its Sing is Sing(A, a) and Sing(B, b)."""
    if a < 1 or b < 1:
        raise ValueError("controls must be positive")
    l = lcm(a, b)
    return (A.power(l // a) + B.power(l // b)).reduced(), l


def simple_from_tmax(lc: LevelChart, max_t_locus: Ideal, s0: int, q: int) -> tuple[Ideal, int]:
    """Simple object (D, e) on ``lc`` whose singular locus is Max t."""
    mu, _ = lc.word()
    D, e = lc.bar(), mu
    if q > 0:
        K = k_ideal(lc.ctx, lc.old_divisors(s0), q)
        D, e = pair_intersection(D, e, K, 1)
    if mu < lc.b:
        D, e = pair_intersection(D, e, lc.J, lc.b)
    S = lc.delta(D, e - 1) + lc.contact_ideal()
    if not same_locus(S, max_t_locus, lc.inverted):
        raise LocusMismatch(f"Sing(D, e) differs from Max t on {lc.id}")
    return D, e


def _graph(g: Poly, name: str):
    i = g.ctx.index(name)
    lin = [(m, c) for m, c in g.terms.items() if m[i]]
    if len(lin) != 1 or lin[0][0][i] != 1 or sum(lin[0][0]) != 1:
        return None
    h = Poly._raw(g.ctx, {m: c for m, c in g.terms.items() if not m[i]})
    return lin[0][1], h


def maximal_contact(D: Ideal, e: int, lc: LevelChart, forbidden: frozenset[str] = frozenset()) -> tuple[str, Fraction, Poly]:
    """Order-one element ``c*v + h`` of Delta^(e-1)(D), h free of v.

    Ordinary variables are preferred over exceptional ones (which may only be
    used as ``z = v`` exactly); ties go to the earliest variable.  Variables in
    ``forbidden`` (divisors that must stay transversal) are never used.
    """
    T = lc.delta(D, e - 1)
    if T.is_unit():
        raise NoContactElement("Delta^(e-1)(D) is the unit ideal")
    exc = set(lc.exceptional_vars)
    ctx = lc.ctx

    def candidates(gens):
        found = []
        for g in gens:
            for v in lc.ambient:
                if v in forbidden or g.degree_in(v) != 1:
                    continue
                gf = _graph(g, v)
                if gf is None:
                    continue
                c, h = gf
                if v in exc and not h.is_zero():
                    continue
                found.append(((v in exc, ctx.index(v)), v, c, h))
        return found

    found = candidates(T.gb())
    if not found:
        for v in lc.ambient:
            if v in exc:
                continue
            pos = ctx.index(v)

            def key(m, pos=pos):
                return (m[pos],) + tuple(m)

            found = candidates(groebner(list(T.gens), key))
            if found:
                break
    if not found:
        raise NoContactElement(f"no coordinate contact element on {lc.id}")
    found.sort(key=lambda f: f[0])
    _, v, c, h = found[0]
    return v, Fraction(c), h


def _reduce_principal_power(C: Ideal, L: int) -> tuple[Ideal, int]:
    """(g^m, m*c) -> (g, c) for a principal ideal (weakly equivalent, smaller)."""
    if len(C.gens) != 1 or C.gens[0].is_constant():
        return C, L
    facs = factor(C.gens[0])
    m = L
    for _, k in facs:
        m = gcd(m, k)
    if m <= 1:
        return C, L
    root = Poly.const(C.ctx, 1)
    for f, k in facs:
        root = root * f ** (k // m)
    return Ideal(C.ctx, [root]), L // m


def coefficient_ideal(D: Ideal, e: int, var: str) -> tuple[Ideal, int]:
    """Sum over i < e of <c_i>^(L/(e-i)) with L the lcm of the occurring e - i.

    ``c_i`` are the coefficients of the expansions of the generators of D in
    powers of ``var``; the zero ideal is returned with control 0.
    """
    entries = []
    for g in D.gens:
        for i, c in g.coefficients_in(var).items():
            if i < e and not c.is_zero():
                entries.append((c, e - i))
    if not entries:
        return Ideal.zero(D.ctx), 0
    L = 1
    for _, w in entries:
        L = lcm(L, w)
    out = Ideal.zero(D.ctx)
    for c, w in entries:
        out = out + Ideal(D.ctx, [c]).power(L // w)
    return out.reduced(), L


def coefficient_descent(D: Ideal, e: int, lc: LevelChart, var: str, c: Fraction, h: Poly, s0: int, sigma: int) -> DescentFrame:
    """Lower object on V(c*var + h): weighted coefficient ideal of D restricted there."""
    fwd, bwd = contact_change(lc.ctx, var, c, h)
    D1 = fwd.apply_ideal(D).reduced()
    C, L = coefficient_ideal(D1, e, var)
    frame = DescentFrame(lc.id, var, None, bwd.then(lc.to_chart), D, e, parent=lc, bwd=bwd)
    if L == 0:
        return frame
    C, L = _reduce_principal_power(C, L)
    inverted = None if lc.inverted is None else fwd.apply(lc.inverted)
    ambient = tuple(n for n in lc.ambient if n != var)
    lower = LevelChart(
        state=lc.state,
        ambient=ambient,
        contact=lc.contact + (var,),
        J=C,
        b=L,
        eligible=tuple(r for r in lc.new_divisors(s0) if r.var != var),
        sigma=sigma,
        to_chart=bwd.then(lc.to_chart),
        inverted=inverted,
    )
    lower_sing = lower.sing()
    parent_sing = delta_power(D1, e - 1, lc.ambient) + lc.contact_ideal()
    ok = same_locus(lower_sing, parent_sing, inverted)
    frame.lower = lower
    frame.C = C
    frame.control = L
    frame.checks["sing_preserved"] = ok
    if not ok:
        raise LocusMismatch(f"Sing(C, {L}) != Sing(D, {e}) on {lc.id}")
    return frame


def descend(lc: LevelChart, max_t_locus: Ideal, s0: int, q: int, sigma: int) -> DescentFrame:
    """Full descent step on one chart of a level."""
    D, e = simple_from_tmax(lc, max_t_locus, s0, q)
    forbidden = frozenset(r.var for r in lc.new_divisors(s0))
    var, c, h = maximal_contact(D, e, lc, forbidden)
    return coefficient_descent(D, e, lc, var, c, h, s0, sigma)


__all__ = [
    "DescentFrame",
    "LocusMismatch",
    "NoContactElement",
    "ZeroCoefficientIdeal",
    "coefficient_descent",
    "coefficient_ideal",
    "descend",
    "maximal_contact",
    "pair_intersection",
    "r1_components",
    "r1_of_ideal",
    "simple_from_tmax",
]
