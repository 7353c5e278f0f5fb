"""Finitely generated ideals over Q and the derivative-ideal machinery.

Orders of ideals (at points, along subvarieties) are computed only by
iterating the derivative operator ``delta``; no local standard bases.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .groebner import groebner, normal_form
from .poly import ORDERS, OrderKey, Poly, VarContext, degrevlex, elimination

INF = float("inf")


class Ideal:
    """Ideal of Q[ctx] generated by ``gens``; an empty generator list is the zero ideal.

    Generators are stored primitive (integer content 1, positive leading
    coefficient) and deduplicated.  The degrevlex Groebner basis is cached.
    """

    __slots__ = ("ctx", "gens", "_gb", "_delta")

    def __init__(self, ctx: VarContext, gens: Iterable[Poly] = ()):
        self.ctx = ctx
        seen = []
        known = set()
        for g in gens:
            if g.ctx != ctx:
                raise ValueError("generator context mismatch")
            if g.is_zero():
                continue
            g = g.primitive()
            if g not in known:
                known.add(g)
                seen.append(g)
        self.gens: tuple[Poly, ...] = tuple(seen)
        self._gb: list[Poly] | None = None
        self._delta: dict = {}

    @classmethod
    def unit(cls, ctx: VarContext) -> Ideal:
        return cls(ctx, [Poly.const(ctx, 1)])

    @classmethod
    def zero(cls, ctx: VarContext) -> Ideal:
        return cls(ctx, [])

    @classmethod
    def of_vars(cls, ctx: VarContext, names: Iterable[str]) -> Ideal:
        return cls(ctx, [Poly.var(ctx, n) for n in names])

    # -- Groebner data ---------------------------------------------------------
    def gb(self) -> list[Poly]:
        """Reduced monic degrevlex basis (cached)."""
        if self._gb is None:
            self._gb = groebner(list(self.gens), degrevlex)
        return self._gb

    def reduced(self) -> Ideal:
        """The same ideal presented by its reduced Groebner basis."""
        out = Ideal(self.ctx, self.gb())
        out._gb = self._gb
        return out

    def is_zero(self) -> bool:
        return not self.gb()

    def is_unit(self) -> bool:
        g = self.gb()
        return len(g) == 1 and g[0].is_constant()

    def reduce(self, p: Poly) -> Poly:
        return normal_form(p, self.gb())

    def __contains__(self, p: Poly) -> bool:
        return self.reduce(p).is_zero()

    def contains(self, other: Ideal) -> bool:
        return all(g in self for g in other.gens)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ctx == other.ctx and self.gb() == other.gb()

    def __hash__(self) -> int:
        return hash((self.ctx, tuple(self.gb())))

    def __repr__(self) -> str:
        return f"Ideal<{', '.join(g.to_str() for g in self.gens) or '0'}>"

    def to_strs(self) -> list[str]:
        return [g.to_str() for g in self.gens]

    # -- ideal arithmetic ------------------------------------------------------
    def __add__(self, other: Ideal) -> Ideal:
        return Ideal(self.ctx, self.gens + other.gens)

    def __mul__(self, other: Ideal) -> Ideal:
        return Ideal(self.ctx, [a * b for a in self.gens for b in other.gens])

    def power(self, k: int) -> Ideal:
        if k == 0:
            return Ideal.unit(self.ctx)
        base = self.reduced()
        out = base
        for _ in range(k - 1):
            out = (out * base).reduced()
        return out

    def add_polys(self, polys: Iterable[Poly]) -> Ideal:
        return Ideal(self.ctx, self.gens + tuple(polys))

    def subs(self, images: Mapping[str, Poly], target: VarContext) -> Ideal:
        return Ideal(target, [g.subs(images, target) for g in self.gens])

    def to_context(self, target: VarContext) -> Ideal:
        return Ideal(target, [g.to_context(target) for g in self.gens])


# ---------------------------------------------------------------------------


def groebner_basis(ideal: Ideal, order: str | OrderKey = "degrevlex") -> Ideal:
    """Reduced Groebner basis of ``ideal`` for ``order`` as a new Ideal."""
    key = ORDERS[order] if isinstance(order, str) else order
    if key is degrevlex:
        return ideal.reduced()
    basis = groebner(list(ideal.gens), key)
    return Ideal(ideal.ctx, basis)


def ideal_contains(a: Ideal, b: Ideal) -> bool:
    """True iff every generator of ``b`` lies in ``a``."""
    return a.contains(b)


def delta(ideal: Ideal, variables: Sequence[str] | None = None) -> Ideal:
    """The ideal plus all first partials of its generators with respect to ``variables``."""
    names = tuple(variables) if variables is not None else ideal.ctx.names
    base = ideal.reduced()
    polys = list(base.gens)
    for g in base.gens:
        for n in names:
            d = g.diff(n)
            if not d.is_zero():
                polys.append(d)
    return Ideal(ideal.ctx, polys).reduced()


def delta_power(ideal: Ideal, k: int, variables: Sequence[str] | None = None) -> Ideal:
    """k-fold iterate of ``delta`` (k = 0 returns the ideal itself); memoized per ideal."""
    names = tuple(variables) if variables is not None else ideal.ctx.names
    cache = ideal._delta
    chain = cache.get(names)
    if chain is None:
        chain = [ideal.reduced()]
        cache[names] = chain
    while len(chain) <= k:
        last = chain[-1]
        if last.is_unit():
            chain.append(last)
        else:
            chain.append(delta(last, names))
    return chain[k]


def order_at_point(
    ideal: Ideal, point: Mapping[str, Fraction | int], variables: Sequence[str] | None = None
) -> int | float:
    """Order of ``ideal`` at a rational point: least k with some element of Delta^k nonzero there."""
    if ideal.is_zero():
        return INF
    k = 0
    while True:
        d = delta_power(ideal, k, variables)
        if any(g.evaluate(point) != 0 for g in d.gens):
            return k
        k += 1


def _coordinate_vars(prime: Ideal) -> list[str] | None:
    names = []
    for g in prime.gens:
        if len(g.terms) != 1 or g.degree() != 1:
            return None
        names.extend(g.variables())
    return names


def order_along(ideal: Ideal, prime: Ideal, variables: Sequence[str] | None = None) -> int:
    """Order of ``ideal`` at the generic point of V(prime): max k with Delta^(k-1) inside prime."""
    if ideal.is_zero():
        raise ValueError("order of the zero ideal is infinite")
    coords = _coordinate_vars(prime)
    if coords is not None and variables is None:
        # generic order along a coordinate subspace: least degree in its variables
        idx = [ideal.ctx.index(n) for n in coords]
        return min(sum(m[i] for i in idx) for g in ideal.gens for m in g.terms)
    k = 0
    while prime.contains(delta_power(ideal, k, variables)):
        k += 1
    return k


def max_order(ideal: Ideal, variables: Sequence[str] | None = None, within: Ideal | None = None,
              inverted: Poly | None = None) -> int | float:
    """max over points of V(within) (minus V(inverted)) of the order of ``ideal``."""
    if ideal.is_zero():
        return INF
    k = 0
    while not locus_empty(delta_power(ideal, k, variables), within, inverted):
        k += 1
    return k


def _eliminate_aux(polys: list[Poly], ctx: VarContext, aux: str) -> list[Poly]:
    big = ctx.extend(aux)
    order = elimination([len(ctx)])
    basis = groebner([p.to_context(big) if p.ctx != big else p for p in polys], order)
    out = []
    for g in basis:
        if g.degree_in(aux) <= 0:
            out.append(Poly._raw(ctx, {m[:-1]: c for m, c in g.terms.items()}))
    return out


def saturate(ideal: Ideal, f: Poly) -> Ideal:
    """I : f^infinity, by eliminating s from I + <1 - s f>."""
    if f.is_zero():
        raise ValueError("cannot saturate by zero")
    if f.is_constant() or ideal.is_zero():
        return ideal.reduced()
    if ideal.is_unit():
        return ideal
    ctx = ideal.ctx
    aux = ctx.fresh_name("_sat")
    big = ctx.extend(aux)
    s = Poly.var(big, aux)
    polys = [g.to_context(big) for g in ideal.gb()] + [1 - s * f.to_context(big)]
    return Ideal(ctx, _eliminate_aux(polys, ctx, aux)).reduced()


def radical_contains(ideal: Ideal, f: Poly) -> bool:
    """f in rad(ideal), via 1 in I + <1 - s f>."""
    if f.is_zero():
        return True
    ctx = ideal.ctx
    aux = ctx.fresh_name("_rad")
    big = ctx.extend(aux)
    s = Poly.var(big, aux)
    polys = [g.to_context(big) for g in ideal.gb()] + [1 - s * f.to_context(big)]
    basis = groebner(polys, degrevlex)
    return len(basis) == 1 and basis[0].is_constant()


def locus_empty(ideal: Ideal, within: Ideal | None = None, inverted: Poly | None = None) -> bool:
    """V(ideal) ∩ V(within) ∩ D(inverted) is empty (over the algebraic closure)."""
    total = ideal if within is None else ideal + within
    if total.is_unit():
        return True
    if inverted is None or inverted.is_constant():
        return False
    return radical_contains(total, inverted)


def same_locus(a: Ideal, b: Ideal, inverted: Poly | None = None) -> bool:
    """V(a) = V(b) inside D(inverted)."""
    return locus_contains(a, b, inverted) and locus_contains(b, a, inverted)


def locus_contains(big: Ideal, small: Ideal, inverted: Poly | None = None) -> bool:
    """V(small) ⊆ V(big) inside D(inverted): each generator of big lies in rad(small : h^inf)."""
    base = small if inverted is None or inverted.is_constant() else saturate(small, inverted)
    if base.is_unit():
        return True
    return all(radical_contains(base, g) for g in big.gens)


def dimension(ideal: Ideal) -> int:
    """Krull dimension of Q[ctx]/ideal from degrevlex leading monomials (-1 for the unit ideal)."""
    if ideal.is_unit():
        return -1
    n = len(ideal.ctx)
    leads = [g.leading_monomial() for g in ideal.gb()]
    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            s = set(subset)
            if not any(all(i in s for i, e in enumerate(m) if e) for m in leads):
                return size
    return 0


def ideal_quotient_var_power(ideal: Ideal, name: str, k: int) -> Ideal:
    """Exact division of every generator by name^k (asserted)."""
    i = ideal.ctx.index(name)
    mono = tuple(k if j == i else 0 for j in range(len(ideal.ctx)))
    return Ideal(ideal.ctx, [g.divide_monomial(mono) for g in ideal.gens])


def var_power(ideal: Ideal, name: str) -> int | float:
    """Largest k with name^k dividing every element of the ideal."""
    if ideal.is_zero():
        return INF
    return min(g.power_of_var(name) for g in ideal.reduced().gens)
