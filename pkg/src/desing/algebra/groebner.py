"""Buchberger's algorithm with the Gebauer-Moeller pair criteria."""

from __future__ import annotations

from fractions import Fraction

from .poly import (
    Monomial,
    OrderKey,
    Poly,
    degrevlex,
    monomial_divides,
    monomial_lcm,
)


def _lead(terms: dict[Monomial, Fraction], order: OrderKey) -> Monomial:
    return max(terms, key=order)


def reduce_terms(
    terms: dict[Monomial, Fraction],
    basis: list[tuple[Monomial, Fraction, dict[Monomial, Fraction]]],
    order: OrderKey,
) -> dict[Monomial, Fraction]:
    """Full reduction of ``terms`` by ``basis`` entries (lead mono, lead coeff, terms)."""
    p = dict(terms)
    rem: dict[Monomial, Fraction] = {}
    while p:
        m = max(p, key=order)
        c = p[m]
        for lm, lc, g in basis:
            if monomial_divides(lm, m):
                shift = tuple(a - b for a, b in zip(m, lm))
                f = c / lc
                for gm, gc in g.items():
                    t = tuple(a + b for a, b in zip(gm, shift))
                    v = p.get(t, 0) - f * gc
                    if v:
                        p[t] = v
                    else:
                        p.pop(t, None)
                break
        else:
            rem[m] = c
            del p[m]
    return rem


def _entry(terms: dict[Monomial, Fraction], order: OrderKey):
    lm = _lead(terms, order)
    lc = terms[lm]
    return (lm, Fraction(1), {m: c / lc for m, c in terms.items()})


def _is_monomial_input(polys: list[Poly]) -> bool:
    return all(len(p.terms) == 1 for p in polys)


def _monomial_basis(polys: list[Poly], order: OrderKey) -> list[Poly]:
    monos = sorted({next(iter(p.terms)) for p in polys}, key=order)
    kept: list[Monomial] = []
    for m in monos:
        if not any(monomial_divides(k, m) for k in kept):
            kept.append(m)
    ctx = polys[0].ctx
    return [Poly.monomial(ctx, m) for m in sorted(kept, key=order, reverse=True)]


def groebner(polys: list[Poly], order: OrderKey = degrevlex) -> list[Poly]:
    """Reduced monic Groebner basis; ``[]`` for the zero ideal, ``[1]`` for the unit ideal."""
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return []
    ctx = polys[0].ctx
    if any(p.is_constant() for p in polys):
        return [Poly.const(ctx, 1)]
    if _is_monomial_input(polys):
        return _monomial_basis(polys, order)

    G: list[tuple[Monomial, Fraction, dict[Monomial, Fraction]]] = []
    pairs: set[tuple[int, int]] = set()
    active: list[bool] = []

    def update(h):
        nonlocal pairs
        lmh = h[0]
        k = len(G)
        # chain criterion on existing pairs
        kept = set()
        for i, j in pairs:
            lij = monomial_lcm(G[i][0], G[j][0])
            if (
                monomial_divides(lmh, lij)
                and lij != monomial_lcm(G[i][0], lmh)
                and lij != monomial_lcm(G[j][0], lmh)
            ):
                continue
            kept.add((i, j))
        # new pairs, minimal lcms only, product criterion
        by_lcm: dict[Monomial, list[int]] = {}
        for i in range(k):
            if active[i]:
                by_lcm.setdefault(monomial_lcm(G[i][0], lmh), []).append(i)
        minimal = []
        for L in sorted(by_lcm, key=order):
            if not any(monomial_divides(M, L) for M in minimal):
                minimal.append(L)
        for L in minimal:
            idx = by_lcm[L]
            coprime = any(
                all(a + b == c for a, b, c in zip(G[i][0], lmh, L)) for i in idx
            )
            if not coprime:
                kept.add((min(idx), k))
        for i in range(k):
            if active[i] and monomial_divides(lmh, G[i][0]):
                active[i] = False
        pairs = kept
        G.append(h)
        active.append(True)

    start = sorted((dict(p.terms) for p in polys), key=lambda t: order(_lead(t, order)))
    for t in start:
        basis = [G[i] for i in range(len(G)) if active[i]]
        r = reduce_terms(t, basis, order)
        if r:
            if len(r) == 1 and not any(next(iter(r))):
                return [Poly.const(ctx, 1)]
            update(_entry(r, order))

    while pairs:
        i, j = min(
            pairs,
            key=lambda ij: (order(monomial_lcm(G[ij[0]][0], G[ij[1]][0])), ij),
        )
        pairs.discard((i, j))
        lmi, _, gi = G[i]
        lmj, _, gj = G[j]
        L = monomial_lcm(lmi, lmj)
        si = tuple(a - b for a, b in zip(L, lmi))
        sj = tuple(a - b for a, b in zip(L, lmj))
        s: dict[Monomial, Fraction] = {}
        for m, c in gi.items():
            s[tuple(a + b for a, b in zip(m, si))] = c
        for m, c in gj.items():
            t = tuple(a + b for a, b in zip(m, sj))
            v = s.get(t, 0) - c
            if v:
                s[t] = v
            else:
                s.pop(t, None)
        if not s:
            continue
        basis = [G[k] for k in range(len(G)) if active[k]]
        r = reduce_terms(s, basis, order)
        if r:
            if len(r) == 1 and not any(next(iter(r))):
                return [Poly.const(ctx, 1)]
            update(_entry(r, order))

    # minimal then interreduced
    live = [G[k] for k in range(len(G)) if active[k]]
    live.sort(key=lambda e: order(e[0]))
    minimal = []
    for e in live:
        if not any(monomial_divides(f[0], e[0]) for f in minimal):
            minimal.append(e)
    reduced = []
    for idx, e in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1 :]
        r = reduce_terms(e[2], others, order)
        reduced.append(_entry(r, order))
    reduced.sort(key=lambda e: order(e[0]), reverse=True)
    return [Poly._raw(ctx, e[2]) for e in reduced]


def normal_form(p: Poly, gb: list[Poly], order: OrderKey = degrevlex) -> Poly:
    basis = [_entry(dict(g.terms), order) for g in gb if not g.is_zero()]
    return Poly._raw(p.ctx, reduce_terms(dict(p.terms), basis, order))
