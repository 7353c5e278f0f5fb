"""Independent certificates for finished runs.

Everything here is recomputed from raw ideals (the chart data, the root
maps, the input ideal); nothing is read back from the invariant machinery
except the values and centers that are being checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Sequence

from .algebra import (
    Ideal,
    Poly,
    VarContext,
    delta_power,
    locus_empty,
    max_order,
    order_at_point,
    same_locus,
    var_power,
)
from .algebra.decompose import components_of, factor, jacobian_minors
from .basic_object import BasicObject, pullback, sing
from .charts import Chart


@dataclass
class Certificate:
    """Outcome of one check; it passes iff no witness was recorded."""

    kind: str
    witnesses: list[tuple[str, str, str]] = field(default_factory=list)
    report: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.witnesses

    def fail(self, chart_id: str, where, message: str) -> None:
        if isinstance(where, Ideal):
            where = ", ".join(where.to_strs())
        self.witnesses.append((chart_id, str(where), message))

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "pass": self.passed,
            "witnesses": [{"chart": c, "where": w, "message": m} for c, w, m in self.witnesses],
        }

    def __str__(self) -> str:
        head = f"{self.kind}: {'pass' if self.passed else 'FAIL'}"
        return "\n".join([head] + [f"  {c}: {w}: {m}" for c, w, m in self.witnesses])


# ---------------------------------------------------------------------------
# normal crossings


def _irreducible_factors(p: Poly) -> list[Poly]:
    return [f.primitive() for f, _ in factor(p) if not f.is_constant()]


def _crossing_failures(polys: Sequence[Poly], ambient_dim: int, inverted: Poly | None, base: Ideal | None = None):
    """Subsets of ``polys`` whose common zero set (inside V(base)) is not a transversal intersection."""
    if not polys:
        return []
    ctx = polys[0].ctx
    out = []
    base_gens = [] if base is None else list(base.gens)
    codim_base = 0
    if base is not None:
        codim_base = len(ctx) - _dimension(base)
    for size in range(1, len(polys) + 1):
        for S in combinations(polys, size):
            I = Ideal(ctx, base_gens + list(S))
            if locus_empty(I, None, inverted):
                continue
            r = codim_base + size
            if r > ambient_dim:
                out.append((S, I, "too many divisors through a point"))
                continue
            minors = jacobian_minors(base_gens + list(S), r, ctx.names)
            if not locus_empty(I.add_polys(minors), None, inverted):
                out.append((S, I, "Jacobian rank drops"))
    return out


def _dimension(I: Ideal) -> int:
    from .algebra import dimension

    return dimension(I)


def check_snc(charts: Sequence[Chart], extra=None) -> Certificate:
    """Exceptional coordinate divisors plus ``extra`` hypersurfaces have simple normal crossings.

    ``extra`` is either a list of polynomials used on every chart or a list of
    such lists aligned with ``charts``.
    """
    cert = Certificate("snc")
    extra = list(extra or [])
    aligned = bool(extra) and isinstance(extra[0], (list, tuple))
    for i, chart in enumerate(charts):
        ctx = chart.ctx
        mine = extra[i] if aligned else extra
        polys: list[Poly] = [Poly.var(ctx, v) for v in chart.exceptional_vars]
        for p in mine:
            if isinstance(p, Ideal):
                if len(p.gens) != 1:
                    raise ValueError("divisors must be principal")
                p = p.gens[0]
            if p is None or p.is_constant():
                continue
            for f in _irreducible_factors(p):
                if f not in polys:
                    polys.append(f)
        for S, I, msg in _crossing_failures(polys, len(ctx), chart.inverted):
            cert.fail(chart.id, I, f"{msg} ({', '.join(p.to_str() for p in S)})")
    return cert


# ---------------------------------------------------------------------------
# final monomial


def check_monomial_final(B: BasicObject, J0: Ideal) -> Certificate:
    """The total transform of ``J0`` is an exceptional monomial times a unit on every chart.

    The report maps chart ids to {exceptional variable: exponent}.
    """
    if not sing(B).is_empty(B):
        raise ValueError("object is not resolved")
    cert = Certificate("monomial_final")
    for s in B.states:
        chart = s.chart
        ctx = chart.ctx
        total = chart.root_map.apply_ideal(J0.to_context(chart.root_map.source)).reduced()
        exps = {}
        mono = [0] * len(ctx)
        for v in chart.exceptional_vars:
            e = var_power(total, v)
            exps[v] = int(e)
            mono[ctx.index(v)] = int(e)
        residual = Ideal(ctx, [g.divide_monomial(tuple(mono)) for g in total.gens])
        if not locus_empty(residual, None, chart.inverted):
            cert.fail(chart.id, residual, "residual factor is not a unit")
        cert.report[chart.id] = exps
    return cert


# ---------------------------------------------------------------------------
# replays


def _run(ctx, J, b, E=(), max_steps=64):
    from .resolver import AlreadyResolved, resolve_ideal

    try:
        return resolve_ideal(ctx, J, b, E, max_steps=max_steps)
    except AlreadyResolved:
        return None


def check_weak_equiv_scaling(ctx: VarContext, J: Ideal, b: int, k: int, max_steps: int = 64) -> Certificate:
    """(J, b) and (J^k, k b) are resolved by the same centers; Sing agrees at every node."""
    if k < 1:
        raise ValueError("k must be positive")
    cert = Certificate(f"scaling k={k}")
    base = _run(ctx, J, b, max_steps=max_steps)
    if k == 1:
        return cert
    scaled = _run(ctx, J.power(k), k * b, max_steps=max_steps)
    if base is None or scaled is None:
        if (base is None) != (scaled is None):
            cert.fail("-", J, "only one of the two objects is already resolved")
        return cert
    if len(base.nodes) != len(scaled.nodes):
        cert.fail("-", J, f"step counts differ: {base.steps} vs {scaled.steps}")
    for n1, n2 in zip(base.nodes, scaled.nodes):
        ids1 = [s.id for s in n1.obj.states]
        ids2 = [s.id for s in n2.obj.states]
        if ids1 != ids2:
            cert.fail(f"node {n1.id}", J, "chart lists differ")
            continue
        for s1, s2 in zip(n1.obj.states, n2.obj.states):
            S1 = delta_power(s1.J, b - 1)
            S2 = delta_power(s2.J, k * b - 1)
            if not same_locus(S1, S2, s1.inverted):
                cert.fail(s1.id, S1, f"Sing differs at node {n1.id}")
        c1 = None if n1.center is None else n1.center.to_strs()
        c2 = None if n2.center is None else n2.center.to_strs()
        if c1 != c2:
            cert.fail(f"node {n1.id}", str(c1), f"centers differ: {c2}")
        if (n1.value is None) != (n2.value is None) or (n1.value is not None and n1.value != n2.value):
            cert.fail(f"node {n1.id}", str(n1.value), f"values differ: {n2.value}")
    cert.report["steps"] = (base.steps, scaled.steps)
    return cert


def check_pullback_compat(ctx: VarContext, J: Ideal, b: int, max_steps: int = 64) -> Certificate:
    """Resolving the product with a line blows up cylinders over the base centers, with equal values."""
    from .resolver import AlreadyResolved, resolve

    cert = Certificate("pullback")
    base = _run(ctx, J, b, max_steps=max_steps)
    if base is None:
        return cert
    P = pullback(base.root.obj, "line")
    big = P.ctx
    try:
        lifted = resolve(P, max_steps)
    except AlreadyResolved:
        cert.fail("-", J, "pull-back is resolved but the base is not")
        return cert
    if base.steps != lifted.steps:
        cert.fail("-", J, f"step counts differ: {base.steps} vs {lifted.steps}")
    for n1, n2 in zip(base.edges(), lifted.edges()):
        c1 = {cid: I.to_context(big).reduced() for cid, I in n1.center.ideals.items()}
        c2 = {cid: I.reduced() for cid, I in n2.center.ideals.items()}
        if sorted(c1) != sorted(c2):
            cert.fail(f"node {n1.id}", str(sorted(c2)), "center charts differ")
            continue
        for cid in c1:
            inv = n2.obj.state(cid).inverted
            if not same_locus(c1[cid], c2[cid], inv):
                cert.fail(cid, c2[cid], f"center is not the cylinder over {c1[cid].to_strs()}")
        if n1.value.stripped() != n2.value.stripped():
            cert.fail(f"node {n1.id}", str(n2.value), f"value differs from base value {n1.value}")
    return cert


# ---------------------------------------------------------------------------
# invariant suite


def _grid_points(ctx: VarContext, values: Iterable[int] = (-1, 0, 1, 2)):
    vals = [Fraction(v) for v in values]
    for pt in product(vals, repeat=len(ctx)):
        yield dict(zip(ctx.names, pt))


def _factored_bar(J: Ideal, records) -> tuple[Ideal, dict[str, int]]:
    ctx = J.ctx
    mono = [0] * len(ctx)
    exps = {}
    for r in records:
        e = int(var_power(J, r.var))
        exps[r.var] = e
        mono[ctx.index(r.var)] = e
    return Ideal(ctx, [g.divide_monomial(tuple(mono)) for g in J.gens]), exps


def _max_word(B: BasicObject):
    """(W, {chart: Max w-ord ideal}) from raw data; W = None when Sing is empty."""
    best, loci = None, {}
    for s in B.states:
        S = delta_power(s.J, B.b - 1)
        if locus_empty(S, None, s.inverted):
            continue
        recs = [r for r in s.chart.exceptionals if r.birth > B.start]
        bar, _ = _factored_bar(s.J, recs)
        mu = int(max_order(bar, None, S, s.inverted))
        W = Fraction(mu, B.b)
        locus = S if mu == 0 else delta_power(bar, mu - 1) + S
        if best is None or W > best:
            best, loci = W, {s.id: locus}
        elif W == best:
            loci[s.id] = locus
    return best, loci


def _max_count(B: BasicObject, loci: dict, s0: int) -> int:
    q = 0
    for s in B.states:
        if s.id not in loci:
            continue
        olds = [r.var for r in s.chart.exceptionals if r.birth <= s0]
        for size in range(len(olds), q, -1):
            if any(
                not locus_empty(Ideal.of_vars(s.chart.ctx, F), loci[s.id], s.inverted) for F in combinations(olds, size)
            ):
                q = size
                break
    return q


def _center_nc(cert: Certificate, state, P: Ideal, node_id: int) -> None:
    from .algebra.decompose import prime_is_smooth

    ctx = state.chart.ctx
    if not prime_is_smooth(P, state.inverted):
        cert.fail(state.id, P, f"center component is singular (node {node_id})")
        return
    outside = [Poly.var(ctx, v) for v in state.chart.exceptional_vars if Poly.var(ctx, v) not in P]
    for S, I, msg in _crossing_failures(outside, len(ctx), state.inverted, base=P):
        cert.fail(state.id, I, f"center not normal crossing with E: {msg} (node {node_id})")


def check_invariants(tree, sample_values: Iterable[int] = (-1, 0, 1, 2)) -> Certificate:
    """Ledger maximality, satellite identity, weak decrease, center nc, descent loci, on every node."""
    cert = Certificate("invariants")
    sample_values = tuple(sample_values)
    counts = {"nodes": 0, "points": 0, "frames": 0, "centers": 0}
    prev_phase, prev = None, None
    word_series: list[Fraction] = []
    phase_start = 0
    for node in tree.nodes:
        B = node.obj
        counts["nodes"] += 1
        # ledger maximality and satellite identity
        for s in B.states:
            recs = [r for r in s.chart.exceptionals if r.birth > B.start]
            for r in recs:
                e = var_power(s.J, r.var)
                if e != r.a_num:
                    cert.fail(s.id, r.var, f"ledger says {r.a_num}, highest power dividing J is {e} (node {node.id})")
            if node.center is None:
                continue
            S = delta_power(s.J, B.b - 1)
            if locus_empty(S, None, s.inverted):
                continue
            bar, _ = _factored_bar(s.J, recs)
            for pt in _grid_points(s.chart.ctx, sample_values):
                if s.inverted is not None and s.inverted.evaluate(pt) == 0:
                    continue
                if any(g.evaluate(pt) != 0 for g in S.gens):
                    continue
                counts["points"] += 1
                nu = order_at_point(s.J, pt)
                nubar = order_at_point(bar, pt)
                through = sum(r.a_num for r in recs if pt[r.var] == 0)
                if Fraction(nubar, B.b) != Fraction(nu, B.b) - Fraction(through, B.b):
                    cert.fail(s.id, pt, f"w-ord {nubar}/{B.b} != ord {nu}/{B.b} - {through}/{B.b} (node {node.id})")
        if node.center is None:
            continue
        # weak decrease of max w-ord and max t inside a phase
        W, loci = _max_word(B)
        if node.phase != prev_phase:
            prev_phase, prev = node.phase, None
            word_series = []
            phase_start = B.step
        word_series.append(W)
        top = node.value.components[0]
        if W is not None and W > 0:
            # s0: first step since which max w-ord has been W
            k = len(word_series) - 1
            while k > 0 and word_series[k - 1] == W:
                k -= 1
            s0 = phase_start + k
            q = _max_count(B, loci, s0)
            t = (W, q)
            if top.kind != "QZ" or (top.q, top.n) != t:
                cert.fail(f"node {node.id}", str(node.value), f"recomputed t = {t[0]},{t[1]}")
        else:
            t = None
            if top.kind != "GAMMA":
                cert.fail(f"node {node.id}", str(node.value), "expected the monomial case")
        if prev is not None:
            pW, pt_ = prev
            if W is not None and pW is not None and W > pW:
                cert.fail(f"node {node.id}", str(W), f"max w-ord increased from {pW}")
            if t is not None and pt_ is not None and W == pW and t > pt_:
                cert.fail(f"node {node.id}", str(t), f"max t increased from {pt_}")
        prev = (W, t)
        # centers: smooth, normal crossings with E, inside Sing
        for s in B.states:
            I = node.center.ideals.get(s.id)
            if I is None or locus_empty(I, None, s.inverted):
                continue
            S = delta_power(s.J, B.b - 1)
            for P in components_of(I, s.inverted):
                counts["centers"] += 1
                if not locus_empty(S, None, s.inverted) and not _inside(P, S, s.inverted):
                    cert.fail(s.id, P, f"center component not inside Sing (node {node.id})")
                _center_nc(cert, s, P, node.id)
        # descent frames
        for fr in node.frames:
            if fr.lower is None or fr.parent is None or fr.bwd is None:
                continue
            counts["frames"] += 1
            lo, up = fr.lower, fr.parent
            lower_sing = delta_power(lo.J, lo.b - 1, lo.ambient) + Ideal.of_vars(lo.ctx, lo.contact)
            upper_sing = delta_power(fr.D, fr.e - 1, up.ambient) + Ideal.of_vars(up.ctx, up.contact)
            if not same_locus(fr.bwd.apply_ideal(lower_sing), upper_sing, up.inverted):
                cert.fail(fr.chart_id, lower_sing, f"Sing(C, {lo.b}) != Sing(D, {fr.e}) (node {node.id}, var {fr.var})")
    cert.report.update(counts)
    return cert


def _inside(P: Ideal, S: Ideal, inverted) -> bool:
    from .algebra import locus_contains

    return locus_contains(S, P, inverted)


__all__ = [
    "Certificate",
    "check_invariants",
    "check_monomial_final",
    "check_pullback_compat",
    "check_snc",
    "check_weak_equiv_scaling",
]
