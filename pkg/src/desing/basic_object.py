"""Basic objects (W, (J, b), E) covered by affine charts, and their transforms."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping

from .algebra import (
    Ideal,
    Poly,
    VarContext,
    components_of,
    delta_power,
    locus_contains,
    locus_empty,
    order_along,
    var_power,
)
from .algebra.decompose import prime_is_smooth
from .charts import (
    Chart,
    ExceptionalRecord,
    NeedsLocalization,
    SubstitutionMap,
    blowup,
    localize,
    normalize_center,
    product_with_line,
    recoordinate,
)


class NotPermissible(Exception):
    """The proposed center is not smooth, not inside Sing, or of non-constant order."""


class DivisionFailed(AssertionError):
    """The exceptional factor predicted by theory does not divide the transform."""


@dataclass(frozen=True)
class ChartState:
    """J on one chart; ``strict`` optionally tracks a hypersurface's strict transform."""

    chart: Chart
    J: Ideal
    strict: Poly | None = None

    def __post_init__(self):
        if self.J.ctx != self.chart.ctx:
            raise ValueError("ideal and chart contexts differ")
        if self.J.is_zero():
            raise ValueError("J must be nonzero")

    @property
    def id(self) -> str:
        return self.chart.id

    @property
    def inverted(self) -> Poly | None:
        return self.chart.inverted


@dataclass(frozen=True)
class HistoryEntry:
    """Value recorded when the center of ``step`` was chosen."""

    step: int
    word: Fraction | None
    value: object = None  # InvariantValue; typed loosely to avoid an import cycle


@dataclass(frozen=True)
class BasicObject:
    """A basic object: chart states, control ``b``, step counter and history.

    ``start`` is the step at which this object's resolution began; divisors
    born at or before it are the initial divisors E_0.
    """

    states: tuple[ChartState, ...]
    b: int
    step: int = 0
    start: int = 0
    history: tuple[HistoryEntry, ...] = ()
    partition_snapshot: frozenset[int] | None = None

    def __post_init__(self):
        if self.b < 1:
            raise ValueError("control must be positive")

    @classmethod
    def from_ideal(
        cls, ctx: VarContext, J: Ideal, b: int, divisors: Iterable[tuple[str, str]] = (), strict: Poly | None = None
    ) -> BasicObject:
        chart = Chart.root(ctx, divisors)
        return cls((ChartState(chart, J.reduced(), strict),), b)

    @property
    def ctx(self) -> VarContext:
        return self.states[0].chart.ctx

    @property
    def dim(self) -> int:
        return len(self.ctx)

    def state(self, chart_id: str) -> ChartState:
        for s in self.states:
            if s.id == chart_id:
                return s
        raise KeyError(chart_id)

    def factored(self, rec: ExceptionalRecord) -> bool:
        """Divisors created during this object's own resolution carry a factored exponent."""
        return rec.birth > self.start


@dataclass(frozen=True)
class ClosedSet:
    """Closed subset given per chart by a defining ideal (compared up to radical)."""

    ideals: Mapping[str, Ideal] = field(default_factory=dict)

    def ideal(self, chart_id: str) -> Ideal | None:
        return self.ideals.get(chart_id)

    def is_empty_on(self, state: ChartState) -> bool:
        I = self.ideals.get(state.id)
        return I is None or locus_empty(I, None, state.inverted)

    def is_empty(self, B: BasicObject) -> bool:
        return all(self.is_empty_on(s) for s in B.states)

    def components(self, state: ChartState) -> list[Ideal]:
        I = self.ideals.get(state.id)
        if I is None or I.is_unit():
            return []
        return components_of(I, state.inverted)

    def to_strs(self) -> dict[str, list[str]]:
        return {k: v.reduced().to_strs() for k, v in sorted(self.ideals.items())}


# ---------------------------------------------------------------------------


def sing_ideal(state: ChartState, b: int) -> Ideal:
    return delta_power(state.J, b - 1)


def sing(B: BasicObject) -> ClosedSet:
    """Per chart, V(Delta^(b-1) J)."""
    return ClosedSet({s.id: sing_ideal(s, B.b) for s in B.states})


def bar_ideal(state: ChartState, factored: Iterable[ExceptionalRecord] | None = None) -> Ideal:
    """J divided by the exceptional monomial of its (factored) ledger entries."""
    recs = [r for r in (state.chart.exceptionals if factored is None else factored) if r.a_num > 0]
    if not recs:
        return state.J
    ctx = state.chart.ctx
    mono = [0] * len(ctx)
    for r in recs:
        mono[ctx.index(r.var)] = r.a_num
    try:
        out = Ideal(ctx, [g.divide_monomial(tuple(mono)) for g in state.J.gens])
    except ArithmeticError as exc:
        raise DivisionFailed(f"ledger does not divide J on {state.id}") from exc
    for r in recs:
        if var_power(out, r.var) != 0:
            raise DivisionFailed(f"ledger entry for {r.var} on {state.id} is not maximal")
    return out


def _divide_var(ideal: Ideal, name: str, k: int) -> Ideal:
    if k == 0:
        return ideal
    ctx = ideal.ctx
    mono = tuple(k if n == name else 0 for n in ctx.names)
    try:
        return Ideal(ctx, [g.divide_monomial(mono) for g in ideal.gens])
    except ArithmeticError as exc:
        raise DivisionFailed(f"{name}^{k} does not divide the total transform") from exc


@dataclass
class _Blown:
    state: ChartState
    subst: SubstitutionMap  # from the original parent chart to this chart


def _check_permissible(state: ChartState, b: int, comps: list[Ideal]) -> None:
    S = sing_ideal(state, b)
    for P in comps:
        if not locus_contains(S, P, state.inverted):
            raise NotPermissible(f"center component {P} not inside Sing on {state.id}")
        if not prime_is_smooth(P, state.inverted):
            raise NotPermissible(f"center component {P} is singular on {state.id}")
    for i, P in enumerate(comps):
        for Q in comps[i + 1 :]:
            if not locus_empty(P, Q, state.inverted):
                raise NotPermissible(f"center components meet on {state.id}")


def _localize_state(state: ChartState, f: Poly, tag: str, drop: tuple[str, ...]) -> tuple[ChartState, SubstitutionMap]:
    chart, m = localize(state.chart, f, tag)
    J = state.J
    for v in drop:
        J = _divide_var(J, v, var_power(J, v))
    if drop:
        chart = chart.with_records(r for r in chart.exceptionals if r.var not in drop)
    return ChartState(chart, J, state.strict), m


def _blow_components(state: ChartState, comps: list[Ideal], b: int, birth: int, acc: SubstitutionMap) -> list[_Blown]:
    comps = [P for P in comps if state.inverted is None or state.inverted not in P]
    if not comps:
        return [_Blown(state, acc)]
    P, rest = comps[0], comps[1:]
    try:
        phi, C = normalize_center(state.chart, P)
    except NeedsLocalization as need:
        out = []
        tag = "".join(need.drop) or "c"
        pieces = [(need.f, f"u{tag}", need.drop)]
        pieces += [(g, f"v{tag}{i}" if len(need.cover) > 1 else f"v{tag}", ()) for i, g in enumerate(need.cover)]
        for f, tag, drop in pieces:
            st, m = _localize_state(state, f, tag, drop)
            out.extend(_blow_components(st, comps, b, birth, acc.then(m)))
        return out
    chart = recoordinate(state.chart, phi)
    J = phi.apply_ideal(state.J).reduced()
    strict = None if state.strict is None else phi.apply(state.strict)
    rest = [phi.apply_ideal(Q) for Q in rest]
    center = Ideal.of_vars(chart.ctx, C)
    nu = order_along(J, center)
    a = nu - b
    if a < 0:
        raise NotPermissible(f"center not inside Sing on {state.id} (order {nu} < {b})")
    out = []
    for child, m in blowup(chart, C, birth):
        k = child.provenance.tag
        total = m.apply_ideal(J)
        if var_power(total, k) != nu:
            raise DivisionFailed(f"exceptional power {var_power(total, k)} != order {nu} on {child.id}")
        J1 = _divide_var(total, k, b).reduced()
        recs = [r.with_a(a) if r.var == k and r.birth == birth else r for r in child.exceptionals]
        child = child.with_records(recs)
        new_strict = None
        if strict is not None:
            s1 = m.apply(strict)
            if len(C) > 1:
                s1 = s1.divide_monomial(tuple(s1.power_of_var(k) if n == k else 0 for n in s1.ctx.names))
            new_strict = s1
        child_rest = []
        for Q in rest:
            child_rest.extend(components_of(m.apply_ideal(Q), child.inverted))
        st = ChartState(child, J1, new_strict)
        out.extend(_blow_components(st, child_rest, b, birth, acc.then(phi).then(m)))
    return out


def transform_with_maps(
    B: BasicObject, center: ClosedSet, word: Fraction | None = None, value=None
) -> tuple[BasicObject, dict[str, tuple[str, SubstitutionMap]]]:
    """Transform along ``center``; also return child chart id -> (parent id, substitution).

    ``word`` is the max w-ord recorded in the history for this step; it may be
    omitted for transformations that are not driven by the resolution function.
    """
    birth = B.step + 1
    new_states: list[ChartState] = []
    maps: dict[str, tuple[str, SubstitutionMap]] = {}
    touched = False
    for s in B.states:
        comps = center.components(s) if not center.is_empty_on(s) else []
        if not comps:
            new_states.append(s)
            continue
        _check_permissible(s, B.b, comps)
        touched = True
        for blown in _blow_components(s, comps, B.b, birth, SubstitutionMap.identity(s.chart.ctx)):
            new_states.append(blown.state)
            maps[blown.state.id] = (s.id, blown.subst)
    if not touched:
        raise NotPermissible("center does not meet any chart")
    ids = [s.id for s in new_states]
    if len(set(ids)) != len(ids):
        raise AssertionError("duplicate chart ids after transform")
    hist = B.history + (HistoryEntry(B.step, None if word is None else Fraction(word), value),)
    return replace(B, states=tuple(new_states), step=B.step + 1, history=hist), maps


def transform(B: BasicObject, center: ClosedSet, word: Fraction | None = None, value=None) -> BasicObject:
    """Blow up ``center``; J_1 = (total transform) / e^b in every new chart."""
    return transform_with_maps(B, center, word, value)[0]


def pullback(B: BasicObject, kind: str, f: Poly | None = None, name: str | None = None) -> BasicObject:
    """Smooth pull-back: ``kind`` is ``"localization"`` (at ``f``) or ``"line"`` (product with A^1)."""
    if kind == "localization":
        if f is None or f.is_zero():
            raise ValueError("localization needs a nonzero polynomial")
        states = []
        for s in B.states:
            chart = replace(s.chart, inverted=(f if s.inverted is None else s.inverted * f).primitive())
            states.append(ChartState(chart, s.J, s.strict))
        return replace(B, states=tuple(states))
    if kind == "line":
        name = name or B.ctx.fresh_name("t")
        states = []
        for s in B.states:
            chart = product_with_line(s.chart, name)
            big = chart.ctx
            states.append(
                ChartState(chart, s.J.to_context(big), None if s.strict is None else s.strict.to_context(big))
            )
        return replace(B, states=tuple(states))
    raise ValueError(f"unknown pull-back kind {kind!r}")


__all__ = [
    "BasicObject",
    "ChartState",
    "ClosedSet",
    "DivisionFailed",
    "HistoryEntry",
    "NotPermissible",
    "bar_ideal",
    "pullback",
    "sing",
    "sing_ideal",
    "transform",
    "transform_with_maps",
]
