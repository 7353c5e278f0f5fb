"""Resolution driver, principalization, embedded resolution and Hironaka's trick."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable

from .algebra import Ideal, Poly, VarContext, dimension, locus_contains, locus_empty, max_order
from .basic_object import (
    BasicObject,
    ChartState,
    ClosedSet,
    pullback,
    sing,
    transform_with_maps,
)
from .charts import SubstitutionMap
from .invariants import InvariantValue, g_assemble

log = logging.getLogger(__name__)

DEFAULT_MAX_STEPS = 64


class StepLimitExceeded(RuntimeError):
    """The driver needed more blow-ups than allowed; ``tree`` holds the partial transcript."""

    def __init__(self, message: str, tree: ResolutionTree | None = None):
        super().__init__(message)
        self.tree = tree


class AlreadyResolved(ValueError):
    """The singular locus is empty before any blow-up."""


@dataclass
class TreeNode:
    id: int
    parent: int | None
    step: int
    obj: BasicObject
    value: InvariantValue | None = None
    center: ClosedSet | None = None
    substs: dict[str, tuple[str, SubstitutionMap]] = field(default_factory=dict)
    frames: list = field(default_factory=list)
    phase: str = "resolve"
    stopped_at: InvariantValue | None = None  # value of the center that was not blown up

    @property
    def terminal(self) -> bool:
        return self.center is None


@dataclass
class ResolutionTree:
    """Transcript of a run: one node per intermediate object, centers on the edges."""

    nodes: list[TreeNode] = field(default_factory=list)
    terminal: bool = False
    J0: Ideal | None = None
    kind: str = "resolve"

    @property
    def root(self) -> TreeNode:
        return self.nodes[0]

    @property
    def final(self) -> BasicObject:
        return self.nodes[-1].obj

    @property
    def steps(self) -> int:
        return sum(1 for n in self.nodes if n.center is not None)

    @property
    def control(self) -> int:
        return self.nodes[0].obj.b

    def edges(self) -> list[TreeNode]:
        return [n for n in self.nodes if n.center is not None]

    def values(self) -> list[InvariantValue]:
        return [n.value for n in self.edges()]

    def phases(self) -> list[str]:
        out = []
        for n in self.nodes:
            if n.phase not in out:
                out.append(n.phase)
        return out

    def _append(self, obj: BasicObject, phase: str) -> TreeNode:
        parent = self.nodes[-1].id if self.nodes else None
        node = TreeNode(len(self.nodes), parent, obj.step, obj, phase=phase)
        self.nodes.append(node)
        return node


def is_resolved(B: BasicObject) -> bool:
    return sing(B).is_empty(B)


def resolve(
    B: BasicObject,
    max_steps: int = DEFAULT_MAX_STEPS,
    tree: ResolutionTree | None = None,
    phase: str = "resolve",
    on_step: Callable[[TreeNode], None] | None = None,
    stop: Callable[[BasicObject, ClosedSet], bool] | None = None,
) -> ResolutionTree:
    """Blow up the maximal locus of g until Sing(J, b) is empty.

    ``stop(B, center)`` may end the run early, before the chosen center is
    blown up; the node then stays terminal.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be positive")
    fresh = tree is None
    if fresh:
        tree = ResolutionTree(kind=phase)
        if is_resolved(B):
            raise AlreadyResolved("Sing(J, b) is already empty")
    budget = max_steps - tree.steps
    taken = 0
    while True:
        node = tree._append(B, phase)
        if is_resolved(B):
            break
        if taken >= budget:
            raise StepLimitExceeded(f"more than {max_steps} blow-ups needed", tree)
        asm = g_assemble(B)
        if stop is not None and stop(B, asm.center):
            node.stopped_at = asm.value
            break
        node.value = asm.value
        node.center = asm.center
        node.frames = asm.frames
        log.debug("step %d: %s", B.step, asm.value)
        B, maps = transform_with_maps(B, asm.center, word=asm.value.word, value=asm.value)
        node.substs = maps
        taken += 1
        if on_step is not None:
            on_step(node)
    return tree


def _finish(tree: ResolutionTree) -> ResolutionTree:
    tree.terminal = True
    return tree


def resolve_ideal(ctx: VarContext, J: Ideal, b: int, divisors: Iterable[tuple[str, str]] = (), **kw) -> ResolutionTree:
    B = BasicObject.from_ideal(ctx, J, b, divisors)
    tree = ResolutionTree(J0=J, kind="resolve")
    if is_resolved(B):
        raise AlreadyResolved("Sing(J, b) is already empty")
    return _finish(resolve(B, tree=tree, **kw))


def principalize(ctx: VarContext, J: Ideal, E: Iterable[tuple[str, str]] = (), max_steps: int = DEFAULT_MAX_STEPS, on_step=None) -> ResolutionTree:
    """Resolve (J, 1): the total transform becomes an exceptional monomial."""
    if J.is_zero() or J.is_unit():
        raise ValueError("principalization needs a proper nonzero ideal")
    B = BasicObject.from_ideal(ctx, J, 1, E)
    tree = ResolutionTree(J0=J, kind="principalize")
    return _finish(resolve(B, max_steps, tree, "principalize", on_step))


def _max_strict_order(B: BasicObject) -> int:
    best = 0
    for s in B.states:
        f = Ideal(s.chart.ctx, [s.strict])
        if locus_empty(f, None, s.inverted):
            continue
        best = max(best, int(max_order(f, None, None, s.inverted)))
    return best


def _restart(B: BasicObject, b: int) -> BasicObject:
    states = []
    for s in B.states:
        chart = s.chart.with_records(r.with_a(0) for r in s.chart.exceptionals)
        states.append(ChartState(chart, Ideal(chart.ctx, [s.strict]).reduced(), s.strict))
    return BasicObject(tuple(states), b, step=B.step, start=B.step, history=())


def _strict_transform_reached(B: BasicObject, center: ClosedSet) -> bool:
    """The chosen center consists of components of the strict transform (codimension one)."""
    for s in B.states:
        comps = center.components(s) if not center.is_empty_on(s) else []
        for P in comps:
            if dimension(P) != B.dim - 1 or s.strict is None or s.strict not in P:
                return False
    return True


def embedded_resolve(
    ctx: VarContext,
    f: Poly,
    E: Iterable[tuple[str, str]] = (),
    max_steps: int = DEFAULT_MAX_STEPS,
    on_step=None,
    finishing: str = "strict",
) -> ResolutionTree:
    """Embedded resolution of V(f): lower the maximal order of the strict transform, then separate it from E.

    The finishing pass stops as soon as the center it would blow up is the
    strict transform itself: from then on the strict transform is smooth and
    has normal crossings with the exceptional divisors.

    ``finishing`` selects the last pass: ``"strict"`` principalizes the strict
    transform itself, ``"product"`` the product of the strict transform with
    the exceptional equations.
    """
    from .verify import check_snc

    if f.is_constant():
        raise ValueError("f must be nonconstant")
    tree = ResolutionTree(J0=Ideal(ctx, [f]), kind="embedded")
    B = BasicObject.from_ideal(ctx, Ideal(ctx, [f]), 1, E, strict=f)
    while True:
        b = _max_strict_order(B)
        if b <= 1:
            break
        B = _restart(B, b)
        tree = resolve(B, max_steps, tree, f"order-{b}", on_step)
        B = tree.final
        tree.nodes.pop()  # the terminal node of a pass is the root of the next
    charts = [s.chart for s in B.states]
    extra = [[s.strict] for s in B.states]
    if not check_snc(charts, extra).passed:
        B = _restart(B, 1)
        if finishing == "product":
            states = []
            for s in B.states:
                g = s.strict
                for r in s.chart.exceptionals:
                    g = g * Poly.var(s.chart.ctx, r.var)
                states.append(ChartState(s.chart, Ideal(s.chart.ctx, [g]).reduced(), s.strict))
            B = replace(B, states=tuple(states))
        tree = resolve(B, max_steps, tree, "finish", on_step, stop=_strict_transform_reached)
    else:
        tree._append(B, "final")
    return _finish(tree)


@dataclass
class TrickStep:
    step: int
    kind: str  # "point" or "hypersurface"
    a: int
    expected: int


def hironaka_trick(bprime: int, b: int, N: int) -> tuple[int, list[TrickStep]]:
    """Point blow-ups along a line over ``(<x^b'>, b)``, then hypersurface blow-ups while permissible.

    Returns the number S of hypersurface blow-ups and a transcript in which the
    exponent of the last exceptional divisor is checked against
    (N-1)(b'-b) - S b at each step.
    """
    if not (bprime >= b >= 1 and N >= 2):
        raise ValueError("need b' >= b >= 1 and N >= 2")
    ctx = VarContext(("x",))
    x = Poly.var(ctx, "x")
    B = BasicObject.from_ideal(ctx, Ideal(ctx, [x**bprime]), b)
    B = pullback(B, "line")
    t = B.ctx.names[-1]
    big = B.ctx
    steps: list[TrickStep] = []
    for i in range(1, N):
        state = B.states[0]
        center = ClosedSet({state.id: Ideal.of_vars(big, ["x", t])})
        B, _ = transform_with_maps(B, center)
        # stay at the point x_i = L_i cap H_i: the chart where the line V(x) survives
        B = replace(B, states=tuple(s for s in B.states if s.chart.provenance.tag == t))
        rec = B.states[0].chart.record(t)
        expected = i * (bprime - b)
        steps.append(TrickStep(B.step, "point", rec.a_num, expected))
        if rec.a_num != expected:
            raise AssertionError(f"exponent {rec.a_num} != {expected} after {i} point blow-ups")
    S = 0
    while True:
        state = B.states[0]
        H = Ideal.of_vars(big, [t])
        if not locus_contains(sing(B).ideals[state.id], H, state.inverted):
            break
        B, _ = transform_with_maps(B, ClosedSet({state.id: H}))
        S += 1
        rec = B.states[0].chart.record(t)
        expected = (N - 1) * (bprime - b) - S * b
        steps.append(TrickStep(B.step, "hypersurface", rec.a_num, expected))
        if rec.a_num != expected:
            raise AssertionError(f"exponent {rec.a_num} != {expected} after {S} hypersurface blow-ups")
    return S, steps


def trick_bound(bprime: int, b: int, N: int) -> int:
    """floor((N-1)(b'/b - 1))."""
    return int((N - 1) * (Fraction(bprime, b) - 1) // 1)


__all__ = [
    "AlreadyResolved",
    "DEFAULT_MAX_STEPS",
    "ResolutionTree",
    "StepLimitExceeded",
    "TreeNode",
    "TrickStep",
    "embedded_resolve",
    "hironaka_trick",
    "is_resolved",
    "principalize",
    "resolve",
    "resolve_ideal",
    "trick_bound",
]
