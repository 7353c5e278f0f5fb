"""The invariant tower ord, w-ord, t, t(em), the monomial value Gamma and g.

The engine only materializes maximal values and their loci.  All of them are
computed on a :class:`Level`: the top level is the basic object itself; lower
levels are the coefficient objects living on hypersurfaces of maximal contact
(see :mod:`desing.descent`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from itertools import combinations
from typing import Sequence

from .algebra import (
    Ideal,
    Poly,
    delta_power,
    locus_empty,
    max_order,
    var_power,
)
from .algebra.poly import format_rational
from .basic_object import BasicObject, ChartState, ClosedSet, bar_ideal
from .charts import ExceptionalRecord, SubstitutionMap

TOP = "TOP"
QZ = "QZ"
GAMMA = "GAMMA"


class MonomialCaseViolated(AssertionError):
    """Gamma was requested where J-bar is not a unit near Sing."""


_GAMMA_RE = re.compile(r"\((-\d+),(\d+/\d+),\[([\d,]*)\]\)")
_QZ_RE = re.compile(r"(\d+/\d+),(-?\d+)")


def _split_components(text: str) -> list[str]:
    """Split on ';' (Gamma components contain no ';', so a plain split suffices)."""
    return [p.strip() for p in text.split(";")] if text.strip() else []


def _rat(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class GammaValue:
    """(-p, w, alpha): fewest divisors reaching the control, their weight, their births."""

    neg_p: int
    w: Fraction
    alpha: tuple[int, ...]

    def __post_init__(self):
        if -self.neg_p < 1 or len(self.alpha) != -self.neg_p:
            raise ValueError("malformed Gamma value")

    def key(self):
        return (self.neg_p, self.w, self.alpha)

    def serialize(self) -> str:
        return f"({self.neg_p},{_rat(self.w)},[{','.join(map(str, self.alpha))}])"


@total_ordering
@dataclass(frozen=True)
class InvariantComponent:
    kind: str
    q: Fraction | None = None
    n: int | None = None
    gamma: GammaValue | None = None

    @classmethod
    def top(cls) -> InvariantComponent:
        return cls(TOP)

    @classmethod
    def qz(cls, q, n: int) -> InvariantComponent:
        return cls(QZ, Fraction(q), int(n))

    @classmethod
    def gam(cls, g: GammaValue) -> InvariantComponent:
        return cls(GAMMA, gamma=g)

    def key(self):
        if self.kind == TOP:
            return (2,)
        if self.kind == QZ:
            return (1, self.q, self.n)
        return (0,) + self.gamma.key()

    def __lt__(self, other: InvariantComponent) -> bool:
        return self.key() < other.key()

    def serialize(self) -> str:
        if self.kind == TOP:
            return "inf"
        if self.kind == QZ:
            return f"{_rat(self.q)},{self.n}"
        return self.gamma.serialize()


@total_ordering
@dataclass(frozen=True)
class InvariantValue:
    """Element of I_d: lexicographically ordered tuple of components."""

    components: tuple[InvariantComponent, ...]

    def __post_init__(self):
        closed = False
        for c in self.components:
            if closed and c.kind != TOP:
                raise ValueError("only TOP may follow a TOP or GAMMA component")
            if c.kind in (TOP, GAMMA):
                closed = True

    def padded(self, length: int) -> InvariantValue:
        extra = max(0, length - len(self.components))
        return InvariantValue(self.components + (InvariantComponent.top(),) * extra)

    def stripped(self) -> InvariantValue:
        comps = list(self.components)
        while comps and comps[-1].kind == TOP:
            comps.pop()
        return InvariantValue(tuple(comps))

    def key(self):
        return tuple(c.key() for c in self.components)

    def __lt__(self, other: InvariantValue) -> bool:
        n = max(len(self.components), len(other.components))
        return self.padded(n).key() < other.padded(n).key()

    def __eq__(self, other) -> bool:
        if not isinstance(other, InvariantValue):
            return NotImplemented
        n = max(len(self.components), len(other.components))
        return self.padded(n).key() == other.padded(n).key()

    def __hash__(self) -> int:
        return hash(self.stripped().key())

    def serialize(self) -> str:
        return ";".join(c.serialize() for c in self.components)

    @classmethod
    def parse(cls, text: str) -> InvariantValue:
        """Inverse of :meth:`serialize`."""
        comps = []
        for part in _split_components(text):
            if part == "inf":
                comps.append(InvariantComponent.top())
                continue
            m = _GAMMA_RE.fullmatch(part)
            if m:
                alpha = tuple(int(a) for a in m.group(3).split(",")) if m.group(3) else ()
                comps.append(InvariantComponent.gam(GammaValue(int(m.group(1)), Fraction(m.group(2)), alpha)))
                continue
            m = _QZ_RE.fullmatch(part)
            if not m:
                raise ValueError(f"bad invariant component {part!r}")
            comps.append(InvariantComponent.qz(Fraction(m.group(1)), int(m.group(2))))
        return cls(tuple(comps))

    def __str__(self) -> str:
        return self.serialize()

    @property
    def word(self) -> Fraction:
        c = self.components[0]
        return c.q if c.kind == QZ else Fraction(0)

    @property
    def t(self) -> tuple[Fraction, int] | None:
        c = self.components[0]
        return (c.q, c.n) if c.kind == QZ else None


# ---------------------------------------------------------------------------
# levels


@dataclass(eq=False)
class LevelChart:
    """One chart's view of the object at some level of the descent.

    All ideals live in the chart's variable context, written in this level's
    coordinates; ``contact`` lists the coordinates already cut out by previous
    hypersurfaces of maximal contact and ``ambient`` the remaining ones.
    """

    state: ChartState
    ambient: tuple[str, ...]
    contact: tuple[str, ...]
    J: Ideal
    b: int
    eligible: tuple[ExceptionalRecord, ...]
    sigma: int
    to_chart: SubstitutionMap
    inverted: Poly | None
    top: bool = False
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_state(cls, state: ChartState, b: int, start: int) -> LevelChart:
        ctx = state.chart.ctx
        return cls(
            state=state,
            ambient=ctx.names,
            contact=(),
            J=state.J,
            b=b,
            eligible=state.chart.exceptionals,
            sigma=start,
            to_chart=SubstitutionMap.identity(ctx),
            inverted=state.inverted,
            top=True,
        )

    @property
    def id(self) -> str:
        return self.state.id

    @property
    def ctx(self):
        return self.state.chart.ctx

    @property
    def exceptional_vars(self) -> tuple[str, ...]:
        return self.state.chart.exceptional_vars

    def contact_ideal(self) -> Ideal:
        return Ideal.of_vars(self.ctx, self.contact)

    def delta(self, ideal: Ideal, k: int) -> Ideal:
        return delta_power(ideal, k, self.ambient)

    def sing(self) -> Ideal:
        if "sing" not in self._cache:
            self._cache["sing"] = self.delta(self.J, self.b - 1) + self.contact_ideal()
        return self._cache["sing"]

    def sing_empty(self) -> bool:
        if "sing_empty" not in self._cache:
            self._cache["sing_empty"] = locus_empty(self.sing(), None, self.inverted)
        return self._cache["sing_empty"]

    def factored(self) -> list[tuple[ExceptionalRecord, int]]:
        """Divisors born in this level's stage, with their exponents in J."""
        if "factored" not in self._cache:
            out = []
            for r in self.eligible:
                if r.birth <= self.sigma:
                    continue
                a = r.a_num if self.top else var_power(self.J, r.var)
                out.append((r, int(a)))
            self._cache["factored"] = out
        return self._cache["factored"]

    def bar(self) -> Ideal:
        if "bar" not in self._cache:
            if self.top:
                recs = [r for r, _ in self.factored()]
                self._cache["bar"] = bar_ideal(self.state, recs)
            else:
                mono = [0] * len(self.ctx)
                for r, a in self.factored():
                    mono[self.ctx.index(r.var)] = a
                self._cache["bar"] = Ideal(self.ctx, [g.divide_monomial(tuple(mono)) for g in self.J.gens])
        return self._cache["bar"]

    def word(self) -> tuple[int, Ideal]:
        """(mu, Max locus): mu = max order of J-bar on Sing, so max w-ord = mu / b."""
        if "word" not in self._cache:
            S = self.sing()
            bar = self.bar()
            mu = int(max_order(bar, self.ambient, S, self.inverted))
            locus = S if mu == 0 else self.delta(bar, mu - 1) + S
            self._cache["word"] = (mu, locus)
        return self._cache["word"]

    def ord(self) -> tuple[int, Ideal]:
        S = self.sing()
        mu = int(max_order(self.J, self.ambient, S, self.inverted))
        return mu, self.delta(self.J, mu - 1) + S

    def old_divisors(self, s0: int) -> list[ExceptionalRecord]:
        return [r for r in self.eligible if r.birth <= s0]

    def new_divisors(self, s0: int) -> list[ExceptionalRecord]:
        return [r for r in self.eligible if r.birth > s0]


def k_ideal(ctx, records: Sequence[ExceptionalRecord], q: int) -> Ideal:
    """K(q): product over q-subsets F of the sums of the divisor ideals in F."""
    if q == 0:
        return Ideal.unit(ctx)
    out = Ideal.unit(ctx)
    for F in combinations(records, q):
        out = (out * Ideal.of_vars(ctx, [r.var for r in F])).reduced()
    return out


def count_locus(lc: LevelChart, base: Ideal, records: Sequence[ExceptionalRecord]) -> tuple[int, Ideal]:
    """Largest q such that some point of V(base) lies on q of ``records``; and that locus."""
    for q in range(len(records), 0, -1):
        hit = any(
            not locus_empty(Ideal.of_vars(lc.ctx, [r.var for r in F]), base, lc.inverted)
            for F in combinations(records, q)
        )
        if hit:
            return q, base + k_ideal(lc.ctx, records, q)
    return 0, base


def gamma_of(lc: LevelChart) -> tuple[GammaValue, Ideal]:
    """Gamma on one chart (monomial case)."""
    S = lc.sing()
    if not locus_empty(lc.bar(), S, lc.inverted):
        raise MonomialCaseViolated(f"J-bar is not a unit near Sing on {lc.id}")
    fact = [(r, a) for r, a in lc.factored() if a > 0]
    best = None
    loci: list[Ideal] = []
    for size in range(1, len(fact) + 1):
        for sub in combinations(fact, size):
            total = sum(a for _, a in sub)
            if total < lc.b:
                continue
            center = Ideal.of_vars(lc.ctx, [r.var for r, _ in sub]) + lc.contact_ideal()
            if locus_empty(center, S, lc.inverted):
                continue
            val = GammaValue(-size, Fraction(total, lc.b), tuple(sorted((r.birth for r, _ in sub), reverse=True)))
            if best is None or val.key() > best.key():
                best, loci = val, [center]
            elif val.key() == best.key():
                loci.append(center)
        if best is not None:
            break
    if best is None:
        raise MonomialCaseViolated(f"no divisor set reaches the control on {lc.id}")
    locus = loci[0]
    for extra in loci[1:]:
        locus = (locus * extra).reduced()
    return best, locus


# ---------------------------------------------------------------------------
# history


def _level_word(value, depth: int) -> Fraction | None:
    if value is None or len(value.components) <= depth:
        return None
    c = value.components[depth]
    if c.kind == QZ:
        return c.q
    if c.kind == GAMMA:
        return Fraction(0)
    return None


def s0_from_history(history, depth: int, sigma: int, current_step: int, current_word: Fraction) -> int:
    """First step of the current stage at which this level's max w-ord took its present value."""
    s0 = current_step
    for entry in reversed(history):
        if entry.step < sigma:
            break
        w = entry.word if depth == 0 else _level_word(entry.value, depth)
        if w is None or w != current_word:
            break
        s0 = entry.step
    return s0


def stage_start(history, depth: int, prefix: Sequence[InvariantComponent], sigma: int, current_step: int) -> int:
    """Start of the stage of level ``depth``: the parent prefix has been constant since then."""
    start = current_step
    for entry in reversed(history):
        if entry.step < sigma:
            break
        v = entry.value
        if v is None or len(v.components) <= depth:
            break
        if tuple(v.components[:depth]) != tuple(prefix):
            break
        if v.components[depth].kind == TOP:
            break
        start = entry.step
    return start


# ---------------------------------------------------------------------------
# top-level maxima


def _top_level(B: BasicObject) -> list[LevelChart]:
    return [LevelChart.from_state(s, B.b, B.start) for s in B.states]


def _active(lcs: list[LevelChart]) -> list[LevelChart]:
    return [lc for lc in lcs if not lc.sing_empty()]


def ord_max(B: BasicObject) -> tuple[Fraction, ClosedSet]:
    """Max of ord = nu / b on Sing and its locus."""
    lcs = _active(_top_level(B))
    if not lcs:
        raise ValueError("Sing is empty")
    data = {lc.id: lc.ord() for lc in lcs}
    best = max(Fraction(mu, B.b) for mu, _ in data.values())
    return best, ClosedSet({k: I for k, (mu, I) in data.items() if Fraction(mu, B.b) == best})


def word_max(B: BasicObject) -> tuple[Fraction, ClosedSet]:
    """Max of w-ord = nu(J-bar) / b on Sing and its locus."""
    lcs = _active(_top_level(B))
    if not lcs:
        raise ValueError("Sing is empty")
    return _word_max(lcs)


def _word_max(lcs: list[LevelChart]) -> tuple[Fraction, ClosedSet]:
    data = {lc.id: lc.word() for lc in lcs}
    b = lcs[0].b
    best = max(Fraction(mu, b) for mu, _ in data.values())
    return best, ClosedSet({k: I for k, (mu, I) in data.items() if Fraction(mu, b) == best})


def _t_max(lcs: list[LevelChart], s0: int) -> tuple[tuple[Fraction, int], dict[str, Ideal], dict[str, int]]:
    W, maxw = _word_max(lcs)
    counts = {}
    for lc in lcs:
        if lc.id in maxw.ideals:
            counts[lc.id] = count_locus(lc, maxw.ideals[lc.id], lc.old_divisors(s0))
    q = max(c for c, _ in counts.values())
    return (W, q), {k: I for k, (c, I) in counts.items() if c == q}, {k: c for k, (c, _) in counts.items()}


def t_max(B: BasicObject) -> tuple[tuple[Fraction, int], ClosedSet]:
    """Max of t = (w-ord, number of old divisors) and its locus."""
    lcs = _active(_top_level(B))
    if not lcs:
        raise ValueError("Sing is empty")
    W, _ = _word_max(lcs)
    if W == 0:
        raise ValueError("t is only defined when max w-ord is positive")
    s0 = s0_from_history(B.history, 0, B.start, B.step, W)
    t, loci, _ = _t_max(lcs, s0)
    return t, ClosedSet(loci)


def t_em_max(B: BasicObject) -> tuple[tuple[Fraction, int], ClosedSet]:
    """Like :func:`t_max`, but the old divisors are those listed in ``partition_snapshot``."""
    if B.partition_snapshot is None:
        raise ValueError("t(em) needs a partition snapshot")
    lcs = _active(_top_level(B))
    if not lcs:
        raise ValueError("Sing is empty")
    W, maxw = _word_max(lcs)
    counts = {}
    for lc in lcs:
        if lc.id in maxw.ideals:
            olds = [r for r in lc.eligible if r.birth in B.partition_snapshot]
            counts[lc.id] = count_locus(lc, maxw.ideals[lc.id], olds)
    q = max(c for c, _ in counts.values())
    return (W, q), ClosedSet({k: I for k, (c, I) in counts.items() if c == q})


def gamma_max(B: BasicObject) -> tuple[GammaValue, ClosedSet]:
    """Max of Gamma on Sing (monomial case) and its locus."""
    lcs = _active(_top_level(B))
    if not lcs:
        raise ValueError("Sing is empty")
    return _gamma_max(lcs)


def _gamma_max(lcs: list[LevelChart]) -> tuple[GammaValue, ClosedSet]:
    data = {lc.id: gamma_of(lc) for lc in lcs}
    best = max((g for g, _ in data.values()), key=GammaValue.key)
    return best, ClosedSet({k: I for k, (g, I) in data.items() if g.key() == best.key()})


# ---------------------------------------------------------------------------
# assembly


@dataclass
class Assembly:
    value: InvariantValue
    center: ClosedSet
    frames: list = field(default_factory=list)


def _assemble_level(lcs: list[LevelChart], depth: int, sigma: int, history, step: int, prefix: tuple, descent) -> tuple[list, dict, list]:
    lcs = _active(lcs)
    if not lcs:
        raise AssertionError(f"empty singular locus at descent level {depth}")
    W, maxw = _word_max(lcs)
    lcs = [lc for lc in lcs if lc.id in maxw.ideals]
    if W == 0:
        G, loci = _gamma_max(lcs)
        centers = {lc.id: lc.to_chart.apply_ideal(loci.ideals[lc.id]) for lc in lcs if lc.id in loci.ideals}
        return [InvariantComponent.gam(G)], centers, []
    s0 = s0_from_history(history, depth, sigma, step, W)
    (W, q), tloci, _ = _t_max(lcs, s0)
    comp = InvariantComponent.qz(W, q)
    lcs = [lc for lc in lcs if lc.id in tloci]
    r1 = {}
    for lc in lcs:
        comps = descent.r1_of_ideal(tloci[lc.id], len(lc.ambient), lc.inverted)
        if comps:
            r1[lc.id] = (lc, comps)
    if r1:
        centers = {}
        for cid, (lc, comps) in r1.items():
            ideal = comps[0]
            for P in comps[1:]:
                ideal = (ideal * P).reduced()
            centers[cid] = lc.to_chart.apply_ideal(ideal)
        return [comp], centers, []
    child_prefix = prefix + (comp,)
    child_sigma = max(sigma, stage_start(history, depth + 1, child_prefix, sigma, step))
    lowers = []
    frames = []
    terminal = {}
    for lc in lcs:
        frame = descent.descend(lc, tloci[lc.id], s0, q, child_sigma)
        frames.append(frame)
        if frame.lower is None:
            terminal[lc.id] = lc.to_chart.apply_ideal(tloci[lc.id])
        else:
            lowers.append(frame.lower)
    if terminal and not lowers:
        return [comp, InvariantComponent.top()], terminal, frames
    sub, centers, sub_frames = _assemble_level(lowers, depth + 1, child_sigma, history, step, child_prefix, descent)
    return [comp] + sub, centers, frames + sub_frames


def g_assemble(B: BasicObject, descent=None) -> Assembly:
    """Maximal value of the resolution function and the locus where it is attained."""
    if descent is None:
        from . import descent as descent_module

        descent = descent_module
    lcs = _top_level(B)
    comps, centers, frames = _assemble_level(lcs, 0, B.start, B.history, B.step, (), descent)
    value = InvariantValue(tuple(comps)).padded(B.dim + 1)
    return Assembly(value, ClosedSet(centers), frames)


__all__ = [
    "Assembly",
    "GAMMA",
    "GammaValue",
    "InvariantComponent",
    "InvariantValue",
    "LevelChart",
    "MonomialCaseViolated",
    "QZ",
    "TOP",
    "count_locus",
    "g_assemble",
    "gamma_max",
    "gamma_of",
    "k_ideal",
    "ord_max",
    "s0_from_history",
    "stage_start",
    "t_em_max",
    "t_max",
    "word_max",
]
