"""Affine charts, exceptional-divisor bookkeeping and blow-up chart maps.

Every exceptional divisor is a coordinate hyperplane ``V(var)`` of the chart
it lives in.  Blow-ups are only performed along coordinate centers; the
coordinate change that makes a smooth center coordinate is produced by
:func:`normalize_center` and is never allowed to move an exceptional variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping

from .algebra import Ideal, Poly, VarContext, groebner

PLUS = "plus"
MINUS = "minus"


class NotCoordinatizable(Exception):
    """A smooth center that the triangular heuristic cannot turn into coordinates."""


class NeedsLocalization(NotCoordinatizable):
    """The center can only be made coordinate after inverting ``f``.

    ``V(f)`` misses the center.  The chart is split into ``D(f)``, where the
    exceptional records in ``drop`` (divisors contained in ``V(f)``) disappear,
    and the pieces ``D(g)`` for ``g`` in ``cover``, which miss the center and
    together with ``D(f)`` cover the chart.
    """

    def __init__(self, f: Poly, drop: tuple[str, ...] = (), cover: tuple[Poly, ...] = ()):
        super().__init__(f"center needs {f.to_str()} inverted")
        self.f = f
        self.drop = tuple(drop)
        self.cover = tuple(cover)


@dataclass(frozen=True)
class ExceptionalRecord:
    """Exceptional hypersurface ``V(var)``; its exponent is ``a_num / b``."""

    var: str
    birth: int
    sign: str = PLUS
    a_num: int = 0

    def with_a(self, a: int) -> ExceptionalRecord:
        return replace(self, a_num=a)


@dataclass(frozen=True)
class SubstitutionMap:
    """Images of the ``source`` variables as polynomials over ``target``.

    An image may carry a denominator (``dens``) that is a unit on the chart
    where the map is used; :meth:`apply` then clears denominators, which
    changes the result only by a unit.  :meth:`apply_frac` is exact.
    """

    source: VarContext
    target: VarContext
    images: tuple[tuple[str, Poly], ...]
    dens: tuple[Poly, ...] | None = None

    def __post_init__(self):
        names = [n for n, _ in self.images]
        if sorted(names) != sorted(self.source.names):
            raise ValueError("substitution must be total on the source variables")
        for _, p in self.images:
            if p.ctx != self.target:
                raise ValueError("substitution image in the wrong context")
        if self.dens is not None:
            if len(self.dens) != len(self.images):
                raise ValueError("one denominator per image")
            if any(d.is_zero() or d.ctx != self.target for d in self.dens):
                raise ValueError("bad denominator")
            if all(d == Poly.const(self.target, 1) for d in self.dens):
                object.__setattr__(self, "dens", None)

    @classmethod
    def identity(cls, ctx: VarContext, target: VarContext | None = None) -> SubstitutionMap:
        target = target or ctx
        return cls(ctx, target, tuple((n, Poly.var(target, n)) for n in ctx.names))

    @classmethod
    def from_dict(
        cls,
        source: VarContext,
        target: VarContext,
        images: Mapping[str, Poly],
        dens: Mapping[str, Poly] | None = None,
    ) -> SubstitutionMap:
        full = tuple((n, images[n] if n in images else Poly.var(target, n)) for n in source.names)
        one = Poly.const(target, 1)
        d = None if not dens else tuple(dens.get(n, one) for n in source.names)
        return cls(source, target, full, d)

    @property
    def is_polynomial(self) -> bool:
        return self.dens is None

    def as_dict(self) -> dict[str, Poly]:
        return dict(self.images)

    def image(self, name: str) -> Poly:
        """Numerator of the image of ``name``."""
        return self.as_dict()[name]

    def denominator(self, name: str) -> Poly:
        if self.dens is None:
            return Poly.const(self.target, 1)
        return self.dens[self.source.index(name)]

    def apply_frac(self, p: Poly) -> tuple[Poly, Poly]:
        """Exact image as numerator / denominator."""
        if p.ctx != self.source:
            raise ValueError("polynomial does not live on the substitution source")
        if self.dens is None or p.is_zero():
            return p.subs(self.as_dict(), self.target), Poly.const(self.target, 1)
        names = self.source.names
        degs = [p.degree_in(n) for n in names]
        num = Poly.const(self.target, 0)
        cache: dict = {}

        def pw(i, e, which):
            key = (i, e, which)
            if key not in cache:
                base = self.images[i][1] if which == 0 else self.dens[i]
                cache[key] = base**e
            return cache[key]

        for m, c in p.terms.items():
            t = Poly.const(self.target, c)
            for i, e in enumerate(m):
                if e:
                    t = t * pw(i, e, 0)
                if degs[i] - e:
                    t = t * pw(i, degs[i] - e, 1)
            num = num + t
        den = Poly.const(self.target, 1)
        for i, d in enumerate(degs):
            if d:
                den = den * pw(i, d, 1)
        return num, den

    def apply(self, p: Poly) -> Poly:
        """Image with denominators cleared (equal to the true image up to a unit)."""
        return self.apply_frac(p)[0]

    def apply_ideal(self, ideal: Ideal) -> Ideal:
        return Ideal(self.target, [self.apply(g) for g in ideal.gens])

    def evaluate(self, point: Mapping[str, Fraction]) -> dict[str, Fraction]:
        """Images of a target point (denominators must not vanish there)."""
        out = {}
        for i, (n, p) in enumerate(self.images):
            d = Fraction(1) if self.dens is None else self.dens[i].evaluate(point)
            if d == 0:
                raise ZeroDivisionError(f"denominator of {n} vanishes")
            out[n] = p.evaluate(point) / d
        return out

    def then(self, other: SubstitutionMap) -> SubstitutionMap:
        """Composite: first ``self`` (source -> target), then ``other`` on the target."""
        if other.source != self.target:
            raise ValueError("incompatible substitutions")
        if other.is_identity():
            return self
        if self.is_identity() and self.source == other.source:
            return other
        if self.dens is None and other.dens is None:
            return SubstitutionMap(self.source, other.target, tuple((n, other.apply(p)) for n, p in self.images))
        images, dens = [], []
        for i, (n, p) in enumerate(self.images):
            n1, d1 = other.apply_frac(p)
            if self.dens is None:
                n2, d2 = Poly.const(other.target, 1), Poly.const(other.target, 1)
            else:
                n2, d2 = other.apply_frac(self.dens[i])
            num, den = n1 * d2, d1 * n2
            if den.is_constant():
                num, den = num * (1 / den.constant_term()), Poly.const(other.target, 1)
            images.append((n, num))
            dens.append(den)
        return SubstitutionMap(self.source, other.target, tuple(images), tuple(dens))

    def is_identity(self) -> bool:
        if self.source != self.target:
            return False
        return (
            self.dens is None
            and self.source == self.target
            and all(p == Poly.var(self.target, n) for n, p in self.images)
        )

    def to_strs(self) -> dict[str, str]:
        out = {}
        for i, (n, p) in enumerate(self.images):
            if self.dens is None or self.dens[i].is_constant():
                out[n] = p.to_str()
            else:
                out[n] = f"({p.to_str()})/({self.dens[i].to_str()})"
        return out


@dataclass(frozen=True)
class Provenance:
    parent: str
    subst: SubstitutionMap
    tag: str


@dataclass(frozen=True)
class Chart:
    """One affine chart ``D(inverted)`` of the ambient scheme.

    ``root_map`` expresses the coordinates of the root chart in this chart, so
    total transforms can be recomputed from the original data.
    """

    id: str
    ctx: VarContext
    exceptionals: tuple[ExceptionalRecord, ...] = ()
    provenance: Provenance | None = None
    inverted: Poly | None = None
    root_map: SubstitutionMap | None = field(default=None, compare=False)

    def __post_init__(self):
        seen = set()
        for r in self.exceptionals:
            if r.var not in self.ctx.names:
                raise ValueError(f"exceptional variable {r.var} not in chart")
            if r.var in seen:
                raise ValueError(f"two exceptional records on {r.var}")
            seen.add(r.var)
        if self.inverted is not None:
            if self.inverted.ctx != self.ctx:
                raise ValueError("inverted polynomial in the wrong context")
            if self.inverted.is_zero():
                raise ValueError("cannot invert zero")
            if self.inverted.is_constant():
                object.__setattr__(self, "inverted", None)
        if self.root_map is None:
            object.__setattr__(self, "root_map", SubstitutionMap.identity(self.ctx))

    @classmethod
    def root(cls, ctx: VarContext, divisors: Iterable[tuple[str, str]] = (), chart_id: str = "c0") -> Chart:
        recs = tuple(ExceptionalRecord(v, 0, s, 0) for v, s in divisors)
        return cls(chart_id, ctx, recs)

    def record(self, var: str) -> ExceptionalRecord | None:
        for r in self.exceptionals:
            if r.var == var:
                return r
        return None

    @property
    def exceptional_vars(self) -> tuple[str, ...]:
        return tuple(r.var for r in self.exceptionals)

    def with_records(self, records: Iterable[ExceptionalRecord]) -> Chart:
        return replace(self, exceptionals=tuple(sorted(records, key=lambda r: self.ctx.index(r.var))))


# ---------------------------------------------------------------------------
# coordinate changes


def _graph_form(g: Poly, name: str):
    """If g = c*name + h with c, h free of name, return (c, h)."""
    if g.degree_in(name) != 1:
        return None
    coeffs = g.coefficients_in(name)
    return coeffs[1], coeffs.get(0, Poly.const(g.ctx, 0))


def normalize_center(chart: Chart, Y: Ideal) -> tuple[SubstitutionMap, tuple[str, ...]]:
    """Coordinate change ``phi`` with ``phi(Y) = <coordVars>``.

    ``phi`` maps each chart variable to a polynomial in the new coordinates
    (which reuse the old names), possibly divided by a unit of the chart.
    Exceptional variables are never moved.
    """
    phi, _, coords = normalize_center_with_inverse(chart, Y)
    return phi, coords


def _is_unit(c: Poly, inverted: Poly | None) -> bool:
    from .algebra import locus_empty

    return c.is_constant() or (inverted is not None and locus_empty(Ideal(c.ctx, [c]), None, inverted))


def normalize_center_with_inverse(chart: Chart, Y: Ideal):
    """As :func:`normalize_center`, also returning the (polynomial) inverse change."""
    from .algebra import locus_empty, saturate

    ctx = chart.ctx
    exc = set(chart.exceptional_vars)
    if Y.is_unit():
        raise NotCoordinatizable("empty center")
    # lex order with the exceptional variables smallest, so elimination
    # expresses ordinary variables in terms of the rest
    order_names = [n for n in ctx.names if n not in exc] + [n for n in ctx.names if n in exc]
    perm = [ctx.index(n) for n in order_names]

    def key(m):
        return tuple(m[i] for i in perm)

    fwd = SubstitutionMap.identity(ctx)
    bwd = SubstitutionMap.identity(ctx)
    coord: list[str] = []
    pending = groebner(list(Y.gens), key)
    while pending:
        inv = None if chart.inverted is None else fwd.apply(chart.inverted)
        current = Ideal(ctx, list(pending) + [Poly.var(ctx, n) for n in coord])
        forms = []
        for g in pending:
            for n in order_names:
                if n in coord:
                    continue
                gf = _graph_form(g, n)
                if gf is None:
                    continue
                c, h = gf
                if any(v in coord for v in h.variables() | c.variables()):
                    continue
                forms.append((g, n, c, h))
        chosen = None
        # constant coefficient, then a coefficient that is already a unit
        for g, n, c, h in forms:
            if c.is_constant() and (n not in exc or h.is_zero()):
                chosen = (g, n, c, h)
                break
        if chosen is None:
            for g, n, c, h in forms:
                if n not in exc and _is_unit(c, inv):
                    chosen = (g, n, c, h)
                    break
        if chosen is None:
            # localize: make the exceptional variable or the coefficient a unit
            for g, n, c, h in forms:
                if n in exc:
                    if h.is_zero():
                        continue
                    f = Poly.var(ctx, n)
                else:
                    f = c
                if not locus_empty(current + Ideal(ctx, [f]), None, inv):
                    continue
                drop = tuple(v for v in sorted(exc, key=ctx.index) if f.power_of_var(v) > 0)
                cover = [g] if locus_empty(Ideal(ctx, [f, g]), None, inv) else list(current.gens)
                raise NeedsLocalization(
                    bwd.apply(f).primitive(), drop, tuple(bwd.apply(q).primitive() for q in cover)
                )
            raise NotCoordinatizable(f"cannot coordinatize {Y}")
        g, n, c, h = chosen
        if c.is_constant():
            c, h = Poly.const(ctx, 1), h * (1 / c.constant_term())
        coord.append(n)
        step_f, step_b = contact_change(ctx, n, c, h)
        fwd = fwd.then(step_f)
        bwd = step_b.then(bwd)
        # remaining generators restricted to the new hyperplane n = 0
        rest = []
        zero = {n: Poly.const(ctx, 0)}
        for q in pending:
            if q is g:
                continue
            r = step_f.apply(q).subs(zero, ctx)
            if not r.is_zero():
                rest.append(r)
        pending = groebner(rest, key) if rest else []
        if pending and pending[0].is_constant():
            raise NotCoordinatizable("center became empty during normalization")
    inv = None if chart.inverted is None else fwd.apply(chart.inverted)
    image = fwd.apply_ideal(Y)
    if inv is not None:
        image = saturate(image, inv)
    if image.reduced() != Ideal.of_vars(ctx, coord):
        raise NotCoordinatizable(f"normalization check failed for {Y}")
    return fwd, bwd, tuple(sorted(coord, key=ctx.index))


def contact_change(ctx: VarContext, name: str, c, h: Poly) -> tuple[SubstitutionMap, SubstitutionMap]:
    """Coordinate change making ``c*name + h`` the coordinate ``name`` (c, h free of name).

    Returns (forward, backward): forward maps old coordinates to the new ones
    (dividing by ``c``, which must be a unit), backward the reverse.
    """
    if not isinstance(c, Poly):
        c = Poly.const(ctx, c)
    z = Poly.var(ctx, name)
    if c.is_constant():
        fwd = SubstitutionMap.from_dict(ctx, ctx, {name: (z - h) * (1 / c.constant_term())})
    else:
        fwd = SubstitutionMap.from_dict(ctx, ctx, {name: z - h}, {name: c})
    bwd = SubstitutionMap.from_dict(ctx, ctx, {name: z * c + h})
    return fwd, bwd


# ---------------------------------------------------------------------------
# blow-ups and pull-backs


def apply_subst(ideal: Ideal, m: SubstitutionMap) -> Ideal:
    """Generator-wise substitution, then normalization."""
    return m.apply_ideal(ideal).reduced()


def _transport_inverted(chart: Chart, m: SubstitutionMap) -> Poly | None:
    return None if chart.inverted is None else m.apply(chart.inverted)


def blowup(chart: Chart, coord_vars: Iterable[str], birth: int | None = None) -> list[tuple[Chart, SubstitutionMap]]:
    """Charts of the blow-up of ``chart`` along ``V(coord_vars)``.

    The chart selected by ``k`` substitutes ``x_i -> x_i * x_k`` for the other
    center variables; the new exceptional divisor is ``V(x_k)``.  A
    codimension-one center yields one chart with the identity substitution.
    ``a_num`` of the new record is left at 0 for the caller to fill in.
    """
    C = [n for n in chart.ctx.names if n in set(coord_vars)]
    if not C:
        raise ValueError("empty center")
    if birth is None:
        birth = max((r.birth for r in chart.exceptionals), default=0) + 1
    ctx = chart.ctx
    out = []
    for k in C:
        images = {i: Poly.var(ctx, i) * Poly.var(ctx, k) for i in C if i != k}
        m = SubstitutionMap.from_dict(ctx, ctx, images)
        recs = [r for r in chart.exceptionals if r.var != k]
        recs.append(ExceptionalRecord(k, birth, PLUS, 0))
        child = Chart(
            id=f"{chart.id}/{k}" if len(C) > 1 else f"{chart.id}|{k}",
            ctx=ctx,
            exceptionals=(),
            provenance=Provenance(chart.id, m, k),
            inverted=_transport_inverted(chart, m),
            root_map=chart.root_map.then(m),
        ).with_records(recs)
        out.append((child, m))
    return out


def recoordinate(chart: Chart, phi: SubstitutionMap, tag: str = "phi") -> Chart:
    """The same chart expressed in new coordinates (exceptional variables fixed)."""
    for r in chart.exceptionals:
        if phi.image(r.var) != Poly.var(chart.ctx, r.var):
            raise NotCoordinatizable("coordinate change moves an exceptional variable")
    return replace(
        chart,
        inverted=_transport_inverted(chart, phi),
        root_map=chart.root_map.then(phi),
    )


def localize(chart: Chart, f: Poly, tag: str) -> tuple[Chart, SubstitutionMap]:
    """Open subchart ``D(f)``."""
    m = SubstitutionMap.identity(chart.ctx)
    inv = f if chart.inverted is None else chart.inverted * f
    child = replace(
        chart,
        id=f"{chart.id}/{tag}",
        provenance=Provenance(chart.id, m, tag),
        inverted=inv.primitive(),
        root_map=chart.root_map,
    )
    return child, m


def product_with_line(chart: Chart, name: str | None = None) -> Chart:
    """``chart x A^1``: one fresh coordinate, records unchanged."""
    name = name or chart.ctx.fresh_name("t")
    big = chart.ctx.extend(name)
    m = SubstitutionMap.identity(chart.ctx, big)
    return Chart(
        id=chart.id,
        ctx=big,
        exceptionals=chart.exceptionals,
        provenance=Provenance(chart.id, m, f"x{name}"),
        inverted=None if chart.inverted is None else chart.inverted.to_context(big),
        root_map=SubstitutionMap.identity(big),
    )


__all__ = [
    "Chart",
    "ExceptionalRecord",
    "MINUS",
    "NeedsLocalization",
    "NotCoordinatizable",
    "PLUS",
    "Provenance",
    "SubstitutionMap",
    "apply_subst",
    "blowup",
    "contact_change",
    "normalize_center_with_inverse",
    "localize",
    "normalize_center",
    "product_with_line",
    "recoordinate",
]
