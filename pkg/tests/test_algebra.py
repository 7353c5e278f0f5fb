from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from desing.algebra import (
    INF,
    Ideal,
    ParseError,
    Poly,
    VarContext,
    components_of,
    delta,
    delta_power,
    dimension,
    factor,
    groebner_basis,
    ideal_contains,
    is_smooth,
    locus_contains,
    locus_empty,
    max_order,
    order_along,
    order_at_point,
    parse_poly,
    radical_contains,
    same_locus,
    saturate,
    var_power,
)

from .conftest import XY, XYZ, I, P, from_sympy, to_sympy

# ---------------------------------------------------------------------------
# strategies

coeff = st.integers(-3, 3)
mono2 = st.tuples(st.integers(0, 3), st.integers(0, 3))


@st.composite
def polys(draw, ctx=XY, max_terms=4, nonzero=True):
    terms = draw(st.dictionaries(mono2, coeff, min_size=1, max_size=max_terms))
    p = Poly(ctx, terms)
    if nonzero and p.is_zero():
        p = Poly.var(ctx, "x")
    return p


points = st.tuples(st.integers(-2, 2), st.integers(-2, 2)).map(lambda t: {"x": Fraction(t[0]), "y": Fraction(t[1])})


def monic_set(polys_):
    out = set()
    for p in polys_:
        lc = sympy.Poly(p, *sympy.symbols("x y")).LC(order="grevlex")
        out.add(sympy.expand(p / lc))
    return out


# ---------------------------------------------------------------------------
# polynomial arithmetic against sympy


@given(polys(nonzero=False), polys(nonzero=False))
def test_ring_operations_match_sympy(f, g):
    assert to_sympy(f + g) == sympy.expand(to_sympy(f) + to_sympy(g))
    assert to_sympy(f * g) == sympy.expand(to_sympy(f) * to_sympy(g))
    assert to_sympy(f - g) == sympy.expand(to_sympy(f) - to_sympy(g))


@given(polys(), st.integers(0, 3))
def test_power_and_derivative_match_sympy(f, k):
    x = sympy.Symbol("x")
    assert to_sympy(f**k) == sympy.expand(to_sympy(f) ** k)
    assert to_sympy(f.diff("x")) == sympy.expand(sympy.diff(to_sympy(f), x))


@given(polys(), polys(), polys())
def test_substitution_matches_sympy(f, gx, gy):
    x, y = sympy.symbols("x y")
    got = f.subs({"x": gx, "y": gy})
    want = sympy.expand(to_sympy(f).subs({x: to_sympy(gx), y: to_sympy(gy)}, simultaneous=True))
    assert to_sympy(got) == want


def test_sympy_round_trip():
    f = P("3*x^2*y - 7*y + 1")
    assert from_sympy(to_sympy(f), XY) == f


# ---------------------------------------------------------------------------
# Groebner bases


def test_groebner_examples():
    assert groebner_basis(I("x")) == I("x")
    assert groebner_basis(I("x^2 - y^3", "x")) == I("x", "y^3")
    assert groebner_basis(I("2")).is_unit()


@given(st.lists(polys(max_terms=3), min_size=1, max_size=3))
def test_groebner_matches_sympy(gens):
    x, y = sympy.symbols("x y")
    ours = Ideal(XY, gens).gb()
    theirs = sympy.groebner([to_sympy(g) for g in gens], x, y, order="grevlex")
    assert monic_set(to_sympy(g) for g in ours) == monic_set(theirs.exprs)


@given(st.lists(polys(max_terms=3), min_size=1, max_size=3))
def test_groebner_generates_same_ideal(gens):
    J = Ideal(XY, gens)
    G = groebner_basis(J)
    assert ideal_contains(J, G) and ideal_contains(G, J)


def test_lex_basis_of_twisted_cubic():
    ctx = XYZ
    J = I("y - x^2", "z - x^3", ctx=ctx)
    G = groebner_basis(J, "lex")
    assert ideal_contains(J, G) and ideal_contains(G, J)


def test_ideal_contains_examples():
    assert ideal_contains(I("x", "y"), I("x^2 - y^3"))
    assert not ideal_contains(I("x^2"), I("x"))
    assert ideal_contains(I("x", "y^2"), I("x^2 - y^3"))


def test_generators_are_normalized():
    J = Ideal(XY, [P("-2*x + 4*y")])
    (g,) = J.gens
    assert g == P("x - 2*y") or g == P("-x + 2*y") * -1


# ---------------------------------------------------------------------------
# Delta and orders


def test_delta_examples():
    assert delta(I("x")).is_unit()
    assert delta(I("x^2 - y^3")) == I("x", "y^2")
    assert delta(I("x*y")) == I("x", "y")


@given(polys(), polys())
def test_delta_is_inclusion_monotone(f, g):
    A = Ideal(XY, [f * g])
    B = Ideal(XY, [g])
    assert ideal_contains(delta(B), delta(A))


def test_order_at_point_examples():
    origin = {"x": 0, "y": 0}
    assert order_at_point(I("x^2 - y^3"), origin) == 2
    assert order_at_point(I("x^2 - y^3"), {"x": 1, "y": 1}) == 1
    assert order_at_point(I("x^2 - y^3"), {"x": 0, "y": 1}) == 0
    assert order_at_point(I("x"), origin) == 1
    assert order_at_point(Ideal.zero(XY), origin) == INF


def _brute_order(f: Poly, pt) -> int:
    """Translate the point to the origin and take the least total degree."""
    x, y = sympy.symbols("x y")
    g = sympy.expand(to_sympy(f).subs({x: x + pt["x"], y: y + pt["y"]}, simultaneous=True))
    return min(sum(m) for m in sympy.Poly(g, x, y).monoms())


@given(polys(), points)
def test_order_at_point_matches_brute_force(f, pt):
    assert order_at_point(Ideal(XY, [f]), pt) == _brute_order(f, pt)


@given(polys(), points)
def test_order_along_maximal_ideal_equals_point_order(f, pt):
    m = Ideal(XY, [P("x") - pt["x"], P("y") - pt["y"]])
    J = Ideal(XY, [f])
    assert order_along(J, m) == order_at_point(J, pt)


def test_order_along_examples():
    assert order_along(I("x^3"), I("x")) == 3
    assert order_along(I("x^2 - y^3"), I("x", "y")) == 2
    assert order_along(I("y"), I("x")) == 0
    # non-coordinate prime goes through the Delta iteration
    assert order_along(I("(y - x^2)^2*x"), I("y - x^2")) == 2


def test_max_order_on_a_locus():
    J = I("x^2 - y^3")
    assert max_order(J) == 2
    assert max_order(J, within=I("x - 1", "y - 1")) == 1
    assert max_order(I("x*y"), within=I("x")) == 2


def test_delta_power_is_memoized_and_stable():
    J = I("x^3")
    assert delta_power(J, 2) == I("x")
    assert delta_power(J, 3).is_unit()
    assert delta_power(J, 5).is_unit()


# ---------------------------------------------------------------------------
# saturation, radicals, loci


def test_saturate_examples():
    y = P("y")
    assert saturate(I("y^2*x"), y) == I("x")
    assert saturate(I("x"), y) == I("x")
    assert saturate(I("y"), y).is_unit()


@given(polys(max_terms=3), polys(max_terms=2))
def test_saturation_of_product_contains_ideal(f, g):
    J = Ideal(XY, [f])
    sat = saturate(J * Ideal(XY, [g]), g)
    assert ideal_contains(sat, J)


def test_radical_and_locus_predicates():
    assert radical_contains(I("x^2", "y^3"), P("x + y"))
    assert not radical_contains(I("x^2"), P("y"))
    assert locus_empty(I("x", "x - 1"))
    assert locus_empty(I("x*y - 1"), None, P("x"))  is False
    assert locus_empty(I("x"), None, P("x"))
    assert same_locus(I("x^2", "y"), I("x", "y^5"))
    # V(x, y) is inside V(xy)
    assert locus_contains(I("x*y"), I("x", "y"))
    assert not locus_contains(I("x", "y"), I("x*y"))


def test_var_power_and_dimension():
    assert var_power(I("x^2*y", "x^3"), "x") == 2
    assert var_power(I("x^2*y", "x^3"), "y") == 0
    assert dimension(I("x")) == 1
    assert dimension(I("x", "y")) == 0
    assert dimension(I("x", ctx=XYZ)) == 2


# ---------------------------------------------------------------------------
# decomposition and smoothness


def test_components_examples():
    assert sorted(c.to_strs() for c in components_of(I("x*y"))) == [["x"], ["y"]]
    assert [c.to_strs() for c in components_of(I("x", "y^2"))] == [["x", "y"]]
    assert components_of(I("x^2 - y^3")) == [I("x^2 - y^3")]


def test_components_respect_localization():
    comps = components_of(I("x*y"), P("y"))
    assert comps == [I("x")]


def test_factor_uses_irreducible_factors():
    facs = dict((f.to_str(), k) for f, k in factor(P("x^3*y - x*y^3")))
    assert facs.get("x") == 1 and facs.get("y") == 1
    assert len(facs) == 4


def test_is_smooth_examples():
    assert is_smooth(I("x", "y", ctx=XYZ))
    assert not is_smooth(I("x^2 - y^3"))
    assert is_smooth(I("x^2 - y"))
    # singular point removed by localization
    assert is_smooth(I("x^2 - y^3"), P("x"))


# ---------------------------------------------------------------------------
# parsing


def test_parse_round_trips_through_to_str():
    for text in ["x^2 - y^3", "3*x*y - 1", "-(x + y)^2", "x^0 + 0*y"]:
        p = parse_poly(text, XY)
        assert parse_poly(p.to_str(), XY) == p


@pytest.mark.parametrize(
    "text, col",
    [("x + w", 5), ("x +", 4), ("x ** 2", 4), ("(x + y", 7), ("x $ y", 3), ("", 1)],
)
def test_parse_errors_have_columns(text, col):
    with pytest.raises(ParseError) as info:
        parse_poly(text, XY)
    assert info.value.col == col
    assert info.value.line == 1


def test_parse_error_reports_line_and_offset():
    with pytest.raises(ParseError) as info:
        parse_poly("x + q", XY, line=4, col=6)
    assert (info.value.line, info.value.col) == (4, 10)


def test_contexts_must_match():
    with pytest.raises(ValueError):
        Ideal(VarContext(("x",)), [P("x")])
