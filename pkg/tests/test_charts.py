from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from desing.algebra import Ideal, Poly, VarContext
from desing.charts import (
    MINUS,
    PLUS,
    Chart,
    ExceptionalRecord,
    NotCoordinatizable,
    SubstitutionMap,
    apply_subst,
    blowup,
    contact_change,
    normalize_center,
    normalize_center_with_inverse,
    product_with_line,
)

from .conftest import X, XY, XYZ, I, P, to_sympy

coeff = st.integers(-3, 3)


@st.composite
def polys(draw, ctx=XY, max_terms=4):
    mono = st.tuples(*[st.integers(0, 3)] * len(ctx))
    terms = draw(st.dictionaries(mono, coeff, min_size=1, max_size=max_terms))
    return Poly(ctx, terms)


def rat_point(ctx):
    vals = st.fractions(min_value=-3, max_value=3, max_denominator=3)
    return st.tuples(*[vals] * len(ctx)).map(lambda t: dict(zip(ctx.names, t)))


# ---------------------------------------------------------------------------
# normalize_center


def _image(chart: Chart, Y: Ideal) -> Ideal:
    fwd, _, _ = normalize_center_with_inverse(chart, Y)
    return fwd.apply_ideal(Y).reduced()


def test_normalize_coordinate_center_is_identity():
    chart = Chart.root(XY)
    phi, coords = normalize_center(chart, I("x", "y"))
    assert phi.is_identity()
    assert coords == ("x", "y")


def test_normalize_translation():
    chart = Chart.root(XY)
    phi, coords = normalize_center(chart, I("x - 1"))
    assert coords == ("x",)
    assert phi.image("x") == P("x + 1")
    assert _image(chart, I("x - 1")) == I("x")


def test_normalize_unitriangular():
    chart = Chart.root(XY)
    phi, coords = normalize_center(chart, I("y - x^2"))
    assert coords == ("y",)
    assert phi.image("y") == P("y + x^2")
    assert _image(chart, I("y - x^2")) == I("y")


def test_normalize_point_off_origin():
    chart = Chart.root(XYZ)
    Y = I("x - 2", "y + z", "z - 1", ctx=XYZ)
    assert _image(chart, Y) == Ideal.of_vars(XYZ, ["x", "y", "z"])


def test_normalize_never_moves_exceptional_variables():
    chart = Chart.root(XY, [("y", PLUS)])
    phi, coords = normalize_center(chart, I("x - y^2"))
    assert phi.image("y") == P("y")
    assert coords == ("x",)


def test_normalize_rejects_non_coordinatizable_center():
    # a smooth conic cannot be straightened by the triangular heuristic
    with pytest.raises(NotCoordinatizable):
        normalize_center(Chart.root(XY), I("x^2 + y^2 - 1"))


def test_normalize_rejects_unit_ideal():
    with pytest.raises((ValueError, NotCoordinatizable)):
        normalize_center(Chart.root(XY), I("1"))


# ---------------------------------------------------------------------------
# blowup


def test_point_blowup_y_chart():
    charts = dict((c.provenance.tag, (c, m)) for c, m in blowup(Chart.root(XY), ["x", "y"]))
    assert set(charts) == {"x", "y"}
    chart, m = charts["y"]
    assert m.image("x") == P("x*y") and m.image("y") == P("y")
    assert chart.exceptional_vars == ("y",)
    rec = chart.record("y")
    assert rec.birth == 1 and rec.sign == PLUS and rec.a_num == 0


def test_codim_one_blowup_is_identity():
    out = blowup(Chart.root(XY), ["x"])
    assert len(out) == 1
    chart, m = out[0]
    assert m.is_identity()
    assert chart.exceptional_vars == ("x",)


def test_blowup_z_chart_total_transform():
    for chart, m in blowup(Chart.root(XYZ), ["x", "y", "z"]):
        if chart.provenance.tag == "z":
            total = apply_subst(I("x^2 + y^2 + z^2", ctx=XYZ), m)
            assert total == I("z^2*(x^2 + y^2 + 1)", ctx=XYZ)
            break
    else:
        pytest.fail("no z chart")


@pytest.mark.parametrize("center", [["x", "y"], ["x", "y", "z"], ["y", "z"]])
def test_total_transform_of_center_is_exceptional(center):
    Y = Ideal.of_vars(XYZ, center)
    for chart, m in blowup(Chart.root(XYZ), center):
        k = chart.provenance.tag
        assert apply_subst(Y, m) == Ideal.of_vars(XYZ, [k])


def test_blowup_keeps_old_records_and_fresh_birth():
    root = Chart(
        "c0", XYZ, (ExceptionalRecord("x", 1, PLUS, 2), ExceptionalRecord("z", 2, MINUS, 0))
    )
    for chart, _ in blowup(root, ["x", "y"]):
        births = sorted(r.birth for r in chart.exceptionals)
        assert births == sorted(set(births))
        assert chart.record(chart.provenance.tag).birth == 3
        assert chart.record("z").sign == MINUS
        if chart.provenance.tag == "y":
            # the strict transform of V(x) is again V(x)
            assert chart.record("x").a_num == 2


def test_exceptional_records_are_validated():
    with pytest.raises(ValueError):
        Chart("c", XY, (ExceptionalRecord("w", 1),))
    with pytest.raises(ValueError):
        Chart("c", XY, (ExceptionalRecord("x", 1), ExceptionalRecord("x", 2)))


@given(polys(XYZ), rat_point(XYZ), st.sampled_from(["x", "y", "z"]))
def test_chart_composition_coherence(f, pt, k):
    """f pulled back then evaluated = f evaluated at the image point."""
    assume(pt[k] != 0)
    for chart, m in blowup(Chart.root(XYZ), ["x", "y", "z"]):
        if chart.provenance.tag == k:
            assert m.apply(f).evaluate(pt) == f.evaluate(m.evaluate(pt))


@given(polys(XY), rat_point(XY))
def test_root_map_composes_along_two_blowups(f, pt):
    assume(pt["x"] != 0 and pt["y"] != 0)
    (c1, m1), _ = blowup(Chart.root(XY), ["x", "y"])
    for c2, m2 in blowup(c1, ["x", "y"]):
        direct = m2.apply(m1.apply(f)).evaluate(pt)
        assert c2.root_map.apply(f).evaluate(pt) == direct


# ---------------------------------------------------------------------------
# apply_subst and rational substitutions


def test_apply_subst_examples():
    m = SubstitutionMap.from_dict(XY, XY, {"x": P("x*y")})
    assert apply_subst(I("x^2 - y^3"), m) == I("x^2*y^2 - y^3")
    assert apply_subst(Ideal.unit(XY), m).is_unit()
    t = SubstitutionMap.from_dict(XY, XY, {"x": P("x + 1")})
    assert apply_subst(I("x"), t) == I("x + 1")


def test_substitution_must_be_total_and_in_context():
    with pytest.raises(ValueError):
        SubstitutionMap(XY, XY, (("x", P("x")),))
    with pytest.raises(ValueError):
        SubstitutionMap(X, X, (("x", P("x")),))


def test_contact_change_with_unit_coefficient_round_trips():
    c = P("y + 1")
    h = P("y^2")
    fwd, bwd = contact_change(XY, "x", c, h)
    assert not fwd.is_polynomial
    g = c * P("x") + h
    num, den = fwd.apply_frac(g)
    # c*x + h becomes the coordinate x, exactly
    assert num == P("x") * den


@given(polys(XY), rat_point(XY))
def test_rational_map_evaluation_matches_sympy(f, pt):
    c, h = P("y^2 + 1"), P("y - 3")
    fwd, _ = contact_change(XY, "x", c, h)
    num, den = fwd.apply_frac(f)
    x, y = sympy.symbols("x y")
    expr = to_sympy(f).subs({x: (x - to_sympy(h)) / to_sympy(c)}, simultaneous=True)
    want = expr.subs({x: sympy.Rational(pt["x"].numerator, pt["x"].denominator),
                      y: sympy.Rational(pt["y"].numerator, pt["y"].denominator)})
    got = num.evaluate(pt) / den.evaluate(pt)
    assert sympy.Rational(got.numerator, got.denominator) == sympy.nsimplify(want)


@given(rat_point(XY))
def test_rational_composition_is_inverse(pt):
    c, h = P("x*0 + y^2 + 1"), P("y")
    fwd, bwd = contact_change(XY, "x", c, h)
    for comp in (fwd.then(bwd), bwd.then(fwd)):
        image = comp.evaluate(pt)
        assert image == pt


def test_composition_short_circuits_identity():
    m = SubstitutionMap.from_dict(XY, XY, {"x": P("x*y")})
    ident = SubstitutionMap.identity(XY)
    assert m.then(ident) is m
    assert ident.then(m) is m
    with pytest.raises(ValueError):
        m.then(SubstitutionMap.identity(X))


def test_rational_map_renders_denominators():
    fwd, _ = contact_change(XY, "x", P("y + 1"), P("y"))
    assert fwd.to_strs()["x"] == "(x - y)/(y + 1)"
    assert fwd.to_strs()["y"] == "y"


# ---------------------------------------------------------------------------
# product_with_line


def test_product_with_line_examples():
    c = product_with_line(Chart.root(X))
    assert c.ctx.names == ("x", "t")
    c2 = product_with_line(Chart.root(XY, [("y", PLUS)]))
    assert c2.ctx.names == ("x", "y", "t") and c2.exceptional_vars == ("y",)
    c3 = product_with_line(product_with_line(Chart.root(X)))
    assert len(c3.ctx) == 3 and len(set(c3.ctx.names)) == 3
