from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from desing.algebra import Ideal, Poly, is_smooth, locus_contains, same_locus
from desing.basic_object import BasicObject, sing
from desing.resolver import (
    AlreadyResolved,
    StepLimitExceeded,
    embedded_resolve,
    hironaka_trick,
    is_resolved,
    principalize,
    resolve,
    resolve_ideal,
    trick_bound,
)

from .conftest import X, XY, XYZ, I, P


def strictly_decreasing_per_phase(tree) -> bool:
    by_phase: dict[str, list] = {}
    for n in tree.edges():
        by_phase.setdefault(n.phase, []).append(n.value)
    return all(all(v[i + 1] < v[i] for i in range(len(v) - 1)) for v in by_phase.values())


# ---------------------------------------------------------------------------
# resolve


def test_one_variable_power():
    tree = resolve_ideal(X, I("x^7", ctx=X), 3)
    assert tree.steps == 2
    assert tree.terminal and is_resolved(tree.final)
    assert [n.center.ideals for n in tree.edges()][0] == {"c0": I("x", ctx=X)}


@given(st.integers(1, 6), st.integers(0, 6))
def test_floor_law(b, extra):
    a = b + extra
    tree = resolve_ideal(X, I(f"x^{a}", ctx=X), b)
    assert tree.steps == a // b


def test_cusp_resolution():
    tree = resolve_ideal(XY, I("x^2 - y^3"), 2)
    assert tree.terminal
    first = tree.edges()[0]
    assert same_locus(first.center.ideals["c0"], I("x", "y"))
    assert first.value.serialize() == "1/1,0;3/2,0;inf"


def test_already_resolved():
    with pytest.raises(AlreadyResolved):
        resolve_ideal(XY, I("x"), 2)
    with pytest.raises(AlreadyResolved):
        resolve(BasicObject.from_ideal(XY, I("x - 1", "y"), 2))


def test_step_limit():
    with pytest.raises(StepLimitExceeded) as info:
        resolve_ideal(X, I("x^9", ctx=X), 2, max_steps=2)
    assert info.value.tree is not None and info.value.tree.steps == 2
    with pytest.raises(ValueError):
        resolve(BasicObject.from_ideal(X, I("x^2", ctx=X), 1), max_steps=0)


def test_tree_structure_and_callback():
    seen = []
    tree = resolve_ideal(XY, I("x^2", "y^3"), 2, on_step=seen.append)
    assert len(seen) == tree.steps
    for i, node in enumerate(tree.nodes):
        assert node.id == i
        assert node.parent == (None if i == 0 else i - 1)
    assert tree.nodes[-1].terminal
    assert tree.control == 2


@pytest.mark.parametrize(
    "gens, b, ctx",
    [
        (("x^2 - y^3",), 2, XY),
        (("x^2 - y^5",), 2, XY),
        (("x^2", "y^3"), 2, XY),
        (("x*y*(x + y)",), 3, XY),
        (("x^2 - z*y^2",), 2, XYZ),
    ],
)
def test_values_decrease_and_centers_are_permissible(gens, b, ctx):
    tree = resolve_ideal(ctx, I(*gens, ctx=ctx), b)
    assert strictly_decreasing_per_phase(tree)
    for node in tree.edges():
        S = sing(node.obj)
        for s in node.obj.states:
            C = node.center.ideals.get(s.id)
            if C is None:
                continue
            assert locus_contains(S.ideals[s.id], C, s.inverted)
            for P_ in node.center.components(s):
                assert is_smooth(P_, s.inverted)


# ---------------------------------------------------------------------------
# principalization


def test_principalize_hypersurface_is_one_step():
    tree = principalize(XY, I("x"))
    assert tree.steps == 1
    (s,) = tree.final.states
    assert s.chart.exceptional_vars == ("x",)
    assert s.J.is_unit()


@pytest.mark.parametrize("gens", [("x^2", "y^3"), ("x^2 - y^3",), ("x*y",)])
def test_principalize_corpus(gens):
    tree = principalize(XY, I(*gens))
    assert tree.steps <= 10
    assert all(s.J.is_unit() or sing(tree.final).is_empty_on(s) for s in tree.final.states)
    assert strictly_decreasing_per_phase(tree)


def test_principalize_rejects_trivial_ideals():
    with pytest.raises(ValueError):
        principalize(XY, Ideal.unit(XY))
    with pytest.raises(ValueError):
        principalize(XY, Ideal.zero(XY))


def test_principalize_step_limit_keeps_partial_tree():
    with pytest.raises(StepLimitExceeded) as info:
        principalize(XY, I("x^2 - y^3"), max_steps=3)
    assert info.value.tree.steps == 3


# ---------------------------------------------------------------------------
# embedded resolution


def test_embedded_smooth_input_needs_nothing():
    tree = embedded_resolve(XY, P("x - y^2"))
    assert tree.steps == 0
    assert tree.terminal


@pytest.mark.parametrize("f, ctx", [("x^2 - y^3", XY), ("x^2 - y^5", XY)])
def test_embedded_plane_curves(f, ctx):
    tree = embedded_resolve(ctx, P(f, ctx))
    assert tree.steps <= 64
    for s in tree.final.states:
        assert s.strict is not None
        assert is_smooth(Ideal(s.chart.ctx, [s.strict]), s.inverted)
    assert tree.phases()[0] == "order-2"


def test_embedded_cusp_takes_the_classical_three_blowups():
    tree = embedded_resolve(XY, P("x^2 - y^3"))
    assert tree.steps == 3


def test_embedded_rejects_constants():
    with pytest.raises(ValueError):
        embedded_resolve(XY, Poly.const(XY, 3))


# ---------------------------------------------------------------------------
# Hironaka's trick


@pytest.mark.parametrize("bp, b, N, S", [(3, 2, 5, 2), (5, 2, 3, 3), (4, 4, 6, 0), (2, 1, 2, 1)])
def test_trick_examples(bp, b, N, S):
    got, steps = hironaka_trick(bp, b, N)
    assert got == S == trick_bound(bp, b, N)
    assert [s.kind for s in steps] == ["point"] * (N - 1) + ["hypersurface"] * S
    assert all(s.a == s.expected for s in steps)


@pytest.mark.parametrize("b", [1, 2, 3, 5])
def test_trick_equal_orders_gives_nothing(b):
    for N in (2, 4, 7):
        assert hironaka_trick(b, b, N)[0] == 0


def test_trick_rejects_bad_arguments():
    for args in [(2, 3, 4), (3, 0, 4), (3, 2, 1)]:
        with pytest.raises(ValueError):
            hironaka_trick(*args)
