from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from desing.algebra import Ideal, ParseError, Poly, VarContext
from desing.cli import ProblemFile, main, parse_problem, print_problem
from desing.resolver import principalize
from desing.verify import check_monomial_final

CUSP = "# the cusp\nvars x y\ngens x^2 - y^3\ncontrol 2\n"


@pytest.fixture
def problem(tmp_path):
    def write(text: str, name: str = "p.txt") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


# ---------------------------------------------------------------------------
# parsing


def test_parse_cusp():
    prob = parse_problem(CUSP)
    assert prob.vars == ("x", "y")
    assert prob.control == 2
    assert len(prob.gens) == 1
    assert prob.ideal == Ideal(prob.ctx, [Poly.var(prob.ctx, "x") ** 2 - Poly.var(prob.ctx, "y") ** 3])


def test_parse_divisors_and_several_generators():
    prob = parse_problem("vars x y z\ngens x^2 - y^3, x*z\ncontrol 2\ndivisor y minus\ndivisor z plus\n")
    assert len(prob.gens) == 2
    assert prob.divisors == (("y", "minus"), ("z", "plus"))


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("vars x y\ngens x^2 - y^3\n", 3, 1),  # missing control
        ("vars x y\ngens x\ncontrol 1\ndivisor w minus\n", 4, 9),
        ("vars x y\ngens x + q\ncontrol 1\n", 2, 10),
        ("vars x y\ngens x, y ^\ncontrol 1\n", 2, 12),  # end of input
        ("vars x y\ngens x\ncontrol 0\n", 3, 9),
        ("vars x y\ngens x\ncontrol 1\nfrobnicate\n", 4, 1),
        ("vars x x\ngens x\ncontrol 1\n", 1, 8),
        ("vars x y\ngens x - x\ncontrol 1\n", 2, 6),
        ("vars x y\ngens x\ncontrol 1\ndivisor x sideways\n", 4, 11),
        ("gens x\ncontrol 1\n", 3, 1),
    ],
)
def test_parse_errors_carry_positions(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_problem(text)
    assert (info.value.line, info.value.col) == (line, col)


names = st.lists(st.sampled_from(["x", "y", "z", "u", "t1"]), min_size=1, max_size=3, unique=True)


@st.composite
def problems(draw):
    vs = tuple(draw(names))
    ctx = VarContext(vs)
    mono = st.tuples(*[st.integers(0, 3)] * len(vs))
    gens = []
    for _ in range(draw(st.integers(1, 3))):
        terms = draw(st.dictionaries(mono, st.integers(-5, 5).filter(bool), min_size=1, max_size=3))
        gens.append(Poly(ctx, terms))
    divs = draw(st.lists(st.sampled_from(vs), unique=True, max_size=len(vs)))
    signs = [draw(st.sampled_from(["plus", "minus"])) for _ in divs]
    return ProblemFile(vs, tuple(gens), draw(st.integers(1, 6)), tuple(zip(divs, signs)))


@given(problems())
def test_round_trip(prob):
    assert parse_problem(print_problem(prob)) == prob


# ---------------------------------------------------------------------------
# commands and exit codes


def test_trick_command(capsys):
    assert main(["trick", "3", "2", "5"]) == 0
    out = capsys.readouterr().out
    assert "S_max = 2" in out
    assert "bound floor((N-1)(B'/B-1)) = 2: ok" in out


def test_trick_command_rejects_bad_arguments(capsys):
    assert main(["trick", "2", "3", "5"]) == 2


def test_resolve_trace(problem, capsys):
    assert main(["resolve", problem(CUSP), "--trace"]) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith("step ")]
    assert lines[0] == "step 0: maxw=1/1, t=(1/1,0), center=c0: <x, y>"


def test_already_resolved(problem, capsys):
    path = problem("vars x y\ngens x, y - 1\ncontrol 2\n")
    assert main(["resolve", path]) == 0
    assert "already resolved" in capsys.readouterr().out


def test_parse_error_exit_code(problem, capsys):
    path = problem("vars x y\ngens x^2 - y^3\n")
    assert main(["resolve", path]) == 2
    assert capsys.readouterr().err.strip() == f"{path}:3:1: missing control directive"


def test_step_limit_exit_code(problem, tmp_path, capsys):
    out = tmp_path / "partial.json"
    assert main(["resolve", problem(CUSP.replace("control 2", "control 1")), "--max-steps", "1", "--json", str(out)]) == 3
    doc = json.loads(out.read_text())
    assert doc["terminal"] is False


def test_missing_file_is_an_io_error(tmp_path, capsys):
    assert main(["resolve", str(tmp_path / "nope.txt")]) == 1


def test_nonpositive_step_limit(problem, capsys):
    assert main(["resolve", problem(CUSP), "--max-steps", "0"]) == 2


def test_principalize_and_embedded_commands(problem, capsys):
    assert main(["principalize", problem("vars x y\ngens x^2, y^3\ncontrol 1\n")]) == 0
    out = capsys.readouterr().out
    assert "monomial_final: pass" in out and "snc: pass" in out
    assert main(["embedded", problem(CUSP)]) == 0
    out = capsys.readouterr().out
    assert "strict transform smooth: yes" in out
    assert main(["embedded", problem("vars x y\ngens x, y\ncontrol 1\n")]) == 2


def test_verify_and_selftest(problem, tmp_path, capsys):
    out = tmp_path / "certs.json"
    assert main(["verify", problem(CUSP), "--json", str(out)]) == 0
    certs = json.loads(out.read_text())
    assert all(c["pass"] for c in certs)
    assert main(["selftest"]) == 0
    assert "FAIL" not in capsys.readouterr().out


# ---------------------------------------------------------------------------
# JSON trees


def test_json_schema_and_determinism(problem, tmp_path, capsys):
    path = problem(CUSP)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["resolve", path, "--json", str(a)]) == 0
    assert main(["resolve", path, "--json", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert list(doc) == ["control", "nodes", "terminal"]
    assert doc["control"] == 2 and doc["terminal"] is True
    node = doc["nodes"][0]
    assert list(node) == ["id", "parent", "invariant", "charts", "center", "subst"]
    assert node["invariant"] == "1/1,0;3/2,0;inf"
    assert list(node["charts"][0]) == ["id", "vars", "J", "exceptionals"]
    assert doc["nodes"][-1]["center"] is None


def test_node_count_is_trace_count_plus_one(problem, tmp_path, capsys):
    out = tmp_path / "t.json"
    assert main(["principalize", problem("vars x y\ngens x^2 - y^3\ncontrol 1\n"), "--trace", "--json", str(out)]) == 0
    steps = [l for l in capsys.readouterr().out.splitlines() if l.startswith("step ")]
    assert len(json.loads(out.read_text())["nodes"]) == len(steps) + 1


def test_single_node_tree(problem, tmp_path, capsys):
    out = tmp_path / "one.json"
    assert main(["embedded", problem("vars x y\ngens x - y^2\ncontrol 1\n"), "--json", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["terminal"] is True and len(doc["nodes"]) == 1


def test_json_exponents_match_monomial_report(problem, tmp_path, capsys):
    out = tmp_path / "m.json"
    assert main(["principalize", problem("vars x y\ngens x^2, y^3\ncontrol 1\n"), "--json", str(out)]) == 0
    doc = json.loads(out.read_text())
    ctx = VarContext(("x", "y"))
    J = Ideal(ctx, [Poly.var(ctx, "x") ** 2, Poly.var(ctx, "y") ** 3])
    tree = principalize(ctx, J)
    report = check_monomial_final(tree.final, J).report
    final = doc["nodes"][-1]["charts"]
    assert {c["id"] for c in final} == set(report)
    for c in final:
        # the controlled transform is trivial, so the whole total transform is the reported monomial
        assert c["J"] == ["1"]
        assert all(e["a"] == 0 for e in c["exceptionals"])
        assert {e["var"] for e in c["exceptionals"]} == set(report[c["id"]])
        assert all(k > 0 for k in report[c["id"]].values())
