from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import GROUP_THEORY, corpus_pairs
from helpers import F, T
from oracles import random_clause
from proofcheck.terms import Forall, Literal, Clause, EQ
from proofcheck.tptp import (
    InvalidProof, TptpError, TptpSyntaxError, Unit, UnsupportedDialect, TptpProblem, parse_derivation,
    parse_problem, print_derivation, print_problem,
)


def test_cnf_unit():
    u = parse_problem(b"cnf(c2, axiom, mul(id,X) = X).").units[0]
    assert (u.name, u.role) == ("c2", "axiom")
    assert u.payload == Clause((Literal(True, EQ, (T("mul(id, X)"), T("X"))),))


def test_fof_conjecture():
    u = parse_problem("fof(goal, conjecture, ![X,Y]: mul(X,Y)=mul(Y,X)).").units[0]
    assert u.role == "conjecture"
    assert u.payload == Forall("X", Forall("Y", F("mul(X,Y) = mul(Y,X)")))


def test_empty_problem():
    assert parse_problem(b"").units == []
    assert parse_problem("% only a comment\n").units == []


def test_syntax_error_position():
    with pytest.raises(TptpSyntaxError) as e:
        parse_problem("cnf(a, axiom, p(X).\n", path="bad.p")
    assert "bad.p" in str(e.value) and ":1:" in str(e.value)


def test_typed_dialect_rejected():
    with pytest.raises(UnsupportedDialect):
        parse_problem("tff(t, type, a: $i).")


def test_include(tmp_path):
    (tmp_path / "Axioms").mkdir()
    (tmp_path / "Axioms" / "ax.ax").write_text("cnf(a1, axiom, p(a)).\ncnf(a2, axiom, q(a)).\n")
    text = "include('Axioms/ax.ax', [a2]).\ncnf(g, negated_conjecture, ~q(a))."
    prob = parse_problem(text, tptp_root=tmp_path)
    assert [u.name for u in prob.units] == ["a2", "g"]
    with pytest.raises(TptpError):
        parse_problem(text, tptp_root=tmp_path / "nowhere")


def test_duplicate_unit_names():
    with pytest.raises(TptpError):
        parse_problem("cnf(a, axiom, p).\ncnf(a, axiom, q).")


def test_group_theory_graph():
    g = parse_derivation((GROUP_THEORY / "group.tstp").read_bytes())
    assert set(g.roots) == {"1", "2", "4", "6"}
    assert g.sink == "250"
    assert len(g.steps) == 16
    assert g.steps["160"].rule == "superposition" and g.steps["160"].premises == ("22", "85")
    order = g.topological_order()
    pos = {s: i for i, s in enumerate(order)}
    assert all(pos[p] < pos[s] for s in order for p in g.steps[s].premises)


def test_invalid_proofs():
    with pytest.raises(InvalidProof):
        parse_derivation("cnf(1, axiom, $false).")
    with pytest.raises(InvalidProof):
        parse_derivation("cnf(1, axiom, p).\ncnf(2, plain, $false, inference(resolution, [], [7])).")
    with pytest.raises(InvalidProof):
        parse_derivation("cnf(1, plain, p, inference(r, [], [2])).\n"
                         "cnf(2, plain, $false, inference(r, [], [1])).")
    with pytest.raises(InvalidProof):
        parse_derivation("cnf(1, axiom, p).\ncnf(2, plain, $false, inference(r, [], [1])).\n"
                         "cnf(3, plain, $false, inference(r, [], [1])).")


def test_unknown_rule_preserved():
    g = parse_derivation("cnf(1, axiom, p).\ncnf(2, plain, $false, inference(mystery_rule, [], [1])).")
    assert g.steps["2"].rule == "mystery_rule"


def test_avatar_assertions_annotation():
    g = parse_derivation("cnf(1, axiom, p(X)).\n"
                         "cnf(2, plain, $false, inference(r, [assert([sp1, sp2])], [1])).\n"
                         "cnf(3, plain, $false, inference(r, [], [2])).")
    assert g.steps["2"].clause.assertions == {"sp1", "sp2"}
    assert g.sink == "3"


@pytest.mark.parametrize("path", [GROUP_THEORY / "group.tstp"] + [q for _, q in corpus_pairs()],
                         ids=lambda p: p.stem)
def test_derivation_round_trip(path):
    g1 = parse_derivation(path.read_bytes())
    text = print_derivation(g1)
    g2 = parse_derivation(text)
    assert g2.steps == g1.steps and g2.roots == g1.roots and g2.sink == g1.sink
    assert print_derivation(g2) == text


@pytest.mark.parametrize("path", [GROUP_THEORY / "group.p"] + [p for p, _ in corpus_pairs()], ids=lambda p: p.stem)
def test_problem_round_trip(path):
    p1 = parse_problem(path.read_bytes(), path=str(path))
    p2 = parse_problem(print_problem(p1))
    assert p2.units == p1.units


def test_random_clause_round_trip():
    rng = random.Random(1)
    for i in range(300):
        c = random_clause(rng)
        prob = TptpProblem([Unit(f"u{i}", "axiom", c)])
        assert parse_problem(print_problem(prob)).units == prob.units


def test_quoted_names_round_trip():
    prob = parse_problem("cnf('odd name', axiom, 'Big'('it''s') = \"d\").".replace("''", "\\'"))
    assert parse_problem(print_problem(prob)).units == prob.units


@settings(max_examples=400, deadline=None)
@given(st.binary(max_size=200))
def test_parser_never_panics_on_bytes(data):
    for fn in (parse_problem, parse_derivation):
        try:
            fn(data)
        except TptpError:
            pass


_alphabet = st.sampled_from(list("cnf(fo,axiom)[]!?:~&|=<>$'\". XYab_12\n%"))


@settings(max_examples=400, deadline=None)
@given(st.lists(_alphabet, max_size=120).map("".join))
def test_parser_never_panics_on_token_soup(text):
    for fn in (parse_problem, parse_derivation):
        try:
            fn(text)
        except TptpError:
            pass


def test_deep_nesting_is_an_error():
    with pytest.raises(TptpError):
        parse_problem("fof(a, axiom, " + "~" * 5000 + "p).")
    with pytest.raises(TptpError):
        parse_problem("cnf(a, axiom, p(" + "f(" * 5000 + "a" + ")" * 5001 + ").")
