from __future__ import annotations

import itertools
import random

import pytest

from helpers import C, F
from oracles import _fo_eval, small_model_sat
from skolem_fixtures import FIXTURES
from proofcheck.preprocess import (
    DefinitionRecord, SkolemEntry, alpha_equal, check_clausification, check_definition, check_formula_transform,
    check_naming, check_skolemization, clausify, definition_record, ennf, nnf, rectify,
)
from proofcheck.rules import FAILED, UNSUPPORTED, VERIFIED
from proofcheck.terms import And, Atom, Iff, Implies, Not, Or, Xor, clause_to_formula


def test_ennf_group_theory_step7():
    v = check_formula_transform(F("~ ! [X, Y] : mul(X, Y) = mul(Y, X)"),
                                F("? [X, Y] : mul(X, Y) != mul(Y, X)"), "ennf")
    assert v.status == VERIFIED and not v.semantic_only


@pytest.mark.parametrize("kind", ["ennf", "nnf", "flatten", "simplify", "rectify"])
def test_identity(kind):
    f = F("! [X] : (p(X) => q(X))")
    assert check_formula_transform(f, f, kind).status == VERIFIED


def test_ennf_keeps_xor():
    assert ennf(F("~ (p <=> q)")) == Xor(Atom("p"), Atom("q"))
    assert check_formula_transform(F("~ (p <=> q)"), F("p <~> q"), "ennf").status == VERIFIED
    assert check_formula_transform(F("~ (p <=> q)"), F("p <=> q"), "ennf").status == FAILED


def test_nnf_removes_equivalences():
    g = nnf(F("p <=> q"))
    assert not any(isinstance(x, (Iff, Xor, Implies)) for x in _walk(g))


def _walk(f):
    yield f
    if isinstance(f, (And, Or)):
        for k in f.args:
            yield from _walk(k)
    elif isinstance(f, Not):
        yield from _walk(f.arg)
    else:
        for name in ("lhs", "rhs", "body"):
            if hasattr(f, name):
                yield from _walk(getattr(f, name))


def test_semantic_fallback_is_tagged():
    # a valid rewrite outside our rule set: distribution is not part of ENNF
    v = check_formula_transform(F("p & (q | r)"), F("(p & q) | (p & r)"), "ennf")
    assert v.status == VERIFIED and v.semantic_only
    assert check_formula_transform(F("p & q"), F("p | q"), "ennf").status == FAILED


def test_unknown_kind():
    assert check_formula_transform(F("p"), F("p"), "magic").status == UNSUPPORTED


def test_rectify_and_alpha():
    f = F("(! [X] : p(X)) & (! [X] : q(X))")
    r = rectify(f)
    assert alpha_equal(f, r)
    assert check_formula_transform(f, r, "rectify").status == VERIFIED


def _atoms(f, out):
    out.update(x.pred for x in _walk(f) if isinstance(x, Atom))
    return out


def _equivalent_prop(f, g) -> bool:
    atoms = sorted(_atoms(f, set()) | _atoms(g, set()))
    for bits in itertools.product((False, True), repeat=len(atoms)):
        tab = {a: {(): b} for a, b in zip(atoms, bits)}
        if _fo_eval(f, 1, tab, {}) != _fo_eval(g, 1, tab, {}):
            return False
    return True


def random_prop(rng, budget):
    if budget <= 0 or rng.random() < 0.25:
        a = Atom(rng.choice("pqrst"))
        return a if rng.random() < 0.7 else Not(a)
    k = rng.choice(["and", "or", "not", "imp", "iff", "xor"])
    if k == "not":
        return Not(random_prop(rng, budget - 1))
    left = random_prop(rng, (budget - 1) // 2)
    right = random_prop(rng, (budget - 1) - (budget - 1) // 2)
    return {"and": lambda: And((left, right)), "or": lambda: Or((left, right)), "imp": lambda: Implies(left, right),
            "iff": lambda: Iff(left, right), "xor": lambda: Xor(left, right)}[k]()


def test_transforms_sound_on_propositional_fragment():
    rng = random.Random(8)
    for _ in range(300):
        f = random_prop(rng, 8)
        for kind, fn in (("ennf", ennf), ("nnf", nnf)):
            g = fn(f)
            assert _equivalent_prop(f, g)
            v = check_formula_transform(f, g, kind)
            assert v.status == VERIFIED and not v.semantic_only


def test_clausify_random_equivalence():
    rng = random.Random(9)
    for _ in range(300):
        f = random_prop(rng, 8)
        clauses = clausify(f)
        g = And(tuple(clause_to_formula(c) for c in clauses)) if clauses else F("$true")
        assert _equivalent_prop(f, g), f
        shuffled = [c.__class__(tuple(rng.sample(c.literals, len(c.literals)))) for c in clauses]
        rng.shuffle(shuffled)
        assert check_clausification(f, shuffled).status == VERIFIED


def test_clausification_examples():
    assert check_clausification(F("p | (q & r)"), [C("p | q"), C("p | r")]).status == VERIFIED
    assert check_clausification(F("p | q"), [C("q | p")]).status == VERIFIED
    missing = check_clausification(F("p | (q & r)"), [C("p | q")])
    assert missing.status == FAILED and "missing-clause" in missing.reason
    extra = check_clausification(F("p | q"), [C("p | q"), C("r")])
    assert extra.status == FAILED and "extra-clause" in extra.reason
    assert check_clausification(F("p | (q & r)"), [C("p | r")], partial=True).status == VERIFIED


def _smap(entries):
    return [SkolemEntry(v, s, tuple(a)) for v, s, a in entries]


@pytest.mark.parametrize("premise, entries, conclusion", FIXTURES, ids=[f"sk{i}" for i in range(len(FIXTURES))])
def test_skolem_fixture(premise, entries, conclusion):
    v = check_skolemization(F(premise), F(conclusion), _smap(entries))
    assert v.status == VERIFIED
    assert small_model_sat(F(premise)) == small_model_sat(F(conclusion)) is not None


def test_skolem_textbook_and_failures():
    p = F("! [U] : ? [V] : p(U, V)")
    assert check_skolemization(p, F("! [U] : p(U, f(U))"), [SkolemEntry("V", "f", ("U",))]).status == VERIFIED
    assert check_skolemization(p, F("! [U] : p(U, f(U))"), [SkolemEntry("V", "f")]).status == VERIFIED
    missing = check_skolemization(p, F("! [U] : p(U, f)"), [SkolemEntry("V", "f", ())])
    assert missing.status == FAILED
    # the failing map is not equisatisfiable: p(U, f) for all U is strictly stronger
    weaker = F("! [U] : ? [V] : (p(U, V) & ~p(V, V))")
    assert small_model_sat(weaker) and not small_model_sat(F("! [U] : (p(U, f) & ~p(f, f))"))


def test_skolem_ordering_mismatch():
    p = F("! [X, Y] : ? [Z] : r(X, Y, Z)")
    v = check_skolemization(p, F("! [X, Y] : r(X, Y, g(Y, X))"), [SkolemEntry("Z", "g", ("Y", "X"))])
    assert v.status == FAILED and "ordering-mismatch" in v.reason
    v = check_skolemization(p, F("! [X, Y] : r(X, Y, g(Y, X))"), [SkolemEntry("Z", "g")])
    assert v.status == FAILED and "ordering-mismatch" in v.reason


def test_skolem_freshness():
    p = F("? [X] : p(X, a)")
    assert check_skolemization(p, F("p(a, a)"), [SkolemEntry("X", "a", ())]).status == FAILED
    assert check_skolemization(F("? [X] : p(X)"), F("p(b)"), [SkolemEntry("X", "b", ())], taken={"b"}).status == FAILED


def test_skolem_equality_orientation():
    p = F("? [X, Y] : mul(X, Y) != mul(Y, X)")
    m = [SkolemEntry("X", "s0", ()), SkolemEntry("Y", "s1", ())]
    assert check_skolemization(p, F("mul(s1, s0) != mul(s0, s1)"), m).status == VERIFIED


def test_naming():
    d = DefinitionRecord("n0", (), F("a & b"), "iff")
    assert check_definition(d).status == VERIFIED
    assert check_naming(F("(a & b) | (a & b)"), F("n0 | n0"), d).status == VERIFIED
    imp = DefinitionRecord("n0", (), F("a & b"), "implies")
    assert check_naming(F("(a & b) | c"), F("n0 | c"), imp).status == VERIFIED
    neg = check_naming(F("~(a & b) | c"), F("~n0 | c"), imp)
    assert neg.status == FAILED
    assert check_naming(F("(a & b) | n0"), F("n0 | n0"), d).status == FAILED
    assert check_definition(DefinitionRecord("a", (), F("a & b"))).status == FAILED
    assert check_definition(d, taken={"n0"}).status == FAILED


def test_negative_position_counterexample():
    # folding an implies-definition negatively is unsound: n0 false makes the conclusion true
    # although the premise is false when a, b hold
    premise, concl, definition = F("~(a & b)"), F("~n0"), F("n0 => (a & b)")
    tab = {"a": {(): True}, "b": {(): True}, "n0": {(): False}}
    assert _fo_eval(definition, 1, tab, {}) and _fo_eval(concl, 1, tab, {}) and not _fo_eval(premise, 1, tab, {})


def test_naming_with_arguments():
    d = definition_record(F("! [X] : (n1(X) <=> (p(X) & q(X)))"))
    assert d == DefinitionRecord("n1", ("X",), F("p(X) & q(X)"), "iff")
    assert check_naming(F("! [Y] : ((p(Y) & q(Y)) | r(Y))"), F("! [Y] : (n1(Y) | r(Y))"), d).status == VERIFIED
    assert check_definition(DefinitionRecord("n2", (), F("p(X)"))).status == FAILED
