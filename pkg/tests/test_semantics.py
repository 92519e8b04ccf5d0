from __future__ import annotations

import random

from helpers import F
from oracles import small_model_sat
from proofcheck.semantics import (
    agree_on_small_models, closure, evaluate, find_model, interpretation_count, satisfiable_up_to, screen_cost,
)
from proofcheck.terms import free_variables
from test_preprocess import random_prop


def test_closure_binds_free_variables():
    f = closure(F("p(X, Y)"))
    assert free_variables(f) == set()


def test_find_model_and_evaluate():
    f = F("? [X, Y] : X != Y")
    m = find_model(f)
    assert m is not None and m.size == 2 and evaluate(closure(f), m)
    assert not satisfiable_up_to(F("p & ~p"))
    assert find_model(F("! [X, Y] : X = Y & ? [Z, W] : Z != W")) is None


def test_domain_bound():
    # needs four distinct elements: invisible to a size-3 screen
    four = F("? [A, B, C, D] : (A != B & A != C & A != D & B != C & B != D & C != D)")
    assert not satisfiable_up_to(four)
    assert satisfiable_up_to(four, max_domain=4)


def test_agreement_screen():
    assert agree_on_small_models(F("~ ! [X] : p(X)"), F("? [X] : ~p(X)")) is True
    assert agree_on_small_models(F("p & q"), F("p | q")) is False
    # too many symbols for the screen
    assert agree_on_small_models(F("p & q & r & s"), F("s & r & q & p")) is None


def test_costs():
    assert interpretation_count([("f:f", 1), ("p:p", 1)], 2) == 4 * 4
    assert screen_cost([F("p(a)")]) == sum((n * 2 ** n) for n in (1, 2, 3))


def test_matches_oracle_on_random_formulas():
    rng = random.Random(4)
    for _ in range(200):
        f = random_prop(rng, 6)
        assert satisfiable_up_to(f) == small_model_sat(f)
    samples = ["! [X] : ? [Y] : p(X, Y)", "? [X] : ! [Y] : (p(X, Y) & ~p(Y, X))", "! [X] : f(f(X)) != X",
               "! [X] : (p(X) <=> ~p(f(X)))", "? [X] : (p(X) & ! [Y] : (p(Y) => Y = X)) & p(a) & ~p(b)"]
    for s in samples:
        assert satisfiable_up_to(F(s)) == small_model_sat(F(s))
