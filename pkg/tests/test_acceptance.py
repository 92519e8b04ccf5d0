"""Acceptance criteria, one test per criterion.

Each test records a one-line PASS/FAIL verdict; the lines are printed in the
pytest terminal summary and by ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import json
import random
import sys
import time
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from conftest import GROUP_THEORY, GOLDEN, corpus_pairs, load_pair  # noqa: E402
from helpers import F  # noqa: E402
from oracles import (  # noqa: E402
    all_terms, apply, clause_equal_oracle, clause_mutations, euf_countermodel, factors_through, random_clause,
    random_cnf, random_euf_problem, same_up_to_renaming, shuffle_flip_rename, small_model_sat, step_mutations,
    truth_table_sat,
)
from skolem_fixtures import FIXTURES  # noqa: E402
from proofcheck import kernel  # noqa: E402
from proofcheck.cli import main as cli_main  # noqa: E402
from proofcheck.emit import emit_avatar_variant, emit_script, reference_check  # noqa: E402
from proofcheck.preprocess import SkolemEntry, check_skolemization  # noqa: E402
from proofcheck.replay import TRUSTED, ReplayConfig, _Context, check_step, replay  # noqa: E402
from proofcheck.rules import FAILED, UNSUPPORTED, VERIFIED  # noqa: E402
from proofcheck.terms import App, Var, clause_equal_mod_sym  # noqa: E402
from proofcheck.tptp import ProofGraph  # noqa: E402
from proofcheck.unify import mgu  # noqa: E402

RESULTS: list = []

EXPECTED_SIGMA = {"x0": Var("x"), "y0": Var("y"), "x1": Var("y"), "y1": App("mul", (Var("x"), Var("y")))}


def record(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_01_group_theory_end_to_end():
    t0 = time.perf_counter()
    prob, graph = load_pair(GROUP_THEORY / "group.p", GROUP_THEORY / "group.tstp")
    report = replay(prob, graph)
    elapsed = time.perf_counter() - t0
    c = report.counts
    r160 = report.results["160"]
    inst = dict(r160.verdict.details.get("instantiation", {}))
    sigma_ok = r160.checker == "superposition" and r160.status == VERIFIED and same_up_to_renaming(inst, EXPECTED_SIGMA)
    ok = report.status == TRUSTED and c["verified"] == 16 == c["steps"] and elapsed < 1.0 and sigma_ok
    record(1, "group-theory fixture replay", ok,
           f"{report.status}, {c['verified']}/{c['steps']} verified in {elapsed:.3f}s, step 160 sigma match={sigma_ok}")


def test_criterion_02_kernel_soundness():
    rng = random.Random(20240601)
    n, disagree, bad_witness, entailed = 10_000, 0, 0, 0
    t0 = time.perf_counter()
    for _ in range(n):
        prems, goal = random_euf_problem(rng)
        out = kernel.check_entailment(kernel.GroundProblem(tuple(prems), goal))
        model = euf_countermodel(prems, goal)
        if isinstance(out, kernel.Entailed) != (model is None) or isinstance(out, kernel.BudgetExhausted):
            disagree += 1
        if isinstance(out, kernel.NotEntailed) and not kernel.witness_holds(out, prems, goal):
            bad_witness += 1
        entailed += isinstance(out, kernel.Entailed)
    elapsed = time.perf_counter() - t0
    ok = disagree == 0 and bad_witness == 0 and elapsed < 60
    record(2, "kernel soundness", ok,
           f"{n} problems ({entailed} entailed), {disagree} disagreements, {bad_witness} bad witnesses, {elapsed:.1f}s")


def test_criterion_03_sat_endgame():
    rng = random.Random(33)
    n, disagree, trace_bad, mutants, accepted_mutants = 1000, 0, 0, 0, 0
    for _ in range(n):
        cnf = random_cnf(rng, 8)
        out = kernel.sat_solve(cnf)
        if isinstance(out, kernel.Sat) != truth_table_sat(cnf):
            disagree += 1
        if isinstance(out, kernel.Sat):
            disagree += not kernel.assignment_satisfies(cnf, out.assignment)
            continue
        trace_bad += not kernel.check_trace(cnf, out.trace)
        for j, st in enumerate(out.trace):
            for k, lit in enumerate(st.clause):
                flipped = list(st.clause)
                flipped[k] = -lit
                bad = list(out.trace)
                bad[j] = replace(st, clause=tuple(sorted(set(flipped))))
                mutants += 1
                accepted_mutants += kernel.check_trace(cnf, bad)
    ok = disagree == 0 and trace_bad == 0 and accepted_mutants == 0 and mutants > 0
    record(3, "SAT endgame", ok,
           f"{n} CNFs, {disagree} disagreements, {trace_bad} rejected traces, "
           f"{accepted_mutants}/{mutants} mutated traces accepted")


def _subterms(t, out):
    out.add(t)
    if isinstance(t, App):
        for a in t.args:
            _subterms(a, out)


def test_criterion_04_unification_generality():
    leaves = [App("a"), Var("X"), Var("Y")]
    terms = all_terms([("f", 2)], leaves, 3)
    pairs = found = violations = 0
    for t1, t2 in itertools.product(terms, repeat=2):
        pairs += 1
        pool = set(leaves)
        _subterms(t1, pool)
        _subterms(t2, pool)
        m = mgu(t1, t2)
        for x, y in itertools.product(sorted(pool, key=repr), repeat=2):
            th = {"X": x, "Y": y}
            if apply(t1, th) == apply(t2, th):
                found += 1
                if not m or not factors_through(th, m.subst, ["X", "Y"]):
                    violations += 1
    record(4, "unification generality", violations == 0,
           f"{pairs} term pairs over {{f/2, a/0}} depth<=3, {found} oracle unifiers, {violations} violations")


def test_criterion_05_skolem_equisatisfiability():
    violations, verified, sat_count = 0, 0, 0
    for premise, entries, conclusion in FIXTURES:
        smap = [SkolemEntry(v, s, tuple(a)) for v, s, a in entries]
        v = check_skolemization(F(premise), F(conclusion), smap)
        if v.status != VERIFIED:
            violations += 1
            continue
        verified += 1
        a, b = small_model_sat(F(premise)), small_model_sat(F(conclusion))
        if a is None or b is None or a != b:
            violations += 1
        sat_count += bool(a)
    ok = len(FIXTURES) >= 20 and violations == 0
    record(5, "Skolem equisatisfiability", ok,
           f"{len(FIXTURES)} fixtures, {verified} verified ({sat_count} satisfiable), {violations} violations")


def test_criterion_06_ac_clause_equality():
    rng = random.Random(66)
    n, rejected_variants, accepted_mutants, mutants, oracle_disagree = 10_000, 0, 0, 0, 0
    for _ in range(n):
        c = random_clause(rng, 6)
        d = shuffle_flip_rename(rng, c)
        same = clause_equal_mod_sym(c, d)
        rejected_variants += not same
        if same != clause_equal_oracle(c, d):
            oracle_disagree += 1
        muts = list(clause_mutations(c))
        for m in muts:
            mutants += 1
            accepted_mutants += clause_equal_mod_sym(m, d)
        if muts:
            m = muts[rng.randrange(len(muts))]
            oracle_disagree += clause_equal_mod_sym(m, d) != clause_equal_oracle(m, d)
    ok = rejected_variants == 0 and accepted_mutants == 0 and oracle_disagree == 0
    record(6, "AC clause equality", ok,
           f"{n} variants ({rejected_variants} rejected), {accepted_mutants}/{mutants} mutants accepted, "
           f"{oracle_disagree} oracle disagreements")


# premise-free introductions: any fresh definition is a valid step, so a mutant is too
_NO_MUTATION = {"definition", "avatar_definition"}


def _all_pairs():
    return [(GROUP_THEORY / "group.p", GROUP_THEORY / "group.tstp")] + corpus_pairs()


def test_criterion_07_mutation_soundness():
    config = ReplayConfig()
    steps_checked = mutants = false_verified = 0
    offenders = []
    for prob_path, proof_path in _all_pairs():
        prob, graph = load_pair(prob_path, proof_path)
        report = replay(prob, graph, config)
        for sid in report.order:
            r = report.results[sid]
            if r.status != VERIFIED or config.routing.get(r.rule) in _NO_MUTATION:
                continue
            steps_checked += 1
            for mutant in step_mutations(graph.steps[sid]):
                steps = dict(graph.steps)
                steps[sid] = mutant
                ctx = _Context(prob, ProofGraph(steps, graph.roots, graph.sink), config)
                mutants += 1
                if check_step(ctx, sid).status != FAILED:
                    false_verified += 1
                    offenders.append(f"{proof_path.stem}:{sid}")
    ok = false_verified == 0 and mutants > 0
    record(7, "mutation soundness", ok,
           f"{steps_checked} verified steps, {mutants} mutants, {false_verified} not Failed"
           + (f" ({', '.join(sorted(set(offenders))[:5])})" if offenders else ""))


_RULE_FAMILIES = {
    "Sup": {"superposition"}, "FwDem": {"demodulation"}, "Resolve": {"resolution"}, "Factor": {"factoring"},
    "EqRes": {"equality_resolution"}, "EqFac": {"equality_factoring"}, "ENNF": {"ennf"}, "Skolem": {"skolemize"},
    "naming": {"naming", "definition"}, "clausify": {"clausify"}, "AVATAR split": {"avatar_split"},
    "SAT endgame": {"avatar_sat"},
}


def test_criterion_08_corpus():
    t0 = time.perf_counter()
    total = verified = failed = other = 0
    used_checkers = set()
    pairs = corpus_pairs()
    for prob_path, proof_path in pairs:
        prob, graph = load_pair(prob_path, proof_path)
        report = replay(prob, graph)
        for sid in report.order:
            r = report.results[sid]
            total += 1
            if r.status == VERIFIED:
                verified += 1
                used_checkers.add(r.checker)
            elif r.status == FAILED:
                failed += 1
            elif r.status != UNSUPPORTED:
                other += 1
    elapsed = time.perf_counter() - t0
    missing = [k for k, v in _RULE_FAMILIES.items() if not v & used_checkers]
    rate = verified / total if total else 0.0
    ok = len(pairs) >= 20 and rate >= 0.95 and failed == 0 and other == 0 and not missing and elapsed < 30
    record(8, "desk-scale corpus", ok,
           f"{len(pairs)} pairs, {verified}/{total} verified ({rate:.1%}), {failed} failed, "
           f"{other} other non-Unsupported, missing rule families {missing or 'none'}, {elapsed:.1f}s")


def test_criterion_09_emitter_goldens():
    prob, graph = load_pair(GROUP_THEORY / "group.p", GROUP_THEORY / "group.tstp")
    text = emit_script(prob, graph, replay(prob, graph))
    group_theory_ok = text == (GOLDEN / "group_theory.lean").read_text(encoding="utf-8")
    undeclared = reference_check(text)
    corpus = dict(corpus_pairs())
    aprob, agraph = load_pair(*[p for p in corpus.items() if p[0].stem == "avatar_split"][0])
    areport = replay(aprob, agraph)
    avatar_ok = (emit_script(aprob, agraph, areport) == (GOLDEN / "avatar_split.lean").read_text(encoding="utf-8")
                 and emit_avatar_variant(aprob, agraph, areport, "12")
                 == (GOLDEN / "avatar_split_step12.lean").read_text(encoding="utf-8"))
    ok = group_theory_ok and avatar_ok and not undeclared
    record(9, "emitter goldens", ok,
           f"group_theory byte-match={group_theory_ok}, AVATAR variant byte-match={avatar_ok}, undeclared symbols={len(undeclared)}")


def _strip_timing(text: str) -> str:
    d = json.loads(text)
    d.pop("total_seconds", None)
    for s in d["steps"]:
        s.pop("seconds", None)
    return json.dumps(d, sort_keys=True)


def test_criterion_10_determinism(tmp_path):
    cases = _all_pairs()
    mismatches = 0
    for prob_path, proof_path in cases:
        outs, codes = [], []
        for k in range(2):
            out = tmp_path / f"{proof_path.stem}_{k}.json"
            codes.append(cli_main(["check", str(prob_path), str(proof_path), "--out", str(out)]))
            outs.append(_strip_timing(out.read_text(encoding="utf-8")))
        mismatches += outs[0] != outs[1] or codes[0] != codes[1]
    record(10, "determinism", mismatches == 0,
           f"{len(cases)} problem/proof pairs checked twice via cmd_check, {mismatches} differing reports or exit codes")


if __name__ == "__main__":
    import tempfile

    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as d:
                        fn(Path(d))
                else:
                    fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
