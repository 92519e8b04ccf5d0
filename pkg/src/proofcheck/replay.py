"""End-to-end replay of a derivation against its problem."""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import avatar, kernel, preprocess, rules
from .rules import FAILED, RESOURCE_OUT, UNSUPPORTED, VERIFIED, Budget, StepVerdict, failed, verified
from .terms import Clause, Exists, Not, signature
from .tptp import DerivationStep, ProofGraph, TptpProblem

SCHEMA = "proofcheck-report/1"
TRUSTED = "TrustedRefutation"
INCOMPLETE = "Incomplete"
CLAIM_FAILED = "Refuted-Claim-Failed"
DEFAULT_WALL = 5.0


def default_routing() -> Dict[str, str]:
    with resources.files("proofcheck").joinpath("data/routing.json").open("r", encoding="utf-8") as fh:
        return json.load(fh)


def load_routing(path: Optional[str]) -> Dict[str, str]:
    if path is None:
        return default_routing()
    with open(path, encoding="utf-8") as fh:
        table = json.load(fh)
    if not isinstance(table, dict) or not all(isinstance(k, str) and isinstance(v, str) for k, v in table.items()):
        raise ValueError(f"{path}: routing table must map rule names to checker names")
    return table


@dataclass
class ReplayConfig:
    routing: Mapping[str, str] = field(default_factory=default_routing)
    kernel_budget: int = kernel.DEFAULT_BUDGET
    wall_budget: float = DEFAULT_WALL
    candidate_cap: int = rules.CANDIDATE_CAP
    jobs: int = 1

    def budget(self) -> Budget:
        return Budget(self.candidate_cap, self.kernel_budget, self.wall_budget).start()


@dataclass(frozen=True)
class StepResult:
    id: str
    rule: str
    checker: str
    verdict: StepVerdict
    seconds: float = 0.0

    @property
    def status(self) -> str:
        return self.verdict.status


@dataclass(frozen=True)
class Assembly:
    ok: bool
    reading: str
    used_roots: Tuple[str, ...]
    used_units: Tuple[str, ...]
    conjecture_independent: bool = False

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class CheckReport:
    problem: str
    proof: str
    results: Dict[str, StepResult]
    order: List[str]
    sink: str
    roots: Tuple[str, ...]
    status: str
    assembly: Optional[Assembly] = None

    @property
    def counts(self) -> Dict[str, int]:
        c = {"steps": len(self.order), "verified": 0, "failed": 0, "unsupported": 0,
             "resource_out": 0, "semantic_only": 0}
        key = {VERIFIED: "verified", FAILED: "failed", UNSUPPORTED: "unsupported", RESOURCE_OUT: "resource_out"}
        for sid in self.order:
            v = self.results[sid].verdict
            c[key[v.status]] += 1
            if v.status == VERIFIED and v.semantic_only:
                c["semantic_only"] += 1
        return c

    @property
    def category(self) -> str:
        """success / timeout / error, in the shape of the batch table."""
        if self.status == TRUSTED:
            return "success"
        if self.status == INCOMPLETE and any(self.results[s].status == RESOURCE_OUT for s in self.order):
            return "timeout"
        return "error"

    def verdict(self, sid: str) -> StepVerdict:
        return self.results[sid].verdict

    def to_dict(self, timing: bool = True) -> dict:
        steps = []
        for sid in self.order:
            r = self.results[sid]
            d = {"id": sid, "rule": r.rule, "checker": r.checker, "status": r.status,
                 "reason": r.verdict.reason, "semantic_only": r.verdict.semantic_only}
            if timing:
                d["seconds"] = round(r.seconds, 6)
            steps.append(d)
        a = self.assembly
        out = {
            "schema": SCHEMA,
            "problem": self.problem,
            "proof": self.proof,
            "status": self.status,
            "category": self.category,
            "sink": self.sink,
            "roots": list(self.roots),
            "counts": self.counts,
            "steps": steps,
            "assembly": None if a is None else {
                "ok": a.ok, "reading": a.reading, "used_roots": list(a.used_roots),
                "used_units": list(a.used_units), "conjecture_independent": a.conjecture_independent,
            },
        }
        if timing:
            out["total_seconds"] = round(sum(r.seconds for r in self.results.values()), 6)
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True) + "\n"

    def summary(self) -> str:
        c = self.counts
        cols = ["steps", "verified", "failed", "unsupported", "resource_out", "semantic_only"]
        head = " | ".join([f"{'status':>18}"] + [f"{x:>13}" for x in cols])
        row = " | ".join([f"{self.status:>18}"] + [f"{c[x]:>13}" for x in cols])
        lines = [head, "-" * len(head), row]
        for sid in self.order:
            r = self.results[sid]
            if r.status != VERIFIED:
                lines.append(f"  step {sid} ({r.rule}): {r.status} {r.verdict.reason}".rstrip())
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- context shared by step checks


class _Context:
    def __init__(self, problem: TptpProblem, proof: ProofGraph, config: ReplayConfig):
        self.problem = problem
        self.proof = proof
        self.config = config
        sig: Dict = {}
        for u in problem.units:
            signature(u.payload, sig)
        self.problem_symbols = frozenset(n for (_, n) in sig)
        self.labels = avatar.LabelTable()
        self.label_conflicts: Dict[str, Optional[str]] = {}
        # first writer wins, so bind labels in proof order before any concurrent checking
        for sid in proof.topological_order():
            s = proof.steps[sid]
            if config.routing.get(s.rule) == "avatar_definition":
                parsed = avatar.label_definition(s.formula)
                if parsed is not None:
                    self.label_conflicts[sid] = self.labels.define(parsed[0], parsed[1], sid)

    def step(self, sid: str) -> DerivationStep:
        return self.proof.steps[sid]


def _checker_name(step: DerivationStep, routing: Mapping[str, str]) -> str:
    if step.role == "conjecture" and not step.premises:
        return "conjecture"
    name = routing.get(step.rule, "")
    if name == "resolution" and len(step.premises) == 1:
        return "equality_resolution"
    return name


def check_step(ctx: _Context, sid: str) -> StepResult:
    step = ctx.step(sid)
    name = _checker_name(step, ctx.config.routing)
    t0 = time.perf_counter()
    fn = _CHECKERS.get(name)
    if fn is None:
        v = rules.unsupported(step.rule)
    else:
        try:
            v = fn(ctx, step)
        except rules.OutOfResources as e:
            v = rules.resource_out(str(e))
        except RecursionError:
            v = rules.resource_out("recursion limit")
    return StepResult(sid, step.rule, name or "-", v, time.perf_counter() - t0)


def _premises(ctx: _Context, step: DerivationStep) -> List[DerivationStep]:
    return [ctx.step(p) for p in step.premises]


def _clauses(steps: Sequence[DerivationStep]) -> Optional[List[Clause]]:
    out = []
    for s in steps:
        c = s.clause
        if c is None:
            return None
        out.append(c)
    return out


# ---------------------------------------------------------------- roots


def _check_input(ctx: _Context, step: DerivationStep) -> StepVerdict:
    name = step.source_unit
    if name is not None:
        u = ctx.problem.unit(name)
        if u is None:
            return failed(f"root {step.id} cites unit {name}, which is absent from the problem")
        if u.role == "conjecture":
            return failed(f"root {step.id} uses conjecture {name} as an axiom")
        if preprocess.same_statement(preprocess.as_formula(u.payload), step.formula):
            return verified("input", unit=name)
        return failed(f"root {step.id} differs from problem unit {name}")
    for u in ctx.problem.units:
        if u.role != "conjecture" and preprocess.same_statement(preprocess.as_formula(u.payload), step.formula):
            return verified("input", unit=u.name)
    return failed(f"root {step.id} matches no problem unit")


def _check_conjecture(ctx: _Context, step: DerivationStep) -> StepVerdict:
    for u in ctx.problem.conjectures:
        if step.source_unit not in (None, u.name):
            continue
        if preprocess.same_statement(preprocess.as_formula(u.payload), step.formula):
            return verified("conjecture", unit=u.name)
    return failed(f"step {step.id} is not a conjecture of the problem")


def _check_negated_conjecture(ctx: _Context, step: DerivationStep) -> StepVerdict:
    if step.premises:
        if len(step.premises) != 1:
            return failed("negated conjecture cites more than one premise")
        prem = ctx.step(step.premises[0])
        if prem.role != "conjecture":
            return failed(f"premise {prem.id} is not a conjecture")
        if preprocess.alpha_equal(Not(prem.formula), step.formula):
            return verified("negated conjecture", unit=prem.source_unit or "")
        return failed("conclusion is not the negation of the conjecture")
    for u in ctx.problem.units:
        f = preprocess.as_formula(u.payload)
        if u.role == "conjecture" and preprocess.alpha_equal(Not(f), step.formula):
            return verified("negated conjecture", unit=u.name)
        if u.role == "negated_conjecture" and preprocess.same_statement(f, step.formula):
            return verified("negated conjecture", unit=u.name)
    return failed(f"step {step.id} negates no conjecture of the problem")


# ---------------------------------------------------------------- clause inferences


def _clause_rule(check, arity: int):
    def run(ctx: _Context, step: DerivationStep) -> StepVerdict:
        prems = _premises(ctx, step)
        if len(prems) != arity:
            return failed(f"expected {arity} premise(s), found {len(prems)}")
        cs = _clauses(prems)
        concl = step.clause
        if cs is None or concl is None:
            return failed("premises and conclusion must be clauses")
        prop = avatar.check_assertion_propagation(concl, cs)
        if not prop.ok:
            return prop
        hint = step.bindings()
        return check(*cs, concl, hint=hint, budget=ctx.config.budget())
    return run


def _check_generic(ctx: _Context, step: DerivationStep) -> StepVerdict:
    prems = _premises(ctx, step)
    cs = _clauses(prems)
    concl = step.clause
    if not prems or cs is None or concl is None:
        return failed("premises and conclusion must be clauses")
    prop = avatar.check_assertion_propagation(concl, cs)
    if not prop.ok:
        return prop
    b = ctx.config.budget()
    return rules.check_generic(cs, concl, bindings=step.bindings(), budget=b)


# ---------------------------------------------------------------- preprocessing


def _single_premise(ctx: _Context, step: DerivationStep) -> Optional[DerivationStep]:
    return ctx.step(step.premises[0]) if len(step.premises) == 1 else None


def _transform(kind: str):
    def run(ctx: _Context, step: DerivationStep) -> StepVerdict:
        p = _single_premise(ctx, step)
        if p is None:
            return failed("expected exactly one premise")
        return preprocess.check_formula_transform(p.formula, step.formula, kind)
    return run


def skolem_map(step: DerivationStep, premise) -> Tuple[preprocess.SkolemEntry, ...]:
    """Entries from ``skolem(X, f[, [args]])`` annotations, else ``new_symbols`` paired with existentials in order."""
    entries = []
    for g in step.info("skolem"):
        if len(g.args) < 2:
            continue
        args = None
        if len(g.args) == 3:
            args = tuple(a.name for a in (g.args[2].args if g.args[2].is_list else (g.args[2],)))
        entries.append(preprocess.SkolemEntry(g.args[0].name, g.args[1].name, args))
    if entries:
        return tuple(entries)
    syms = step.new_symbols()
    exist = [f.var for f in preprocess.subformulas(premise) if isinstance(f, Exists)]
    return tuple(preprocess.SkolemEntry(v, s) for v, s in zip(exist, syms))


def _check_skolem(ctx: _Context, step: DerivationStep) -> StepVerdict:
    p = _single_premise(ctx, step)
    if p is None:
        return failed("expected exactly one premise")
    smap = skolem_map(step, p.formula)
    if not smap:
        return failed("no Skolem symbols recorded")
    return preprocess.check_skolemization(p.formula, step.formula, smap, taken=ctx.problem_symbols)


def _check_clausify(ctx: _Context, step: DerivationStep) -> StepVerdict:
    p = _single_premise(ctx, step)
    if p is None or step.clause is None:
        return failed("expected one formula premise and a clause conclusion")
    # proofs list only the clauses they go on to use
    return preprocess.check_clausification(p.formula, [step.clause], partial=True)


def _check_definition(ctx: _Context, step: DerivationStep) -> StepVerdict:
    if step.premises:
        return failed("definitions take no premises")
    d = preprocess.definition_record(step.formula)
    if d is None:
        return failed("not a definition of the form p(X..) <=> F, p(X..) => F or F => p(X..)")
    return preprocess.check_definition(d, taken=ctx.problem_symbols)


def _check_naming(ctx: _Context, step: DerivationStep) -> StepVerdict:
    prems = _premises(ctx, step)
    defs = [p for p in prems if ctx.config.routing.get(p.rule) == "definition"]
    rest = [p for p in prems if p not in defs]
    if len(defs) != 1 or len(rest) != 1:
        return failed("naming cites one premise and one definition")
    d = preprocess.definition_record(defs[0].formula)
    if d is None:
        return failed(f"step {defs[0].id} is not a definition")
    return preprocess.check_naming(rest[0].formula, step.formula, d)


# ---------------------------------------------------------------- AVATAR


def _check_avatar_definition(ctx: _Context, step: DerivationStep) -> StepVerdict:
    parsed = avatar.label_definition(step.formula)
    if parsed is None:
        return failed("not a label definition of the form label <=> clause")
    label, comp = parsed
    conflict = ctx.label_conflicts.get(step.id)
    if conflict:
        return failed(conflict)
    if label in ctx.problem_symbols:
        return failed(f"label {label} clashes with a problem symbol")
    if len(avatar.split_clause(comp)) != 1:
        return failed(f"component of {label} is not variable-connected")
    return verified("avatar definition", label=label)


def _label_defs(ctx: _Context, steps: Sequence[DerivationStep]) -> Dict[str, Clause]:
    out = {}
    for s in steps:
        parsed = avatar.label_definition(s.formula)
        if parsed is not None and ctx.label_conflicts.get(s.id) is None:
            out[parsed[0]] = ctx.labels.get(parsed[0])
    return out


def _check_avatar_split(ctx: _Context, step: DerivationStep) -> StepVerdict:
    prems = _premises(ctx, step)
    defs = [p for p in prems if ctx.config.routing.get(p.rule) == "avatar_definition"]
    rest = [p for p in prems if p not in defs]
    if len(rest) != 1 or rest[0].clause is None or step.clause is None:
        return failed("split cites one clause premise plus label definitions")
    return avatar.check_avatar_split(rest[0].clause, step.clause, _label_defs(ctx, defs))


def _check_avatar_component(ctx: _Context, step: DerivationStep) -> StepVerdict:
    p = _single_premise(ctx, step)
    if p is None or step.clause is None:
        return failed("component clause cites exactly one label definition")
    parsed = avatar.label_definition(p.formula)
    if parsed is None:
        return failed(f"premise {p.id} is not a label definition")
    return avatar.check_component_clause(parsed[0], _label_defs(ctx, [p]).get(parsed[0]), step.clause)


def _check_avatar_contradiction(ctx: _Context, step: DerivationStep) -> StepVerdict:
    p = _single_premise(ctx, step)
    if p is None or p.clause is None or step.clause is None:
        return failed("contradiction clause cites exactly one clause")
    return avatar.check_contradiction_clause(p.clause, step.clause)


def _check_avatar_sat(ctx: _Context, step: DerivationStep) -> StepVerdict:
    cs = _clauses(_premises(ctx, step))
    if cs is None or not step.is_false:
        return failed("SAT refutation derives false from propositional clauses")
    return avatar.check_sat_refutation(cs)


def _swap_suffix(m):
    """Exchange the premise suffixes _0 and _1 in the keys of an instantiation."""
    if m is None:
        return None
    out = {}
    for k, t in m.items():
        base, _, i = k.rpartition("_")
        out[f"{base}_{ {'0': '1', '1': '0'}.get(i, i)}"] = t
    return out


def _demod(a: Clause, b: Clause, c: Clause, hint=None, budget=None) -> StepVerdict:
    # premises are listed target-first by convention, but accept either order;
    # instantiations are reported against the listed order
    v = rules.check_demodulation(b, a, c, hint=_swap_suffix(hint), budget=budget)
    if v.ok:
        details = dict(v.details)
        details["instantiation"] = _swap_suffix(details.get("instantiation"))
        return rules.verified(v.reason, **details)
    if v.status == RESOURCE_OUT:
        return v
    w = rules.check_demodulation(a, b, c, hint=hint, budget=budget)
    return w if w.ok or w.status == RESOURCE_OUT else v


_CHECKERS = {
    "input": _check_input,
    "conjecture": _check_conjecture,
    "negated_conjecture": _check_negated_conjecture,
    "superposition": _clause_rule(rules.check_superposition, 2),
    "demodulation": _clause_rule(_demod, 2),
    "resolution": _clause_rule(rules.check_binary_resolution, 2),
    "equality_resolution": _clause_rule(rules.check_equality_resolution, 1),
    "factoring": _clause_rule(rules.check_factoring, 1),
    "equality_factoring": _clause_rule(rules.check_equality_factoring, 1),
    "generic": _check_generic,
    "ennf": _transform("ennf"),
    "nnf": _transform("nnf"),
    "flatten": _transform("flatten"),
    "simplify": _transform("simplify"),
    "rectify": _transform("rectify"),
    "skolemize": _check_skolem,
    "clausify": _check_clausify,
    "definition": _check_definition,
    "naming": _check_naming,
    "avatar_definition": _check_avatar_definition,
    "avatar_split": _check_avatar_split,
    "avatar_component": _check_avatar_component,
    "avatar_contradiction": _check_avatar_contradiction,
    "avatar_sat": _check_avatar_sat,
}

CHECKER_NAMES = tuple(sorted(_CHECKERS))


# ---------------------------------------------------------------- orchestration


def _status(proof: ProofGraph, results: Mapping[str, StepResult]) -> str:
    used = proof.ancestors(proof.sink)
    statuses = [results[s].status for s in used]
    if all(s == VERIFIED for s in statuses) and all(
            results[r].status == VERIFIED for r in used if r in proof.roots):
        return TRUSTED
    if any(s == FAILED for s in statuses):
        return CLAIM_FAILED
    return INCOMPLETE


def replay(problem: TptpProblem, proof: ProofGraph, config: Optional[ReplayConfig] = None,
           problem_name: str = "", proof_name: str = "") -> CheckReport:
    """Check every step (failures do not stop the scan) and aggregate a report."""
    config = config or ReplayConfig()
    ctx = _Context(problem, proof, config)
    order = proof.topological_order()
    if config.jobs > 1:
        # checks only read the graph and the pre-filled label table
        with ThreadPoolExecutor(max_workers=config.jobs) as ex:
            done = list(ex.map(lambda s: check_step(ctx, s), order))
    else:
        done = [check_step(ctx, s) for s in order]
    results = {r.id: r for r in done}
    report = CheckReport(problem_name, proof_name, results, order, proof.sink, proof.roots,
                         _status(proof, results))
    report.assembly = verify_conjecture_assembly(report, problem, proof)
    return report


def verify_conjecture_assembly(report: CheckReport, problem: TptpProblem, proof: ProofGraph) -> Assembly:
    """Which classical reading the refutation licenses, and which inputs it used."""
    used = proof.ancestors(proof.sink)
    used_roots = tuple(s for s in used if s in proof.roots)
    units = []
    negated = False
    for r in used_roots:
        step = proof.steps[r]
        v = report.results[r].verdict
        unit = v.details.get("unit") or step.source_unit
        if step.role == "negated_conjecture" or step.rule == "negated_conjecture":
            negated = True
            conj = _conjecture_unit(proof, step)
            unit = conj or unit
        if unit:
            units.append(unit)
    ok = report.status == TRUSTED
    conjectures = problem.conjectures
    if not conjectures and not any(u.role == "negated_conjecture" for u in problem.units):
        return Assembly(ok, "axiom set unsatisfiable", used_roots, tuple(units))
    if negated:
        return Assembly(ok, "axioms entail conjecture", used_roots, tuple(units))
    return Assembly(ok, "axioms entail conjecture", used_roots, tuple(units), conjecture_independent=True)


def _conjecture_unit(proof: ProofGraph, step: DerivationStep) -> Optional[str]:
    for p in step.premises:
        s = proof.steps.get(p)
        if s is not None and s.role == "conjecture":
            return s.source_unit
    return None
