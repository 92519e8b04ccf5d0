"""Checkers for single saturation inferences.

Each specialized checker rebuilds the inference from its premises (renamed
apart, premise ``i`` gets the variable suffix ``_i``) and accepts when the
reconstructed conclusion is a variant of the claimed one. ``check_generic``
instantiates the premises and asks the ground kernel.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from . import kernel
from .terms import (
    App, Clause, Literal, Term, Var, clause_matchings, compose, dedup_literals, free_variables,
    literal_matches, literal_positions, literal_replace_at, subst_clause, subst_term,
)
from .unify import Unifier, match, unify_literals, unify_pairs

DEFAULT_CONSTANT = "dflt"
CANDIDATE_CAP = 10_000

VERIFIED = "Verified"
FAILED = "Failed"
UNSUPPORTED = "Unsupported"
RESOURCE_OUT = "ResourceOut"


@dataclass(frozen=True)
class StepVerdict:
    status: str
    reason: str = ""
    semantic_only: bool = False
    details: Mapping = field(default_factory=dict, compare=False)

    @property
    def ok(self) -> bool:
        return self.status == VERIFIED


def verified(reason: str = "", semantic_only: bool = False, **details) -> StepVerdict:
    return StepVerdict(VERIFIED, reason, semantic_only, details)


def failed(reason: str, **details) -> StepVerdict:
    return StepVerdict(FAILED, reason, False, details)


def unsupported(rule: str) -> StepVerdict:
    return StepVerdict(UNSUPPORTED, rule)


def resource_out(reason: str) -> StepVerdict:
    return StepVerdict(RESOURCE_OUT, reason)


class OutOfResources(Exception):
    pass


@dataclass
class Budget:
    """Per-step limits: candidate pairs tried, kernel invocations and wall-clock seconds."""
    candidates: int = CANDIDATE_CAP
    kernel: int = kernel.DEFAULT_BUDGET
    seconds: Optional[float] = None
    used: int = 0
    _deadline: Optional[float] = None

    def start(self) -> "Budget":
        self.used = 0
        self._deadline = None if self.seconds is None else time.monotonic() + self.seconds
        return self

    def tick(self) -> None:
        self.used += 1
        if self.used > self.candidates:
            raise OutOfResources(f"more than {self.candidates} candidates")
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise OutOfResources("wall-clock budget exceeded")


def _budget(b: Optional[Budget]) -> Budget:
    return b if b is not None else Budget().start()


def guarded(fn: Callable[..., StepVerdict]) -> Callable[..., StepVerdict]:
    """Turn an exhausted budget into a ResourceOut verdict."""
    def wrapper(*args, **kwargs) -> StepVerdict:
        try:
            return fn(*args, **kwargs)
        except OutOfResources as e:
            return resource_out(str(e))
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ---------------------------------------------------------------- shared plumbing


def standardize(premises: Sequence[Clause]) -> List[Clause]:
    return [subst_clause(c, {v: Var(f"{v}_{i}") for v in free_variables(c)}) for i, c in enumerate(premises)]


def strip(c: Clause) -> Clause:
    return Clause(c.literals)


def _without(lits: Tuple[Literal, ...], *idx: int) -> Tuple[Literal, ...]:
    return tuple(l for i, l in enumerate(lits) if i not in idx)


def _orientations(l: Literal) -> Iterator[Tuple[Term, Term]]:
    a, b = l.args
    yield a, b
    if a != b:
        yield b, a


def instantiation(sigma: Mapping[str, Term], theta: Mapping[str, Term], premise_vars) -> Dict[str, Term]:
    """Premise variable -> term over conclusion variables; unconstrained variables get the default constant."""
    comp = compose(sigma, theta)
    out = {}
    for v in sorted(premise_vars):
        t = comp.get(v, Var(v))
        out[v] = _default_unbound(t, premise_vars)
    return out


def _default_unbound(t: Term, premise_vars) -> Term:
    if isinstance(t, Var):
        return App(DEFAULT_CONSTANT) if t.name in premise_vars else t
    if not t.args:
        return t
    return App(t.name, tuple(_default_unbound(a, premise_vars) for a in t.args))


def _hint_agrees(inst: Mapping[str, Term], hint: Optional[Mapping[str, Term]]) -> bool:
    if not hint:
        return True
    for v, t in hint.items():
        got = inst.get(v)
        if got is None or got == App(DEFAULT_CONSTANT):
            continue
        if got != t:
            return False
    return True


def _accept(result: Clause, conclusion: Clause, sigma: Mapping[str, Term], premise_vars,
            hint: Optional[Mapping[str, Term]]) -> Optional[Dict[str, Term]]:
    """Instantiation witnessing that ``result`` is a variant of ``conclusion`` (agreeing with the hint)."""
    for theta in clause_matchings(result, strip(conclusion), bijective=True):
        inst = instantiation(sigma, theta, premise_vars)
        if _hint_agrees(inst, hint):
            return inst
    return None


def _premise_vars(prems: Sequence[Clause]) -> frozenset:
    out = frozenset()
    for p in prems:
        out |= free_variables(p)
    return out


# ---------------------------------------------------------------- candidate generators
# Each yields (sigma, result clause, description) over standardized premises.


def superposition_candidates(eq_prem: Clause, into_prem: Clause, budget: Budget) -> Iterator[Tuple[dict, Clause, dict]]:
    for li, L in enumerate(eq_prem.literals):
        if not (L.positive and L.is_equality):
            continue
        C = _without(eq_prem.literals, li)
        for l, r in _orientations(L):
            if isinstance(l, Var):
                continue
            for ki, K in enumerate(into_prem.literals):
                D = _without(into_prem.literals, ki)
                for path, sub in literal_positions(K):
                    if isinstance(sub, Var):
                        continue
                    budget.tick()
                    u = unify_pairs([(l, sub)])
                    if not isinstance(u, Unifier):
                        continue
                    new = literal_replace_at(K, path, r)
                    res = subst_clause(Clause((new,) + C + D), u.subst)
                    yield u.subst, res, {"l": l, "r": r, "position": (ki,) + path}


def demodulation_candidates(unit: Clause, target: Clause, budget: Budget) -> Iterator[Tuple[dict, Clause, dict]]:
    if len(unit.literals) != 1 or not (unit.literals[0].positive and unit.literals[0].is_equality):
        return
    for l, r in _orientations(unit.literals[0]):
        if isinstance(l, Var):
            continue
        for ki, K in enumerate(target.literals):
            for path, sub in literal_positions(K):
                if isinstance(sub, Var):
                    continue
                budget.tick()
                m = match(l, sub)
                if not isinstance(m, Unifier):
                    continue
                rr = subst_term(r, m.subst)
                single = Clause(_without(target.literals, ki)[:ki] + (literal_replace_at(K, path, rr),)
                                + _without(target.literals, ki)[ki:])
                yield m.subst, single, {"l": l, "r": r, "position": (ki,) + path}
                everywhere = _rewrite_all(target, sub, rr)
                if everywhere != single:
                    yield m.subst, everywhere, {"l": l, "r": r, "position": (ki,) + path, "all": True}


def _rewrite_all(c: Clause, old: Term, new: Term) -> Clause:
    def go(t: Term) -> Term:
        if t == old:
            return new
        if isinstance(t, App) and t.args:
            return App(t.name, tuple(go(a) for a in t.args))
        return t
    return Clause(tuple(Literal(l.positive, l.pred, tuple(go(a) for a in l.args)) for l in c.literals))


def resolution_candidates(left: Clause, right: Clause, budget: Budget) -> Iterator[Tuple[dict, Clause, dict]]:
    for i, L in enumerate(left.literals):
        for j, K in enumerate(right.literals):
            if L.positive == K.positive or L.pred != K.pred:
                continue
            for Lo in ([L, L.flipped()] if L.is_equality else [L]):
                budget.tick()
                u = unify_literals(Lo, K)
                if not isinstance(u, Unifier):
                    continue
                res = subst_clause(Clause(_without(left.literals, i) + _without(right.literals, j)), u.subst)
                yield u.subst, res, {"literals": (i, j)}


def equality_resolution_candidates(prem: Clause, budget: Budget) -> Iterator[Tuple[dict, Clause, dict]]:
    for i, L in enumerate(prem.literals):
        if L.positive or not L.is_equality:
            continue
        budget.tick()
        u = unify_pairs([L.args])
        if isinstance(u, Unifier):
            yield u.subst, subst_clause(Clause(_without(prem.literals, i)), u.subst), {"literal": i}


def factoring_candidates(prem: Clause, budget: Budget) -> Iterator[Tuple[dict, Clause, dict]]:
    lits = prem.literals
    for i, j in itertools.combinations(range(len(lits)), 2):
        L, K = lits[i], lits[j]
        if L.positive != K.positive or L.pred != K.pred:
            continue
        for Lo in ([L, L.flipped()] if L.is_equality else [L]):
            budget.tick()
            u = unify_literals(Lo, K)
            if isinstance(u, Unifier):
                yield u.subst, subst_clause(Clause(_without(lits, j)), u.subst), {"literals": (i, j)}


def equality_factoring_candidates(prem: Clause, budget: Budget) -> Iterator[Tuple[dict, Clause, dict]]:
    lits = prem.literals
    for i, j in itertools.permutations(range(len(lits)), 2):
        L, K = lits[i], lits[j]
        if not (L.positive and K.positive and L.is_equality and K.is_equality):
            continue
        for l, r in _orientations(L):
            for l2, r2 in _orientations(K):
                budget.tick()
                u = unify_pairs([(l, l2)])
                if not isinstance(u, Unifier):
                    continue
                res = Clause((Literal(True, "=", (l, r)), Literal(False, "=", (r, r2))) + _without(lits, i, j))
                yield u.subst, subst_clause(res, u.subst), {"literals": (i, j)}


# ---------------------------------------------------------------- specialized checkers


def _search(gen: Iterator[Tuple[dict, Clause, dict]], conclusion: Clause, pvars, hint, what: str) -> StepVerdict:
    hint_rejected = False
    for sigma, res, info in gen:
        inst = _accept(res, conclusion, sigma, pvars, hint)
        if inst is not None:
            return verified(what, sigma=sigma, instantiation=inst, **info)
        if hint and _accept(res, conclusion, sigma, pvars, None) is not None:
            hint_rejected = True
    if hint_rejected:
        return failed("recorded bindings do not match any valid instance")
    return failed(f"no {what} instance found")


@guarded
def check_superposition(left: Clause, right: Clause, conclusion: Clause,
                        hint: Optional[Mapping[str, Term]] = None, budget: Optional[Budget] = None) -> StepVerdict:
    """Paramodulation ``l = r | C``, ``L[k] | D`` ⊢ ``(L[r] | C | D)σ`` with ``σ = mgu(l, k)``, either premise order."""
    b = _budget(budget)
    p = standardize([strip(left), strip(right)])
    pvars = _premise_vars(p)
    gen = itertools.chain(superposition_candidates(p[0], p[1], b), superposition_candidates(p[1], p[0], b))
    return _search(gen, conclusion, pvars, hint, "superposition")


@guarded
def check_demodulation(unit_eq: Clause, target: Clause, conclusion: Clause,
                       hint: Optional[Mapping[str, Term]] = None, budget: Optional[Budget] = None) -> StepVerdict:
    """Rewrite ``target`` with a matching instance of the unit equation."""
    b = _budget(budget)
    if len(unit_eq.literals) != 1 or not (unit_eq.literals[0].positive and unit_eq.literals[0].is_equality):
        return failed("demodulator is not a positive unit equality")
    p = standardize([strip(unit_eq), strip(target)])
    pvars = _premise_vars(p)
    # target variables stay rigid: they must reappear unchanged in the conclusion
    return _search(demodulation_candidates(p[0], p[1], b), conclusion, pvars, hint, "demodulation")


@guarded
def check_binary_resolution(left: Clause, right: Clause, conclusion: Clause,
                            hint: Optional[Mapping[str, Term]] = None, budget: Optional[Budget] = None) -> StepVerdict:
    b = _budget(budget)
    p = standardize([strip(left), strip(right)])
    return _search(resolution_candidates(p[0], p[1], b), conclusion, _premise_vars(p), hint, "resolution")


@guarded
def check_equality_resolution(premise: Clause, conclusion: Clause,
                              hint: Optional[Mapping[str, Term]] = None, budget: Optional[Budget] = None) -> StepVerdict:
    b = _budget(budget)
    p = standardize([strip(premise)])
    return _search(equality_resolution_candidates(p[0], b), conclusion, _premise_vars(p), hint, "equality resolution")


@guarded
def check_factoring(premise: Clause, conclusion: Clause,
                    hint: Optional[Mapping[str, Term]] = None, budget: Optional[Budget] = None) -> StepVerdict:
    b = _budget(budget)
    p = standardize([strip(premise)])
    return _search(factoring_candidates(p[0], b), conclusion, _premise_vars(p), hint, "factoring")


@guarded
def check_equality_factoring(premise: Clause, conclusion: Clause,
                             hint: Optional[Mapping[str, Term]] = None, budget: Optional[Budget] = None) -> StepVerdict:
    b = _budget(budget)
    p = standardize([strip(premise)])
    return _search(equality_factoring_candidates(p[0], b), conclusion, _premise_vars(p), hint, "equality factoring")


# ---------------------------------------------------------------- generic instantiate-and-ground


def freeze_name(v: str) -> str:
    return "#" + v


def freeze(c: Clause, names) -> Clause:
    return subst_clause(c, {v: App(freeze_name(v)) for v in names})


def ground_instance(premises: Sequence[Clause], conclusion: Clause, inst: Mapping[str, Term]
                    ) -> Tuple[Tuple[Clause, ...], Clause]:
    """Apply ``inst`` to the standardized premises, default leftover variables, freeze conclusion variables."""
    cvars = free_variables(conclusion)
    pvars = _premise_vars(premises)
    full = {}
    for v in pvars:
        t = inst.get(v, App(DEFAULT_CONSTANT))
        full[v] = _ground_default(t, cvars)
    frozen = {v: App(freeze_name(v)) for v in cvars}
    prem = tuple(subst_clause(subst_clause(p, full), frozen) for p in premises)
    return prem, subst_clause(strip(conclusion), frozen)


def _ground_default(t: Term, keep) -> Term:
    if isinstance(t, Var):
        return t if t.name in keep else App(DEFAULT_CONSTANT)
    if not t.args:
        return t
    return App(t.name, tuple(_ground_default(a, keep) for a in t.args))


def kernel_check(premises: Sequence[Clause], conclusion: Clause, inst: Mapping[str, Term],
                 kernel_budget: int = kernel.DEFAULT_BUDGET) -> kernel.KernelVerdict:
    prem, goal = ground_instance(premises, conclusion, inst)
    return kernel.check_entailment(kernel.GroundProblem(prem, goal, kernel_budget))


def _partial_matchings(pattern: Clause, subject: Clause, limit: int = 64) -> Iterator[Dict[str, Term]]:
    """Matchings of some pattern literals onto subject literals that cover every subject literal."""
    plits = pattern.literals
    slits = dedup_literals(subject.literals)
    count = 0

    def go(i: int, m: Dict[str, Term], hit: frozenset):
        nonlocal count
        if count >= limit:
            return
        if i == len(plits):
            if len(hit) == len(slits):
                count += 1
                yield m
            return
        for j, s in enumerate(slits):
            for m2, _ in literal_matches(plits[i], s, m):
                yield from go(i + 1, m2, hit | {j})
        yield from go(i + 1, m, hit)

    yield from go(0, {}, frozenset())


def _pool_matchings(pattern: Clause, pool: Sequence[Literal], limit: int = 64) -> Iterator[Dict[str, Term]]:
    """Matchings sending every pattern literal onto some literal of ``pool``."""
    plits = pattern.literals
    count = 0

    def go(i: int, m: Dict[str, Term]):
        nonlocal count
        if count >= limit:
            return
        if i == len(plits):
            count += 1
            yield m
            return
        for s in pool:
            for m2, _ in literal_matches(plits[i], s, m):
                yield from go(i + 1, m2)

    yield from go(0, {})


def generic_candidates(prems: Sequence[Clause], conclusion: Clause, budget: Budget) -> Iterator[Dict[str, Term]]:
    """Instantiations worth handing to the kernel, most specific sources first."""
    pvars = _premise_vars(prems)
    concl = strip(conclusion)
    cvars = free_variables(concl)

    def from_results(gen):
        for sigma, res, _ in gen:
            for theta in itertools.islice(clause_matchings(res, concl, bijective=False), 8):
                yield instantiation(sigma, theta, pvars)

    gens = []
    # same variable names as the conclusion
    gens.append(iter([{v: Var(v.rsplit("_", 1)[0]) if v.rsplit("_", 1)[0] in cvars else App(DEFAULT_CONSTANT)
                       for v in pvars}]))
    if len(prems) == 2:
        a, b = prems
        gens += [from_results(superposition_candidates(a, b, budget)),
                 from_results(superposition_candidates(b, a, budget)),
                 from_results(resolution_candidates(a, b, budget)),
                 from_results(demodulation_candidates(a, b, budget)),
                 from_results(demodulation_candidates(b, a, budget))]
    if len(prems) == 1:
        p = prems[0]
        gens += [from_results(equality_resolution_candidates(p, budget)),
                 from_results(factoring_candidates(p, budget)),
                 from_results(equality_factoring_candidates(p, budget))]
    gens.append(_simplification_candidates(prems, concl, pvars, budget))
    for g in gens:
        for inst in g:
            budget.tick()
            yield inst


def _simplification_candidates(prems, concl, pvars, budget) -> Iterator[Dict[str, Term]]:
    # one premise covers the conclusion; the others match into it (possibly with flipped polarity)
    for main_i, main in enumerate(prems):
        for m in _partial_matchings(main, concl):
            budget.tick()
            inst_main = {v: _default_unbound(subst_term(Var(v), m), free_variables(main)) for v in free_variables(main)}
            main_inst = subst_clause(main, inst_main)
            pool = list(main_inst.literals) + [l.negate() for l in main_inst.literals]
            others = [p for i, p in enumerate(prems) if i != main_i]
            for combo in itertools.islice(itertools.product(*[list(_pool_matchings(o, pool)) for o in others]), 64):
                inst = dict(inst_main)
                for m2 in combo:
                    inst.update(m2)
                yield {v: _default_unbound(inst.get(v, Var(v)), pvars) for v in pvars}


@guarded
def check_generic(premises: Sequence[Clause], conclusion: Clause,
                  bindings: Optional[Mapping[str, Term]] = None, budget: Optional[Budget] = None) -> StepVerdict:
    """Instantiate the premises, freeze the conclusion, and require ground entailment.

    With ``bindings`` (keys are standardized premise variables) exactly that instance is
    checked; otherwise a bounded search proposes instances.
    """
    b = _budget(budget)
    prems = standardize([strip(p) for p in premises])
    pvars = _premise_vars(prems)
    if bindings is not None:
        inst = {v: _default_unbound(t, pvars) for v, t in bindings.items()}
        v = kernel_check(prems, conclusion, inst, b.kernel)
        return _kernel_verdict(v, inst)
    seen = set()
    last: Optional[kernel.NotEntailed] = None
    for inst in generic_candidates(prems, conclusion, b):
        key = tuple(sorted((k, str(t)) for k, t in inst.items()))
        if key in seen:
            continue
        seen.add(key)
        v = kernel_check(prems, conclusion, inst, b.kernel)
        if isinstance(v, kernel.Entailed):
            return verified("kernel entailment", instantiation=inst)
        if isinstance(v, kernel.BudgetExhausted):
            return resource_out("kernel budget exhausted")
        last = v
    if last is None:
        return StepVerdict(UNSUPPORTED, "no candidate instantiation found")
    return failed("kernel found a countermodel for every candidate instance", witness=last)


def _kernel_verdict(v: kernel.KernelVerdict, inst) -> StepVerdict:
    if isinstance(v, kernel.Entailed):
        return verified("kernel entailment", instantiation=dict(inst))
    if isinstance(v, kernel.BudgetExhausted):
        return resource_out("kernel budget exhausted")
    return failed("instance not entailed", witness=v)
