"""AVATAR splitting: component computation, label bookkeeping, and the propositional endgame."""

from __future__ import annotations

import threading
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import kernel
from .rules import StepVerdict, failed, verified
from .terms import (
    Atom, Clause, Formula, Iff, Literal, clause_equal_mod_sym, formula_to_clause, free_variables,
)

SplitComponent = Clause


def split_clause(c: Clause) -> List[SplitComponent]:
    """Connected components of the literal graph (edge iff two literals share a variable)."""
    lits = c.literals
    parent = list(range(len(lits)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: Dict[str, int] = {}
    for i, l in enumerate(lits):
        for v in free_variables(l):
            if v in owner:
                a, b = find(owner[v]), find(i)
                if a != b:
                    parent[max(a, b)] = min(a, b)
            else:
                owner[v] = i
    groups: Dict[int, List[Literal]] = {}
    for i, l in enumerate(lits):
        groups.setdefault(find(i), []).append(l)
    return [Clause(tuple(g)) for _, g in sorted(groups.items())]


def is_propositional(c: Clause) -> bool:
    return not c.assertions and all(not l.args and not l.is_equality for l in c.literals)


def label_definition(f: Formula) -> Optional[Tuple[str, Clause]]:
    """``label <=> component`` read back as (label, component clause)."""
    if isinstance(f, Iff) and isinstance(f.lhs, Atom) and not f.lhs.args:
        comp = formula_to_clause(f.rhs)
        if comp is not None:
            return f.lhs.pred, comp
    return None


class LabelTable:
    """Global label -> component binding; append-only, first writer wins."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._defs: Dict[str, Clause] = {}
        self._origin: Dict[str, str] = {}

    def define(self, label: str, component: Clause, origin: str = "") -> Optional[str]:
        """Bind ``label``; returns a conflict message when it is already bound to a non-variant."""
        with self._lock:
            old = self._defs.get(label)
            if old is None:
                self._defs[label] = component
                self._origin[label] = origin
                return None
            if clause_equal_mod_sym(old, component):
                return None
            return f"label-reuse: {label} already names {old} (step {self._origin[label]})"

    def get(self, label: str) -> Optional[Clause]:
        return self._defs.get(label)

    def origin(self, label: str) -> Optional[str]:
        return self._origin.get(label)

    def labels(self) -> Tuple[str, ...]:
        return tuple(self._defs)

    def __contains__(self, label: str) -> bool:
        return label in self._defs


def check_avatar_definition(f: Formula, table: LabelTable, origin: str = "",
                            taken: Iterable[str] = ()) -> StepVerdict:
    parsed = label_definition(f)
    if parsed is None:
        return failed("not a label definition of the form label <=> clause")
    label, comp = parsed
    if label in set(taken):
        return failed(f"label {label} clashes with a problem symbol")
    if len(split_clause(comp)) != 1:
        return failed(f"component of {label} is not variable-connected")
    conflict = table.define(label, comp, origin)
    if conflict:
        return failed(conflict)
    return verified("avatar definition", label=label, component=comp)


def check_avatar_split(premise: Clause, conclusion: Clause, label_defs: Mapping[str, Clause]) -> StepVerdict:
    """``premise`` splits into the components named by the positive labels of ``conclusion``."""
    if not is_propositional(conclusion):
        return failed("split clause must be propositional")
    pos = [l.pred for l in conclusion.literals if l.positive]
    neg = {l.pred for l in conclusion.literals if not l.positive}
    if neg != set(premise.assertions):
        return failed("negative labels must be exactly the premise assertions")
    comps = split_clause(Clause(premise.literals))
    if len(comps) != len(set(pos)):
        return failed(f"premise has {len(comps)} components but {len(set(pos))} labels are asserted")
    free = list(dict.fromkeys(pos))
    for comp in comps:
        for lab in free:
            d = label_defs.get(lab)
            if d is not None and clause_equal_mod_sym(d, comp):
                free.remove(lab)
                break
        else:
            return failed(f"no label names component {comp}")
    return verified("avatar split", clause=conclusion)


def check_component_clause(label: str, component: Optional[Clause], conclusion: Clause) -> StepVerdict:
    if component is None:
        return failed(f"label {label} is undefined")
    if conclusion.assertions != frozenset({label}):
        return failed(f"component clause must be asserted under exactly {label}")
    if not clause_equal_mod_sym(Clause(conclusion.literals), component):
        return failed(f"conclusion is not the component named {label}")
    return verified("avatar component")


def check_contradiction_clause(premise: Clause, conclusion: Clause) -> StepVerdict:
    if premise.literals or not premise.assertions:
        return failed("premise must be an empty clause under assertions")
    if not is_propositional(conclusion):
        return failed("conclusion must be propositional")
    want = {(False, a) for a in premise.assertions}
    got = {(l.positive, l.pred) for l in conclusion.literals}
    if got != want:
        return failed("conclusion must negate exactly the premise assertions")
    return verified("avatar contradiction", clause=conclusion)


def check_assertion_propagation(conclusion: Clause, premises: Sequence[Clause],
                                clause_verdict: Optional[StepVerdict] = None) -> StepVerdict:
    """Conclusion assertions must cover every premise assertion; the clause part is checked separately."""
    needed = frozenset().union(*(p.assertions for p in premises)) if premises else frozenset()
    missing = needed - conclusion.assertions
    if missing:
        return failed("dropped-assertion: " + ", ".join(sorted(missing)))
    if clause_verdict is not None:
        return clause_verdict
    return verified("assertions propagated")


def check_sat_refutation(clauses: Sequence[Clause]) -> StepVerdict:
    for c in clauses:
        if not is_propositional(c):
            return failed(f"non-propositional clause in the SAT endgame: {c}")
    out = kernel.sat_solve(clauses)
    if isinstance(out, kernel.Sat):
        return failed("satisfiable", assignment=out.named())
    ints, _ = kernel.as_int_cnf(clauses)
    if not kernel.check_trace(ints, out.trace):
        return failed("resolution trace rejected")
    return verified("propositional refutation", trace=out.trace, names=out.names)
