"""Trusted ground reasoning: congruence closure, EUF entailment and a traced SAT solver.

Everything that ends in a Verified verdict on the semantic path passes through
``check_entailment`` or ``sat_solve``; both are small enough to audit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .terms import App, Clause, Literal, Term, is_ground

DEFAULT_BUDGET = 100_000

TRUE_TERM = App("$true")
PRED_PREFIX = "$p:"


class NonGroundError(ValueError):
    pass


# ---------------------------------------------------------------- congruence closure


@dataclass(frozen=True)
class Consistent:
    classes: Tuple[Tuple[Term, ...], ...]


@dataclass(frozen=True)
class Inconsistent:
    witness: Tuple[Term, Term]


class CongruenceClosure:
    """Union-find over a fixed subterm universe with a congruence (signature) table."""

    def __init__(self) -> None:
        self.ids: Dict[Term, int] = {}
        self.terms: List[Term] = []
        self.parent: List[int] = []
        self.uses: List[List[int]] = []
        self.members: List[List[int]] = []
        self.sig: Dict[Tuple[str, Tuple[int, ...]], int] = {}

    def add(self, t: Term) -> int:
        i = self.ids.get(t)
        if i is not None:
            return i
        if not isinstance(t, App):
            raise NonGroundError(f"variable {t} in kernel input")
        arg_ids = [self.add(a) for a in t.args]
        i = len(self.terms)
        self.ids[t] = i
        self.terms.append(t)
        self.parent.append(i)
        self.uses.append([])
        self.members.append([i])
        for a in arg_ids:
            self.uses[self.find(a)].append(i)
        if t.args:
            key = self._signature(i)
            other = self.sig.get(key)
            if other is None:
                self.sig[key] = i
            else:
                self.merge(i, other)
        return i

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def _signature(self, i: int) -> Tuple[str, Tuple[int, ...]]:
        t = self.terms[i]
        return t.name, tuple(self.find(self.ids[a]) for a in t.args)

    def merge(self, a: int, b: int) -> None:
        pending = [(a, b)]
        while pending:
            x, y = pending.pop()
            rx, ry = self.find(x), self.find(y)
            if rx == ry:
                continue
            if len(self.members[rx]) < len(self.members[ry]):
                rx, ry = ry, rx
            # ry is absorbed into rx; its users may now collide with existing signatures
            moved = self.uses[ry]
            for u in moved:
                old = self._signature(u)
                if self.sig.get(old) == u:
                    del self.sig[old]
            self.parent[ry] = rx
            self.members[rx].extend(self.members[ry])
            self.members[ry] = []
            self.uses[rx].extend(moved)
            self.uses[ry] = []
            for u in moved:
                key = self._signature(u)
                other = self.sig.get(key)
                if other is None:
                    self.sig[key] = u
                elif self.find(other) != self.find(u):
                    pending.append((u, other))

    def equal(self, s: Term, t: Term) -> bool:
        return self.find(self.add(s)) == self.find(self.add(t))

    def classes(self) -> Tuple[Tuple[Term, ...], ...]:
        groups: Dict[int, List[Term]] = {}
        for i, t in enumerate(self.terms):
            groups.setdefault(self.find(i), []).append(t)
        out = [tuple(sorted(g, key=str)) for g in groups.values()]
        return tuple(sorted(out, key=lambda g: str(g[0])))


def congruence_closure(equations: Iterable[Tuple[Term, Term]],
                       disequations: Iterable[Tuple[Term, Term]] = ()) -> Union[Consistent, Inconsistent]:
    cc = CongruenceClosure()
    equations = list(equations)
    disequations = list(disequations)
    for s, t in equations + disequations:
        cc.add(s)
        cc.add(t)
    for s, t in equations:
        cc.merge(cc.ids[s], cc.ids[t])
    for s, t in disequations:
        if cc.equal(s, t):
            return Inconsistent((s, t))
    return Consistent(cc.classes())


# ---------------------------------------------------------------- entailment


@dataclass(frozen=True)
class GroundProblem:
    premises: Tuple[Clause, ...]
    goal: Clause
    budget: int = DEFAULT_BUDGET

    def __post_init__(self) -> None:
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        for c in self.premises + (self.goal,):
            if not is_ground(c):
                raise NonGroundError(f"non-ground clause {c}")


@dataclass(frozen=True)
class Entailed:
    invocations: int = 0


@dataclass(frozen=True)
class NotEntailed:
    assignment: Tuple[Literal, ...]
    classes: Tuple[Tuple[Term, ...], ...]
    invocations: int = 0


@dataclass(frozen=True)
class BudgetExhausted:
    invocations: int = 0


KernelVerdict = Union[Entailed, NotEntailed, BudgetExhausted]


def encode_literal(l: Literal) -> Tuple[bool, Term, Term]:
    """(positive, lhs, rhs): predicates become equations with the distinguished true constant."""
    if l.is_equality:
        return l.positive, l.args[0], l.args[1]
    return l.positive, App(PRED_PREFIX + l.pred, l.args), TRUE_TERM


def evaluate_literal(l: Literal, classes: Sequence[Sequence[Term]]) -> bool:
    """Truth of ``l`` in the quotient model described by ``classes``."""
    where = {t: i for i, g in enumerate(classes) for t in g}
    pos, s, t = encode_literal(l)
    same = s == t or (s in where and t in where and where[s] == where[t])
    return same == pos


def witness_holds(w: NotEntailed, premises: Sequence[Clause], goal: Clause) -> bool:
    """Independent check that a countermodel makes every premise true and the goal false."""
    ok = all(any(evaluate_literal(l, w.classes) for l in c.literals) for c in premises)
    return ok and not any(evaluate_literal(l, w.classes) for l in goal.literals)


class _OutOfBudget(Exception):
    pass


class _Search:
    def __init__(self, clauses: Sequence[Clause], budget: int) -> None:
        self.clauses = [c.literals for c in clauses]
        self.budget = budget
        self.calls = 0

    def closure(self, assumed: Sequence[Literal]):
        self.calls += 1
        if self.calls > self.budget:
            raise _OutOfBudget
        cc = CongruenceClosure()
        cc.add(TRUE_TERM)
        for l in assumed:
            _, s, t = encode_literal(l)
            cc.add(s)
            cc.add(t)
        for lits in self.clauses:
            for l in lits:
                _, s, t = encode_literal(l)
                cc.add(s)
                cc.add(t)
        for l in assumed:
            pos, s, t = encode_literal(l)
            if pos:
                cc.merge(cc.ids[s], cc.ids[t])
        diseq = set()
        for l in assumed:
            pos, s, t = encode_literal(l)
            if not pos:
                a, b = cc.find(cc.ids[s]), cc.find(cc.ids[t])
                if a == b:
                    return None, None
                diseq.add((a, b))
                diseq.add((b, a))
        return cc, diseq

    def run(self, assumed: Tuple[Literal, ...], todo: Tuple[int, ...]):
        cc, diseq = self.closure(assumed)
        if cc is None:
            return None
        rest: List[Tuple[int, List[Literal]]] = []
        for ci in todo:
            open_lits = []
            satisfied = False
            for l in self.clauses[ci]:
                pos, s, t = encode_literal(l)
                a, b = cc.find(cc.ids[s]), cc.find(cc.ids[t])
                if pos:
                    if a == b:
                        satisfied = True
                        break
                    if (a, b) in diseq:
                        continue
                else:
                    if (a, b) in diseq:
                        satisfied = True
                        break
                    if a == b:
                        continue
                open_lits.append(l)
            if satisfied:
                continue
            if not open_lits:
                return None
            rest.append((ci, open_lits))
        if not rest:
            return assumed, cc
        # current quotient already a model of the remaining clauses?
        if all(any(self._true_in(cc, l) for l in lits) for _, lits in rest):
            return assumed, cc
        ci, lits = rest[0]
        remaining = tuple(c for c, _ in rest[1:])
        for l in lits:
            found = self.run(assumed + (l,), remaining)
            if found is not None:
                return found
        return None

    @staticmethod
    def _true_in(cc: CongruenceClosure, l: Literal) -> bool:
        pos, s, t = encode_literal(l)
        return (cc.find(cc.ids[s]) == cc.find(cc.ids[t])) == pos


def check_entailment(p: GroundProblem) -> KernelVerdict:
    """Entailed iff premises plus the negated goal literals are EUF-unsatisfiable."""
    units = tuple(l.negate() for l in p.goal.literals)
    search = _Search(p.premises, p.budget)
    try:
        found = search.run(units, tuple(range(len(p.premises))))
    except _OutOfBudget:
        return BudgetExhausted(search.calls)
    if found is None:
        return Entailed(search.calls)
    assumed, cc = found
    return NotEntailed(assumed, cc.classes(), search.calls)


# ---------------------------------------------------------------- SAT with resolution traces


@dataclass(frozen=True)
class TraceStep:
    """One line of a resolution trace.

    ``kind`` is ``"input"`` (clause copied from the problem) or ``"resolve"``
    (resolvent of steps ``left`` and ``right`` on variable ``pivot``).
    Clauses are sorted tuples of nonzero integers, DIMACS style.
    """
    kind: str
    clause: Tuple[int, ...]
    left: int = -1
    right: int = -1
    pivot: int = 0


@dataclass(frozen=True)
class Unsat:
    trace: Tuple[TraceStep, ...]
    names: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Sat:
    assignment: Dict[int, bool]
    names: Tuple[str, ...] = ()

    def named(self) -> Dict[str, bool]:
        return {self.names[v - 1]: b for v, b in self.assignment.items()} if self.names else {}


class TraceError(ValueError):
    pass


def check_trace(clauses: Iterable[Iterable[int]], trace: Sequence[TraceStep]) -> bool:
    """Validate a resolution refutation step by step; the last step must be the empty clause."""
    inputs = {tuple(sorted(set(c))) for c in clauses}
    if not trace:
        return False
    for i, st in enumerate(trace):
        if st.kind == "input":
            if st.clause not in inputs:
                return False
        elif st.kind == "resolve":
            if not (0 <= st.left < i and 0 <= st.right < i) or st.pivot <= 0:
                return False
            a, b = set(trace[st.left].clause), set(trace[st.right].clause)
            if not (st.pivot in a and -st.pivot in b):
                return False
            resolvent = (a - {st.pivot}) | (b - {-st.pivot})
            if tuple(sorted(resolvent)) != st.clause:
                return False
        else:
            return False
    return trace[-1].clause == ()


def _resolve(a: Tuple[int, ...], b: Tuple[int, ...], var: int) -> Tuple[int, ...]:
    return tuple(sorted((set(a) - {var, -var}) | (set(b) - {var, -var})))


class _Dpll:
    def __init__(self, clauses: Sequence[Tuple[int, ...]]) -> None:
        self.clauses = clauses
        self.steps: List[TraceStep] = []
        self.input_step: Dict[int, int] = {}
        self.assign: Dict[int, bool] = {}
        self.trail: List[Tuple[int, Optional[int]]] = []  # (literal, reason clause index or None)

    def _input(self, ci: int) -> int:
        if ci not in self.input_step:
            self.input_step[ci] = len(self.steps)
            self.steps.append(TraceStep("input", self.clauses[ci]))
        return self.input_step[ci]

    def _value(self, lit: int) -> Optional[bool]:
        v = self.assign.get(abs(lit))
        if v is None:
            return None
        return v == (lit > 0)

    def _set(self, lit: int, reason: Optional[int]) -> None:
        self.assign[abs(lit)] = lit > 0
        self.trail.append((lit, reason))

    def _propagate(self) -> Optional[int]:
        changed = True
        while changed:
            changed = False
            for ci, c in enumerate(self.clauses):
                unassigned = []
                sat = False
                for lit in c:
                    v = self._value(lit)
                    if v is True:
                        sat = True
                        break
                    if v is None:
                        unassigned.append(lit)
                if sat:
                    continue
                if not unassigned:
                    return ci
                if len(unassigned) == 1:
                    self._set(unassigned[0], ci)
                    changed = True
        return None

    def _analyze(self, ci: int) -> int:
        cur = self._input(ci)
        for lit, reason in reversed(self.trail):
            if reason is None or -lit not in self.steps[cur].clause:
                continue
            r = self._input(reason)
            clause = _resolve(self.steps[r].clause, self.steps[cur].clause, abs(lit))
            left, right = (r, cur) if lit > 0 else (cur, r)
            self.steps.append(TraceStep("resolve", clause, left, right, abs(lit)))
            cur = len(self.steps) - 1
        return cur

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            lit, _ = self.trail.pop()
            del self.assign[abs(lit)]

    def search(self):
        """Returns ('sat', None) or ('unsat', step index of a clause over negated decisions)."""
        mark = len(self.trail)
        conflict = self._propagate()
        if conflict is not None:
            res = self._analyze(conflict)
            self._undo(mark)
            return "unsat", res
        var = None
        for c in self.clauses:
            if any(self._value(l) is True for l in c):
                continue
            var = next(abs(l) for l in c if self._value(l) is None)
            break
        if var is None:
            return "sat", None
        dmark = len(self.trail)
        self._set(var, None)
        kind, a = self.search()
        if kind == "sat":
            return kind, None
        self._undo(dmark)
        if -var not in self.steps[a].clause:
            self._undo(mark)
            return "unsat", a
        self._set(-var, None)
        kind, b = self.search()
        if kind == "sat":
            return kind, None
        self._undo(mark)
        if var not in self.steps[b].clause:
            return "unsat", b
        self.steps.append(TraceStep("resolve", _resolve(self.steps[b].clause, self.steps[a].clause, var), b, a, var))
        return "unsat", len(self.steps) - 1

def _prune(steps: Sequence[TraceStep], root: int) -> Tuple[TraceStep, ...]:
    """Keep only steps the root depends on, renumbered in order."""
    needed = set()
    stack = [root]
    while stack:
        i = stack.pop()
        if i in needed:
            continue
        needed.add(i)
        if steps[i].kind == "resolve":
            stack.extend((steps[i].left, steps[i].right))
    index = {old: new for new, old in enumerate(sorted(needed))}
    out = []
    for old in sorted(needed):
        st = steps[old]
        if st.kind == "resolve":
            st = TraceStep("resolve", st.clause, index[st.left], index[st.right], st.pivot)
        out.append(st)
    return tuple(out)


def as_int_cnf(clauses) -> Tuple[List[Tuple[int, ...]], Tuple[str, ...]]:
    clauses = list(clauses)
    if all(isinstance(c, Clause) for c in clauses) and clauses:
        names: Dict[str, int] = {}
        out = []
        for c in clauses:
            if c.assertions or any(l.args or l.is_equality for l in c.literals):
                raise ValueError(f"not a propositional clause: {c}")
            row = []
            for l in c.literals:
                v = names.setdefault(l.pred, len(names) + 1)
                row.append(v if l.positive else -v)
            out.append(tuple(sorted(set(row))))
        return out, tuple(names)
    return [tuple(sorted(set(c))) for c in clauses], ()


def sat_solve(clauses) -> Union[Unsat, Sat]:
    """Decide a propositional CNF given as integer clauses or 0-ary predicate Clauses.

    Unsat results carry a resolution trace that has already passed ``check_trace``.
    """
    cnf, names = as_int_cnf(clauses)
    usable = [c for c in cnf if not any(-l in c for l in c)]
    solver = _Dpll(usable)
    kind, root = solver.search()
    if kind == "sat":
        nvars = max((abs(l) for c in cnf for l in c), default=0)
        model = {v: solver.assign.get(v, False) for v in range(1, nvars + 1)}
        return Sat(model, names)
    trace = _prune(solver.steps, root)
    if not check_trace(usable, trace):
        raise TraceError("solver produced an invalid trace")
    return Unsat(trace, names)


def assignment_satisfies(clauses: Iterable[Iterable[int]], assignment: Mapping[int, bool]) -> bool:
    return all(any(assignment.get(abs(l), False) == (l > 0) for l in c) for c in clauses)


def to_dimacs(clauses: Iterable[Iterable[int]], names: Sequence[str] = ()) -> str:
    clauses = [tuple(c) for c in clauses]
    nvars = max((abs(l) for c in clauses for l in c), default=0)
    lines = [f"c {i} {n}" for i, n in enumerate(names, 1)]
    lines.append(f"p cnf {nvars} {len(clauses)}")
    lines.extend(" ".join(map(str, c + (0,))) for c in clauses)
    return "\n".join(lines) + "\n"
