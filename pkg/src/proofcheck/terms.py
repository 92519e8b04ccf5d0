"""First-order syntax: terms, literals, clauses, formulas and substitutions.

All values are immutable. Variables are identified by name; a clause's
variables are implicitly universally quantified.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

EQ = "="

SYMBOL_KINDS = ("function", "predicate", "skolem-function", "avatar-label", "definition-predicate")


class CaptureError(ValueError):
    """Substituting into a formula would capture a free variable."""


class ArityError(ValueError):
    pass


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    kind: str = "function"
    origin: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("symbol name must be nonempty")
        if self.arity < 0:
            raise ValueError("negative arity")
        if self.kind not in SYMBOL_KINDS:
            raise ValueError(f"unknown symbol kind {self.kind!r}")


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class App:
    name: str
    args: Tuple["Term", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(map(str, self.args))})"


Term = Union[Var, App]


def const(name: str) -> App:
    return App(name, ())


def fn(name: str, *args: Term) -> App:
    return App(name, tuple(args))


@dataclass(frozen=True, slots=True)
class Literal:
    positive: bool
    pred: str
    args: Tuple[Term, ...] = ()

    @property
    def is_equality(self) -> bool:
        return self.pred == EQ

    def negate(self) -> "Literal":
        return Literal(not self.positive, self.pred, self.args)

    def flipped(self) -> "Literal":
        """Equality literal with its sides swapped."""
        assert self.is_equality
        return Literal(self.positive, EQ, (self.args[1], self.args[0]))

    def __str__(self) -> str:
        if self.is_equality:
            op = "=" if self.positive else "!="
            return f"{self.args[0]} {op} {self.args[1]}"
        body = self.pred if not self.args else f"{self.pred}({','.join(map(str, self.args))})"
        return body if self.positive else "~" + body


def eq(lhs: Term, rhs: Term) -> Literal:
    return Literal(True, EQ, (lhs, rhs))


def neq(lhs: Term, rhs: Term) -> Literal:
    return Literal(False, EQ, (lhs, rhs))


def lit(pred: str, *args: Term, positive: bool = True) -> Literal:
    return Literal(positive, pred, tuple(args))


@dataclass(frozen=True, slots=True)
class Clause:
    literals: Tuple[Literal, ...] = ()
    assertions: frozenset = frozenset()

    @property
    def is_empty(self) -> bool:
        """The empty clause without assertions denotes false."""
        return not self.literals and not self.assertions

    def __len__(self) -> int:
        return len(self.literals)

    def __str__(self) -> str:
        body = " | ".join(map(str, self.literals)) if self.literals else "$false"
        if self.assertions:
            body += " <- " + ",".join(sorted(self.assertions))
        return body


def clause(*literals: Literal, assertions: Iterable[str] = ()) -> Clause:
    return Clause(tuple(literals), frozenset(assertions))


# ---------------------------------------------------------------- formulas


@dataclass(frozen=True, slots=True)
class Truth:
    value: bool

    def __str__(self) -> str:
        return "$true" if self.value else "$false"


TOP = Truth(True)
BOT = Truth(False)


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: Tuple[Term, ...] = ()

    def __str__(self) -> str:
        return str(Literal(True, self.pred, self.args))


@dataclass(frozen=True, slots=True)
class Not:
    arg: "Formula"

    def __str__(self) -> str:
        return f"~({self.arg})"


@dataclass(frozen=True, slots=True)
class And:
    args: Tuple["Formula", ...]

    def __str__(self) -> str:
        return "(" + " & ".join(map(str, self.args)) + ")"


@dataclass(frozen=True, slots=True)
class Or:
    args: Tuple["Formula", ...]

    def __str__(self) -> str:
        return "(" + " | ".join(map(str, self.args)) + ")"


@dataclass(frozen=True, slots=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"

    def __str__(self) -> str:
        return f"({self.lhs} => {self.rhs})"


@dataclass(frozen=True, slots=True)
class Iff:
    lhs: "Formula"
    rhs: "Formula"

    def __str__(self) -> str:
        return f"({self.lhs} <=> {self.rhs})"


@dataclass(frozen=True, slots=True)
class Xor:
    lhs: "Formula"
    rhs: "Formula"

    def __str__(self) -> str:
        return f"({self.lhs} <~> {self.rhs})"


@dataclass(frozen=True, slots=True)
class Forall:
    var: str
    body: "Formula"

    def __str__(self) -> str:
        return f"![{self.var}]: {self.body}"


@dataclass(frozen=True, slots=True)
class Exists:
    var: str
    body: "Formula"

    def __str__(self) -> str:
        return f"?[{self.var}]: {self.body}"


Formula = Union[Truth, Atom, Not, And, Or, Implies, Iff, Xor, Forall, Exists]
Quantifier = (Forall, Exists)
BINARY = (Implies, Iff, Xor)


def forall(vars: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(vars)):
        body = Forall(v, body)
    return body


def exists(vars: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(vars)):
        body = Exists(v, body)
    return body


def literal_formula(l: Literal) -> Formula:
    a = Atom(l.pred, l.args)
    return a if l.positive else Not(a)


def children(f: Formula) -> Tuple[Formula, ...]:
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, BINARY):
        return (f.lhs, f.rhs)
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, Quantifier):
        return (f.body,)
    return ()


def rebuild(f: Formula, kids: Tuple[Formula, ...]) -> Formula:
    if isinstance(f, And):
        return And(kids)
    if isinstance(f, Or):
        return Or(kids)
    if isinstance(f, BINARY):
        return type(f)(kids[0], kids[1])
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, Quantifier):
        return type(f)(f.var, kids[0])
    return f


# ---------------------------------------------------------------- traversal


def term_vars(t: Term) -> Iterator[str]:
    if isinstance(t, Var):
        yield t.name
    else:
        for a in t.args:
            yield from term_vars(a)


def ordered_vars(x) -> Tuple[str, ...]:
    """Free variables in order of first occurrence (left to right)."""
    seen: Dict[str, None] = {}
    for v in _iter_free(x, frozenset()):
        seen.setdefault(v, None)
    return tuple(seen)


def _iter_free(x, bound: frozenset) -> Iterator[str]:
    if isinstance(x, (Var, App)):
        for v in term_vars(x):
            if v not in bound:
                yield v
    elif isinstance(x, (Literal, Atom)):
        for a in x.args:
            yield from _iter_free(a, bound)
    elif isinstance(x, Clause):
        for l in x.literals:
            yield from _iter_free(l, bound)
    elif isinstance(x, Quantifier):
        yield from _iter_free(x.body, bound | {x.var})
    elif isinstance(x, Truth):
        return
    else:
        for c in children(x):
            yield from _iter_free(c, bound)


def free_variables(x) -> frozenset:
    return frozenset(_iter_free(x, frozenset()))


def is_ground(x) -> bool:
    return not free_variables(x)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def positions(t: Term, prefix: Tuple[int, ...] = ()) -> Iterator[Tuple[Tuple[int, ...], Term]]:
    yield prefix, t
    if isinstance(t, App):
        for i, a in enumerate(t.args):
            yield from positions(a, prefix + (i,))


def literal_positions(l: Literal) -> Iterator[Tuple[Tuple[int, ...], Term]]:
    """Positions of all subterms of a literal; the first path index selects the argument."""
    for i, a in enumerate(l.args):
        yield from positions(a, (i,))


def term_at(t: Term, path: Tuple[int, ...]) -> Term:
    for i in path:
        t = t.args[i]
    return t


def replace_at(t: Term, path: Tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    i, rest = path[0], path[1:]
    args = list(t.args)
    args[i] = replace_at(args[i], rest, new)
    return App(t.name, tuple(args))


def literal_replace_at(l: Literal, path: Tuple[int, ...], new: Term) -> Literal:
    args = list(l.args)
    args[path[0]] = replace_at(args[path[0]], path[1:], new)
    return Literal(l.positive, l.pred, tuple(args))


def signature(x, out: Optional[Dict[Tuple[str, str], int]] = None) -> Dict[Tuple[str, str], int]:
    """Map (kind, name) -> arity for every function/predicate symbol, kind in {'fn','pred'}."""
    if out is None:
        out = {}

    def visit_term(t: Term) -> None:
        if isinstance(t, App):
            out.setdefault(("fn", t.name), len(t.args))
            for a in t.args:
                visit_term(a)

    def visit(y) -> None:
        if isinstance(y, (Var, App)):
            visit_term(y)
        elif isinstance(y, (Literal, Atom)):
            if y.pred != EQ:
                out.setdefault(("pred", y.pred), len(y.args))
            for a in y.args:
                visit_term(a)
        elif isinstance(y, Clause):
            for l in y.literals:
                visit(l)
            for a in y.assertions:
                out.setdefault(("pred", a), 0)
        else:
            for c in children(y):
                visit(c)

    visit(x)
    return out


def validate(x) -> None:
    """Deep arity check: every symbol is used with a single arity throughout ``x``."""
    seen: Dict[Tuple[str, str], int] = {}

    def note(kind: str, name: str, n: int) -> None:
        if seen.setdefault((kind, name), n) != n:
            raise ArityError(f"{name} used with arities {seen[(kind, name)]} and {n}")

    def visit_term(t: Term) -> None:
        if isinstance(t, App):
            note("fn", t.name, len(t.args))
            for a in t.args:
                visit_term(a)

    def visit(y) -> None:
        if isinstance(y, (Var, App)):
            visit_term(y)
        elif isinstance(y, (Literal, Atom)):
            if y.pred == EQ:
                if len(y.args) != 2:
                    raise ArityError("equality needs exactly two sides")
            else:
                note("pred", y.pred, len(y.args))
            for a in y.args:
                visit_term(a)
        elif isinstance(y, Clause):
            for l in y.literals:
                visit(l)
        else:
            for c in children(y):
                visit(c)

    visit(x)


# ---------------------------------------------------------------- substitutions

Substitution = Dict[str, Term]


def subst_term(t: Term, s: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return s.get(t.name, t)
    if not t.args:
        return t
    return App(t.name, tuple(subst_term(a, s) for a in t.args))


def subst_literal(l: Literal, s: Mapping[str, Term]) -> Literal:
    return Literal(l.positive, l.pred, tuple(subst_term(a, s) for a in l.args))


def subst_clause(c: Clause, s: Mapping[str, Term]) -> Clause:
    return Clause(tuple(subst_literal(l, s) for l in c.literals), c.assertions)


def subst_formula(f: Formula, s: Mapping[str, Term]) -> Formula:
    """Capture-avoiding check: raises CaptureError instead of renaming."""
    if isinstance(f, Truth):
        return f
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(subst_term(a, s) for a in f.args))
    if isinstance(f, Quantifier):
        inner = {k: v for k, v in s.items() if k != f.var}
        if any(f.var in free_variables(v) and k in free_variables(f.body) for k, v in inner.items()):
            raise CaptureError(f"substitution would capture {f.var}")
        return type(f)(f.var, subst_formula(f.body, inner))
    return rebuild(f, tuple(subst_formula(c, s) for c in children(f)))


def apply_substitution(x, s: Mapping[str, Term]):
    if not s:
        return x
    if isinstance(x, (Var, App)):
        return subst_term(x, s)
    if isinstance(x, Literal):
        return subst_literal(x, s)
    if isinstance(x, Clause):
        return subst_clause(x, s)
    return subst_formula(x, s)


def normalize(s: Mapping[str, Term]) -> Substitution:
    """Resolve a triangular substitution into idempotent form, dropping identity bindings."""
    out: Substitution = {}
    for k in s:
        t = s[k]
        # chase bindings until fixpoint; terminates since occurs check keeps s acyclic
        while True:
            t2 = subst_term(t, s)
            if t2 == t:
                break
            t = t2
        if t != Var(k):
            out[k] = t
    return out


def compose(first: Mapping[str, Term], second: Mapping[str, Term]) -> Substitution:
    """Substitution equivalent to applying ``first`` and then ``second``."""
    out = {k: subst_term(v, second) for k, v in first.items()}
    for k, v in second.items():
        out.setdefault(k, v)
    return {k: v for k, v in out.items() if v != Var(k)}


def fresh_name(base: str, taken) -> str:
    if base not in taken:
        return base
    for i in itertools.count(1):
        cand = f"{base}_{i}"
        if cand not in taken:
            return cand
    raise AssertionError


def rename_clause(c: Clause, suffix: str) -> Clause:
    return subst_clause(c, {v: Var(v + suffix) for v in free_variables(c)})


def rename_apart(c1: Clause, c2: Clause) -> Tuple[Clause, Clause]:
    """Rename variables of ``c2`` that clash with ``c1``; ``c1`` is returned unchanged."""
    v1 = free_variables(c1)
    v2 = free_variables(c2)
    taken = set(v1 | v2)
    ren: Dict[str, Term] = {}
    for v in sorted(v2 & v1):
        new = fresh_name(v + "'", taken)
        taken.add(new)
        ren[v] = Var(new)
    return c1, subst_clause(c2, ren)


# ---------------------------------------------------------------- clause comparison


def term_key(t: Term) -> str:
    return str(t)


def canonical_literal(l: Literal) -> Literal:
    """Equality sides put in a fixed order; used only for deduplication."""
    if l.is_equality and term_key(l.args[1]) < term_key(l.args[0]):
        return l.flipped()
    return l


def dedup_literals(lits: Iterable[Literal]) -> Tuple[Literal, ...]:
    out: Dict[Literal, Literal] = {}
    for l in lits:
        out.setdefault(canonical_literal(l), l)
    return tuple(out.values())


def _match_into(p: Term, s: Term, m: Dict[str, Term], inv: Optional[Dict[str, str]]) -> bool:
    """Extend ``m`` so that p·m == s. With ``inv`` the map must be a variable bijection."""
    if isinstance(p, Var):
        if inv is not None and not isinstance(s, Var):
            return False
        bound = m.get(p.name)
        if bound is not None:
            return bound == s
        if inv is not None:
            if s.name in inv:
                return False
            inv[s.name] = p.name
        m[p.name] = s
        return True
    if not isinstance(s, App) or p.name != s.name or len(p.args) != len(s.args):
        return False
    return all(_match_into(a, b, m, inv) for a, b in zip(p.args, s.args))


def _literal_orientations(l: Literal) -> Tuple[Literal, ...]:
    if l.is_equality and l.args[0] != l.args[1]:
        return (l, l.flipped())
    return (l,)


def literal_matches(p: Literal, s: Literal, m: Dict[str, Term], inv: Optional[Dict[str, str]] = None
                    ) -> Iterator[Tuple[Dict[str, Term], Optional[Dict[str, str]]]]:
    """All extensions of ``m`` matching literal ``p`` onto ``s`` (both equality orientations)."""
    if p.positive != s.positive or p.pred != s.pred or len(p.args) != len(s.args):
        return
    for q in _literal_orientations(p):
        m2 = dict(m)
        inv2 = dict(inv) if inv is not None else None
        if all(_match_into(a, b, m2, inv2) for a, b in zip(q.args, s.args)):
            yield m2, inv2


def clause_matchings(pattern: Clause, subject: Clause, bijective: bool = True,
                     init: Optional[Mapping[str, Term]] = None) -> Iterator[Dict[str, Term]]:
    """Substitutions m with pattern·m equal to ``subject`` modulo order, equality symmetry and duplicates.

    With ``bijective`` the substitution is a variable renaming (variant check); otherwise
    ``subject`` variables are rigid and pattern variables may bind to arbitrary terms.
    Assertions are not consulted.
    """
    plits = dedup_literals(pattern.literals)
    slits = dedup_literals(subject.literals)
    m0 = dict(init or {})
    inv0: Optional[Dict[str, str]] = None
    if bijective:
        if len(plits) != len(slits):
            return
        inv0 = {}
        for k, v in m0.items():
            if not isinstance(v, Var) or v.name in inv0:
                return
            inv0[v.name] = k
    if not bijective and not plits:
        if not slits:
            yield m0
        return
    yield from _cover(plits, slits, m0, inv0, bijective)


def _cover(plits, slits, m, inv, bijective):
    # bijective: perfect matching between literal lists
    # otherwise: every subject literal is the image of some pattern literal and
    # every pattern literal lands on some subject literal
    if bijective:
        yield from _perfect(plits, list(slits), m, inv)
        return
    yield from _surject(plits, slits, 0, m, frozenset())


def _perfect(plits, remaining, m, inv):
    if not plits:
        yield m
        return
    first, rest = plits[0], plits[1:]
    tried = set()
    for j, s in enumerate(remaining):
        for m2, inv2 in literal_matches(first, s, m, inv):
            key = (j, tuple(sorted((k, str(v)) for k, v in m2.items())))
            if key in tried:
                continue
            tried.add(key)
            yield from _perfect(rest, remaining[:j] + remaining[j + 1:], m2, inv2)


def _surject(plits, slits, i, m, hit):
    if i == len(plits):
        if len(hit) == len(slits):
            yield m
        return
    # prune: not enough pattern literals left to cover the subject
    if len(slits) - len(hit) > len(plits) - i:
        return
    for j, s in enumerate(slits):
        for m2, _ in literal_matches(plits[i], s, m, None):
            yield from _surject(plits, slits, i + 1, m2, hit | {j})


def clause_equal_mod_sym(c1: Clause, c2: Clause) -> bool:
    """Equality up to literal order, equality orientation, variable renaming and duplicates."""
    if c1.assertions != c2.assertions:
        return False
    return next(clause_matchings(c1, c2, bijective=True), None) is not None


# ---------------------------------------------------------------- clause/formula bridges


def clause_to_formula(c: Clause, close: bool = True) -> Formula:
    if not c.literals:
        body: Formula = BOT
    elif len(c.literals) == 1:
        body = literal_formula(c.literals[0])
    else:
        body = Or(tuple(literal_formula(l) for l in c.literals))
    return forall(ordered_vars(c), body) if close else body


def strip_universals(f: Formula) -> Formula:
    while isinstance(f, Forall):
        f = f.body
    return f


def formula_literal(f: Formula) -> Optional[Literal]:
    if isinstance(f, Atom):
        return Literal(True, f.pred, f.args)
    if isinstance(f, Not) and isinstance(f.arg, Atom):
        return Literal(False, f.arg.pred, f.arg.args)
    return None


def formula_to_clause(f: Formula) -> Optional[Clause]:
    """Read a (universally closed) disjunction of literals as a clause, else None."""
    f = strip_universals(f)
    if f == BOT:
        return Clause()
    parts = f.args if isinstance(f, Or) else (f,)
    lits = []
    for p in parts:
        if p == BOT:
            continue
        l = formula_literal(p)
        if l is None:
            return None
        lits.append(l)
    return Clause(tuple(lits))
