"""Checkers for the formula-level preprocessing pipeline.

Formula transformations are replayed with our own outermost-first rewriting
and compared up to bound-variable renaming and equality orientation. When the
replay disagrees, a finite-model screen may still accept the step, flagged as
semantic-only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import semantics
from .rules import StepVerdict, failed, unsupported, verified
from .terms import (
    BOT, EQ, TOP, And, App, Atom, CaptureError, Clause, Exists, Forall, Formula, Iff, Implies,
    Literal, Not, Or, Term, Truth, Var, Xor, canonical_literal, children, clause_equal_mod_sym,
    dedup_literals, formula_to_clause, free_variables, rebuild, signature, subst_formula, subst_term,
)

TRANSFORM_KINDS = ("ennf", "nnf", "flatten", "simplify", "rectify")


# ---------------------------------------------------------------- rewriting


def _ennf_root(f: Formula) -> Optional[Formula]:
    if isinstance(f, Implies):
        return Or((Not(f.lhs), f.rhs))
    if not isinstance(f, Not):
        return None
    g = f.arg
    if isinstance(g, Not):
        return g.arg
    if isinstance(g, Truth):
        return Truth(not g.value)
    if isinstance(g, And):
        return Or(tuple(Not(a) for a in g.args))
    if isinstance(g, Or):
        return And(tuple(Not(a) for a in g.args))
    if isinstance(g, Implies):
        return And((g.lhs, Not(g.rhs)))
    if isinstance(g, Iff):
        return Xor(g.lhs, g.rhs)
    if isinstance(g, Xor):
        return Iff(g.lhs, g.rhs)
    if isinstance(g, Forall):
        return Exists(g.var, Not(g.body))
    if isinstance(g, Exists):
        return Forall(g.var, Not(g.body))
    return None


def _nnf_root(f: Formula) -> Optional[Formula]:
    if isinstance(f, Iff):
        return And((Or((Not(f.lhs), f.rhs)), Or((f.lhs, Not(f.rhs)))))
    if isinstance(f, Xor):
        return And((Or((f.lhs, f.rhs)), Or((Not(f.lhs), Not(f.rhs)))))
    return _ennf_root(f)


def _outermost(f: Formula, root_rule) -> Formula:
    while True:
        g = root_rule(f)
        if g is None:
            break
        f = g
    kids = children(f)
    if not kids:
        return f
    return rebuild(f, tuple(_outermost(k, root_rule) for k in kids))


def ennf(f: Formula) -> Formula:
    """Push negations to atoms; eliminate implications; keep ↔ and ⊕."""
    return _outermost(f, _ennf_root)


def nnf(f: Formula) -> Formula:
    return _outermost(f, _nnf_root)


def flatten(f: Formula) -> Formula:
    kids = tuple(flatten(k) for k in children(f))
    if isinstance(f, (And, Or)):
        merged: List[Formula] = []
        for k in kids:
            merged.extend(k.args if type(k) is type(f) else (k,))
        return type(f)(tuple(merged))
    return rebuild(f, kids) if kids else f


def simplify(f: Formula) -> Formula:
    """Bottom-up elimination of $true/$false and trivial equalities."""
    if isinstance(f, Atom):
        if f.pred == EQ and f.args[0] == f.args[1]:
            return TOP
        return f
    if isinstance(f, Truth):
        return f
    kids = tuple(simplify(k) for k in children(f))
    if isinstance(f, Not):
        k = kids[0]
        return Truth(not k.value) if isinstance(k, Truth) else Not(k)
    if isinstance(f, (And, Or)):
        unit, zero = (TOP, BOT) if isinstance(f, And) else (BOT, TOP)
        if zero in kids:
            return zero
        rest = tuple(k for k in kids if k != unit)
        if not rest:
            return unit
        return rest[0] if len(rest) == 1 else type(f)(rest)
    if isinstance(f, Implies):
        a, b = kids
        if a == BOT or b == TOP:
            return TOP
        if a == TOP:
            return b
        if b == BOT:
            return Not(a) if not isinstance(a, Truth) else Truth(not a.value)
        return Implies(a, b)
    if isinstance(f, (Iff, Xor)):
        a, b = kids
        same = isinstance(f, Iff)
        for x, y in ((a, b), (b, a)):
            if isinstance(x, Truth):
                keep = x.value == same
                if isinstance(y, Truth):
                    return Truth(y.value if keep else not y.value)
                return y if keep else Not(y)
        return type(f)(a, b)
    if isinstance(f, (Forall, Exists)):
        b = kids[0]
        return b if isinstance(b, Truth) else type(f)(f.var, b)
    return rebuild(f, kids)


def _binders(f: Formula) -> Iterable[str]:
    if isinstance(f, (Forall, Exists)):
        yield f.var
    for k in children(f):
        yield from _binders(k)


def rectify(f: Formula, prefix: str = "X") -> Formula:
    """Give every binder its own name, numbered in binding (preorder) order, avoiding free names."""
    taken = set(free_variables(f))
    counter = itertools.count()

    def fresh() -> str:
        while True:
            n = f"{prefix}{next(counter)}"
            if n not in taken:
                return n

    def go(g: Formula, ren: Dict[str, Term]) -> Formula:
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(subst_term(a, ren) for a in g.args))
        if isinstance(g, (Forall, Exists)):
            n = fresh()
            return type(g)(n, go(g.body, {**ren, g.var: Var(n)}))
        kids = children(g)
        return rebuild(g, tuple(go(k, ren) for k in kids)) if kids else g

    return go(f, {})


def is_rectified(f: Formula) -> bool:
    names = list(_binders(f))
    return len(names) == len(set(names)) and not (set(names) & free_variables(f))


def drop_vacuous(f: Formula) -> Formula:
    if isinstance(f, (Forall, Exists)):
        body = drop_vacuous(f.body)
        return body if f.var not in free_variables(body) else type(f)(f.var, body)
    kids = children(f)
    return rebuild(f, tuple(drop_vacuous(k) for k in kids)) if kids else f


_TRANSFORMS = {"ennf": ennf, "nnf": nnf, "flatten": flatten, "simplify": simplify}


def transform(f: Formula, kind: str) -> Formula:
    if kind == "rectify":
        return rectify(f)
    return _TRANSFORMS[kind](f)


# ---------------------------------------------------------------- alpha-equivalence


def _term_eq(a: Term, b: Term, ma: Mapping[str, int], mb: Mapping[str, int]) -> bool:
    if isinstance(a, Var) and isinstance(b, Var):
        ia, ib = ma.get(a.name), mb.get(b.name)
        if ia is None and ib is None:
            return a.name == b.name
        return ia == ib
    if isinstance(a, App) and isinstance(b, App):
        return (a.name == b.name and len(a.args) == len(b.args)
                and all(_term_eq(x, y, ma, mb) for x, y in zip(a.args, b.args)))
    return False


def alpha_equal(f: Formula, g: Formula, orient: bool = True) -> bool:
    """Equality up to bound-variable renaming, and (if ``orient``) equality orientation."""
    def go(f, g, ma, mb, depth) -> bool:
        if type(f) is not type(g):
            return False
        if isinstance(f, Truth):
            return f == g
        if isinstance(f, Atom):
            if f.pred != g.pred or len(f.args) != len(g.args):
                return False
            if all(_term_eq(x, y, ma, mb) for x, y in zip(f.args, g.args)):
                return True
            return (orient and f.pred == EQ and _term_eq(f.args[0], g.args[1], ma, mb)
                    and _term_eq(f.args[1], g.args[0], ma, mb))
        if isinstance(f, (Forall, Exists)):
            return go(f.body, g.body, {**ma, f.var: depth}, {**mb, g.var: depth}, depth + 1)
        fk, gk = children(f), children(g)
        return len(fk) == len(gk) and all(go(x, y, ma, mb, depth) for x, y in zip(fk, gk))

    return go(f, g, {}, {}, 0)


def same_statement(f: Formula, g: Formula) -> bool:
    """Alpha-equality, or clause equality when both sides have clause shape."""
    if alpha_equal(f, g):
        return True
    cf, cg = formula_to_clause(f), formula_to_clause(g)
    if cf is not None and cg is not None:
        return clause_equal_mod_sym(cf, cg)
    return False


def as_formula(x) -> Formula:
    if isinstance(x, Clause):
        from .terms import clause_to_formula
        return clause_to_formula(x)
    return x


# ---------------------------------------------------------------- formula transforms


def check_formula_transform(premise, conclusion, kind: str, screen: bool = True) -> StepVerdict:
    if kind not in TRANSFORM_KINDS:
        return unsupported(f"transformation {kind}")
    p, c = as_formula(premise), as_formula(conclusion)
    if same_statement(p, c):
        return verified("identity")
    out = transform(p, kind)
    if kind == "rectify":
        if not is_rectified(c):
            return failed("conclusion is not rectified")
        if same_statement(out, c) or same_statement(drop_vacuous(out), c):
            return verified(kind)
    elif same_statement(out, c):
        return verified(kind)
    # our rule set and the prover's may diverge; the screen decides
    if screen:
        agree = semantics.agree_on_small_models(p, c)
        if agree is True:
            return verified(f"{kind}: equivalent on all models up to size {semantics.MAX_DOMAIN}",
                            semantic_only=True)
        if agree is False:
            return failed(f"{kind}: premise and conclusion differ on a small model")
    return failed(f"{kind}: replay gives {out}, which differs from the conclusion")


# ---------------------------------------------------------------- Skolemization


@dataclass(frozen=True)
class SkolemEntry:
    var: str
    symbol: str
    args: Optional[Tuple[str, ...]] = None  # None: use the binding context


SkolemMap = Tuple[SkolemEntry, ...]


class _SkolemFailure(Exception):
    pass


def skolemize(f: Formula, smap: Sequence[SkolemEntry]) -> Tuple[Formula, List[Tuple[SkolemEntry, Tuple[str, ...]]]]:
    """Replace existentials per ``smap`` (consumed in binding order) and drop their quantifiers.

    Returns the result and, per entry, the argument list actually used.
    """
    pending = list(smap)
    used: List[Tuple[SkolemEntry, Tuple[str, ...]]] = []

    def take(v: str) -> SkolemEntry:
        for i, e in enumerate(pending):
            if e.var == v:
                return pending.pop(i)
        raise _SkolemFailure(f"no Skolem symbol for existential {v}")

    def go(g: Formula, ctx: Tuple[str, ...], ren: Dict[str, Term]) -> Formula:
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(subst_term(a, ren) for a in g.args))
        if isinstance(g, Truth):
            return g
        if isinstance(g, Forall):
            inner = {k: v for k, v in ren.items() if k != g.var}
            return Forall(g.var, go(g.body, ctx + (g.var,), inner))
        if isinstance(g, Exists):
            e = take(g.var)
            args = ctx if e.args is None else e.args
            used.append((e, args))
            return go(g.body, ctx, {**ren, g.var: App(e.symbol, tuple(Var(a) for a in args))})
        if isinstance(g, (And, Or)):
            return type(g)(tuple(go(k, ctx, ren) for k in g.args))
        if any(isinstance(x, (Forall, Exists)) for x in subformulas(g)):
            raise _SkolemFailure("premise is not in negation normal form")
        return _rename_qf(g, ren)

    out = go(f, (), {})
    if pending:
        raise _SkolemFailure("unused Skolem entries: " + ", ".join(e.symbol for e in pending))
    return out, used


def subformulas(f: Formula) -> Iterable[Formula]:
    yield f
    for k in children(f):
        yield from subformulas(k)


def _rename_qf(g: Formula, ren: Mapping[str, Term]) -> Formula:
    if isinstance(g, Atom):
        return Atom(g.pred, tuple(subst_term(a, ren) for a in g.args))
    kids = children(g)
    return rebuild(g, tuple(_rename_qf(k, ren) for k in kids)) if kids else g


def _context_of(f: Formula, smap: Sequence[SkolemEntry]) -> Dict[int, Tuple[str, ...]]:
    """Binding context (enclosing universals) of each map entry, by position in the map."""
    probe = [SkolemEntry(e.var, e.symbol, None) for e in smap]
    _, used = skolemize(f, probe)
    return {probe.index(e): args for e, args in used}


def check_skolemization(premise, conclusion, smap: Sequence[SkolemEntry],
                        taken: Iterable[str] = ()) -> StepVerdict:
    """Each existential becomes its Skolem symbol applied to all enclosing universals, in binding order."""
    p, c = as_formula(premise), as_formula(conclusion)
    sig = {n for (_, n) in signature(p)} | set(taken)
    for e in smap:
        if e.symbol in sig:
            return failed(f"Skolem symbol {e.symbol} is not fresh")
    if len({e.symbol for e in smap}) != len(smap):
        return failed("Skolem symbol used for two existentials")
    try:
        ctx = _context_of(p, smap)
    except _SkolemFailure as err:
        return failed(str(err))
    for i, e in enumerate(smap):
        if e.args is not None and tuple(e.args) != ctx[i]:
            if sorted(e.args) == sorted(ctx[i]):
                return failed(f"ordering-mismatch: {e.symbol} takes ({', '.join(ctx[i])})")
            return failed(f"{e.symbol} must take exactly the bound variables ({', '.join(ctx[i])})")
    result, _ = skolemize(p, smap)
    if same_statement(result, c):
        return verified("skolemization")
    # diagnose argument permutations
    permutable = [i for i, e in enumerate(smap) if len(ctx[i]) > 1]
    choices = [list(itertools.permutations(ctx[i])) for i in permutable]
    for combo in itertools.islice(itertools.product(*choices), 720):
        alt = list(smap)
        for i, args in zip(permutable, combo):
            alt[i] = SkolemEntry(smap[i].var, smap[i].symbol, tuple(args))
        if same_statement(skolemize(p, alt)[0], c):
            return failed("ordering-mismatch: Skolem arguments are permuted relative to binding order")
    return failed("conclusion is not the Skolemized premise")


# ---------------------------------------------------------------- naming


POLARITIES = ("iff", "implies", "implied")


@dataclass(frozen=True)
class DefinitionRecord:
    """``symbol(args) <=> body`` (iff), ``symbol(args) => body`` (implies) or ``body => symbol(args)`` (implied)."""
    symbol: str
    args: Tuple[str, ...]
    body: Formula
    polarity: str = "iff"

    def formula(self) -> Formula:
        head = Atom(self.symbol, tuple(Var(a) for a in self.args))
        if self.polarity == "iff":
            g: Formula = Iff(head, self.body)
        elif self.polarity == "implies":
            g = Implies(head, self.body)
        else:
            g = Implies(self.body, head)
        for v in reversed(self.args):
            g = Forall(v, g)
        return g


def definition_record(f: Formula) -> Optional[DefinitionRecord]:
    """Read a closed definition formula back into a record."""
    g = f
    while isinstance(g, Forall):
        g = g.body

    def head(x: Formula) -> Optional[Tuple[str, Tuple[str, ...]]]:
        if isinstance(x, Atom) and x.pred != EQ and all(isinstance(a, Var) for a in x.args):
            names = tuple(a.name for a in x.args)
            if len(set(names)) == len(names):
                return x.pred, names
        return None

    if isinstance(g, Iff) and head(g.lhs):
        (s, a), pol, body = head(g.lhs), "iff", g.rhs
    elif isinstance(g, Implies) and head(g.lhs):
        (s, a), pol, body = head(g.lhs), "implies", g.rhs
    elif isinstance(g, Implies) and head(g.rhs):
        (s, a), pol, body = head(g.rhs), "implied", g.lhs
    else:
        return None
    return DefinitionRecord(s, a, body, pol)


def check_definition(d: DefinitionRecord, taken: Iterable[str] = ()) -> StepVerdict:
    if d.polarity not in POLARITIES:
        return failed(f"unknown polarity {d.polarity}")
    if d.symbol in {n for (_, n) in signature(d.body)}:
        return failed(f"{d.symbol} occurs in its own definition")
    if d.symbol in set(taken):
        return failed(f"freshness: {d.symbol} is already in use")
    extra = free_variables(d.body) - set(d.args)
    if extra:
        return failed("definition body has free variables outside the head: " + ", ".join(sorted(extra)))
    return verified("definition")


def check_naming(premise, conclusion, d: DefinitionRecord) -> StepVerdict:
    """Conclusion is the premise with definition instances folded into the defined predicate."""
    p, c = as_formula(premise), as_formula(conclusion)
    if d.symbol in {n for (_, n) in signature(p)}:
        return failed(f"freshness: {d.symbol} already occurs in the premise")
    uses = 0

    def walk(x: Formula, y: Formula, pol: int) -> bool:
        nonlocal uses
        if isinstance(y, Atom) and y.pred == d.symbol:
            if len(y.args) != len(d.args):
                return False
            try:
                inst = subst_formula(d.body, dict(zip(d.args, y.args)))
            except CaptureError:
                return False
            if not alpha_equal(inst, x):
                return False
            if d.polarity == "implies" and pol != 1:
                raise _PolarityError("implies-definition folded at a non-positive position")
            if d.polarity == "implied" and pol != -1:
                raise _PolarityError("implied-definition folded at a non-negative position")
            uses += 1
            return True
        if type(x) is not type(y):
            return False
        if isinstance(x, (Atom, Truth)):
            return alpha_equal(x, y)
        if isinstance(x, (Forall, Exists)):
            return x.var == y.var and walk(x.body, y.body, pol)
        xs, ys = children(x), children(y)
        if len(xs) != len(ys):
            return False
        if isinstance(x, Not):
            return walk(xs[0], ys[0], -pol)
        if isinstance(x, Implies):
            return walk(xs[0], ys[0], -pol) and walk(xs[1], ys[1], pol)
        if isinstance(x, (Iff, Xor)):
            return walk(xs[0], ys[0], 0) and walk(xs[1], ys[1], 0)
        return all(walk(a, b, pol) for a, b in zip(xs, ys))

    try:
        ok = walk(p, c, 1)
    except _PolarityError as e:
        return failed(str(e))
    if not ok:
        return failed("conclusion is not the premise with the definition folded")
    if uses == 0:
        return failed(f"{d.symbol} is never introduced")
    return verified(f"naming ({uses} occurrence{'s' if uses > 1 else ''})")


class _PolarityError(Exception):
    pass


# ---------------------------------------------------------------- clausification


class ClausifyError(ValueError):
    pass


def _drop_universals(f: Formula) -> Formula:
    if isinstance(f, Forall):
        return _drop_universals(f.body)
    if isinstance(f, Exists):
        raise ClausifyError("existential quantifier left; Skolemize first")
    kids = children(f)
    return rebuild(f, tuple(_drop_universals(k) for k in kids)) if kids else f


def _lit(f: Formula) -> Literal:
    if isinstance(f, Atom):
        return Literal(True, f.pred, f.args)
    if isinstance(f, Not) and isinstance(f.arg, Atom):
        return Literal(False, f.arg.pred, f.arg.args)
    raise ClausifyError(f"not a literal: {f}")


def _cnf(f: Formula) -> List[Tuple[Literal, ...]]:
    if f == TOP:
        return []
    if f == BOT:
        return [()]
    if isinstance(f, And):
        out: List[Tuple[Literal, ...]] = []
        for a in f.args:
            out.extend(_cnf(a))
        return out
    if isinstance(f, Or):
        acc: List[Tuple[Literal, ...]] = [()]
        for a in f.args:
            acc = [x + y for x in acc for y in _cnf(a)]
        return acc
    return [(_lit(f),)]


def _tautology(lits: Sequence[Literal]) -> bool:
    canon = {canonical_literal(l) for l in lits}
    for l in canon:
        if l.is_equality and l.positive and l.args[0] == l.args[1]:
            return True
        if canonical_literal(l.negate()) in canon:
            return True
    return False


def clausify(f) -> List[Clause]:
    """Clauses of a Skolemized formula by NNF and distribution; tautologies dropped."""
    g = simplify(nnf(rectify(as_formula(f))))
    g = _drop_universals(g)
    out: List[Clause] = []
    for lits in _cnf(g):
        lits = dedup_literals(lits)
        if _tautology(lits):
            continue
        c = Clause(tuple(lits))
        if not any(clause_equal_mod_sym(c, d) for d in out):
            out.append(c)
    return out


def check_clausification(premise, conclusions: Sequence[Clause], partial: bool = False) -> StepVerdict:
    """``partial`` accepts any subset of the clause set (proofs omit clauses they never use)."""
    try:
        produced = clausify(premise)
    except ClausifyError as e:
        return failed(str(e))
    concl = [Clause(c.literals) for c in conclusions]
    for c in concl:
        if not any(clause_equal_mod_sym(c, d) for d in produced):
            return failed(f"extra-clause: {c} is not produced by clausification")
    if not partial:
        for d in produced:
            if not any(clause_equal_mod_sym(d, c) for c in concl):
                return failed(f"missing-clause: {d} is produced but not listed")
    return verified("clausification", clauses=tuple(produced))
