"""Syntactic unification and one-sided matching with occurs check."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .terms import App, Literal, Term, Var, normalize, subst_term


@dataclass(frozen=True)
class Unifier:
    subst: Dict[str, Term] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Clash:
    position: Tuple[int, ...]
    left: Term
    right: Term

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class OccursCheck:
    variable: str
    term: Term

    def __bool__(self) -> bool:
        return False


UnificationOutcome = Union[Unifier, Clash, OccursCheck]


def _walk(t: Term, s: Mapping[str, Term]) -> Term:
    while isinstance(t, Var) and t.name in s:
        t = s[t.name]
    return t


def _occurs(v: str, t: Term, s: Mapping[str, Term]) -> bool:
    t = _walk(t, s)
    if isinstance(t, Var):
        return t.name == v
    return any(_occurs(v, a, s) for a in t.args)


def unify_pairs(pairs: Sequence[Tuple[Term, Term]], s: Optional[Mapping[str, Term]] = None
                ) -> UnificationOutcome:
    """Simultaneously unify all pairs, extending the (triangular) substitution ``s``."""
    tri: Dict[str, Term] = dict(s or {})
    stack: List[Tuple[Term, Term, Tuple[int, ...]]] = [(a, b, (i,)) for i, (a, b) in reversed(list(enumerate(pairs)))]
    while stack:
        a, b, pos = stack.pop()
        a, b = _walk(a, tri), _walk(b, tri)
        if a == b:
            continue
        # prefer binding the right-hand variable so that mgu(l, k) binds k's variables
        if isinstance(b, Var):
            if _occurs(b.name, a, tri):
                return OccursCheck(b.name, a)
            tri[b.name] = a
        elif isinstance(a, Var):
            if _occurs(a.name, b, tri):
                return OccursCheck(a.name, b)
            tri[a.name] = b
        elif a.name != b.name or len(a.args) != len(b.args):
            return Clash(pos, a, b)
        else:
            for i in reversed(range(len(a.args))):
                stack.append((a.args[i], b.args[i], pos + (i,)))
    return Unifier(normalize(tri))


def mgu(t1: Term, t2: Term) -> UnificationOutcome:
    out = unify_pairs([(t1, t2)])
    if isinstance(out, Clash):
        return Clash(out.position[1:], out.left, out.right)
    return out


def unify_literals(l1: Literal, l2: Literal, s: Optional[Mapping[str, Term]] = None) -> UnificationOutcome:
    """Unify the atoms of two literals (polarity ignored)."""
    if l1.pred != l2.pred or len(l1.args) != len(l2.args):
        return Clash((), App(l1.pred, l1.args), App(l2.pred, l2.args))
    return unify_pairs(list(zip(l1.args, l2.args)), s)


def match(pattern: Term, subject: Term, s: Optional[Mapping[str, Term]] = None) -> UnificationOutcome:
    """One-sided matching: subject variables are rigid constants."""
    m: Dict[str, Term] = dict(s or {})
    stack = [(pattern, subject, ())]
    while stack:
        p, t, pos = stack.pop()
        if isinstance(p, Var):
            bound = m.get(p.name)
            if bound is None:
                m[p.name] = t
            elif bound != t:
                return Clash(pos, bound, t)
            continue
        if not isinstance(t, App) or t.name != p.name or len(t.args) != len(p.args):
            return Clash(pos, p, t)
        for i in reversed(range(len(p.args))):
            stack.append((p.args[i], t.args[i], pos + (i,)))
    return Unifier({k: v for k, v in m.items() if v != Var(k)})


def verify_unifier(t1: Term, t2: Term, s: Mapping[str, Term]) -> bool:
    return subst_term(t1, s) == subst_term(t2, s)
