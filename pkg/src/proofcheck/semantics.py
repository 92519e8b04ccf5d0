"""Exhaustive evaluation of first-order formulas over small finite domains.

Used as a screen, never as a proof: agreement on all small models is weaker
than logical equivalence, so callers tag such verdicts as semantic-only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from .terms import (
    EQ, And, Atom, Exists, Forall, Formula, Iff, Implies, Not, Or, Term, Truth, Var, Xor,
    forall, ordered_vars, signature,
)

MAX_DOMAIN = 3
MAX_SYMBOLS = 3
INTERPRETATION_CAP = 1_000_000

Env = Dict[str, int]


@dataclass(frozen=True)
class Interpretation:
    size: int
    tables: Dict[str, tuple]

    def apply(self, name: str, args: Sequence[int]) -> object:
        idx = 0
        for a in args:
            idx = idx * self.size + a
        return self.tables[name][idx]


def _compile_term(t: Term) -> Callable[[Interpretation, Env], int]:
    if isinstance(t, Var):
        name = t.name
        return lambda I, env: env[name]
    fname = "f:" + t.name
    subs = [_compile_term(a) for a in t.args]
    if not subs:
        return lambda I, env: I.tables[fname][0]

    def go(I: Interpretation, env: Env) -> int:
        idx = 0
        for s in subs:
            idx = idx * I.size + s(I, env)
        return I.tables[fname][idx]
    return go


def compile_formula(f: Formula) -> Callable[[Interpretation, Env], bool]:
    if isinstance(f, Truth):
        v = f.value
        return lambda I, env: v
    if isinstance(f, Atom):
        subs = [_compile_term(a) for a in f.args]
        if f.pred == EQ:
            a, b = subs
            return lambda I, env: a(I, env) == b(I, env)
        pname = "p:" + f.pred

        def atom(I: Interpretation, env: Env) -> bool:
            idx = 0
            for s in subs:
                idx = idx * I.size + s(I, env)
            return I.tables[pname][idx]
        return atom
    if isinstance(f, Not):
        g = compile_formula(f.arg)
        return lambda I, env: not g(I, env)
    if isinstance(f, And):
        gs = [compile_formula(a) for a in f.args]
        return lambda I, env: all(g(I, env) for g in gs)
    if isinstance(f, Or):
        gs = [compile_formula(a) for a in f.args]
        return lambda I, env: any(g(I, env) for g in gs)
    if isinstance(f, (Implies, Iff, Xor)):
        l, r = compile_formula(f.lhs), compile_formula(f.rhs)
        if isinstance(f, Implies):
            return lambda I, env: (not l(I, env)) or r(I, env)
        if isinstance(f, Iff):
            return lambda I, env: l(I, env) == r(I, env)
        return lambda I, env: l(I, env) != r(I, env)
    if isinstance(f, (Forall, Exists)):
        body = compile_formula(f.body)
        v = f.var
        quant = all if isinstance(f, Forall) else any

        def q(I: Interpretation, env: Env) -> bool:
            old = env.get(v)
            try:
                def inst(d):
                    env[v] = d
                    return body(I, env)
                return quant(inst(d) for d in range(I.size))
            finally:
                if old is None:
                    env.pop(v, None)
                else:
                    env[v] = old
        return q
    raise TypeError(f"not a formula: {f!r}")


def closure(f: Formula) -> Formula:
    return forall(ordered_vars(f), f)


def evaluate(f: Formula, I: Interpretation, env: Optional[Env] = None) -> bool:
    return compile_formula(f)(I, dict(env or {}))


def _symbols(formulas: Sequence[Formula]) -> List[Tuple[str, int]]:
    sig: Dict[Tuple[str, str], int] = {}
    for f in formulas:
        signature(f, sig)
    return sorted((("f:" if k == "fn" else "p:") + n, a) for (k, n), a in sig.items())


def interpretation_count(symbols: Sequence[Tuple[str, int]], n: int) -> int:
    total = 1
    for name, arity in symbols:
        total *= (n if name.startswith("f:") else 2) ** (n ** arity)
    return total


def interpretations(symbols: Sequence[Tuple[str, int]], n: int) -> Iterator[Interpretation]:
    ranges = []
    for name, arity in symbols:
        vals = tuple(range(n)) if name.startswith("f:") else (False, True)
        ranges.append(itertools.product(vals, repeat=n ** arity))
    for combo in itertools.product(*[list(r) for r in ranges]):
        yield Interpretation(n, dict(zip((s for s, _ in symbols), combo)))


def screen_cost(formulas: Sequence[Formula], max_domain: int = MAX_DOMAIN) -> int:
    syms = _symbols(formulas)
    return sum(interpretation_count(syms, n) for n in range(1, max_domain + 1))


def agree_on_small_models(f: Formula, g: Formula, max_domain: int = MAX_DOMAIN,
                          max_symbols: Optional[int] = MAX_SYMBOLS, cap: int = INTERPRETATION_CAP
                          ) -> Optional[bool]:
    """True if the closures of f and g agree on every model up to ``max_domain``.

    None when the screen does not apply (too many symbols or interpretations).
    """
    fc, gc = closure(f), closure(g)
    syms = _symbols([fc, gc])
    if max_symbols is not None and len(syms) > max_symbols:
        return None
    if screen_cost([fc, gc], max_domain) > cap:
        return None
    ef, eg = compile_formula(fc), compile_formula(gc)
    for n in range(1, max_domain + 1):
        for I in interpretations(syms, n):
            if ef(I, {}) != eg(I, {}):
                return False
    return True


def find_model(f: Formula, max_domain: int = MAX_DOMAIN, cap: int = INTERPRETATION_CAP
               ) -> Optional[Interpretation]:
    """A model of the closure of f with at most ``max_domain`` elements, if one exists within the cap."""
    fc = closure(f)
    syms = _symbols([fc])
    ef = compile_formula(fc)
    spent = 0
    for n in range(1, max_domain + 1):
        spent += interpretation_count(syms, n)
        if spent > cap:
            return None
        for I in interpretations(syms, n):
            if ef(I, {}):
                return I
    return None


def satisfiable_up_to(f: Formula, max_domain: int = MAX_DOMAIN, cap: int = INTERPRETATION_CAP) -> bool:
    return find_model(f, max_domain, cap) is not None


def term_value(t: Term, I: Interpretation, env: Optional[Env] = None) -> int:
    return _compile_term(t)(I, dict(env or {}))

