"""Reading and writing the CNF/FOF subset of TPTP problems and TSTP derivations.

Annotations follow the usual ``inference(rule, [info], [parents])`` shape. Inside
the info list a few extension terms are understood; everything else is kept
verbatim:

* ``bind(X, t)``          premise variable ``X`` is instantiated with ``t``
* ``skolem(X, f)``        existential ``X`` was replaced by Skolem symbol ``f``
* ``new_symbols(k, [..])`` fresh symbols introduced by the step
* ``assert([sp1, ..])``    AVATAR labels the conclusion is asserted under
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .terms import (
    BOT, EQ, TOP, And, App, Atom, Clause, Exists, Forall, Formula, Iff, Implies, Literal, Not, Or,
    Term, Truth, Var, Xor, clause_to_formula, formula_to_clause,
)

ROLES = {"axiom", "hypothesis", "definition", "assumption", "lemma", "theorem", "corollary",
         "conjecture", "negated_conjecture", "plain", "type", "unknown"}


class TptpError(Exception):
    pass


class TptpSyntaxError(TptpError):
    def __init__(self, msg: str, line: int = 0, col: int = 0, path: str = "<input>") -> None:
        super().__init__(f"{path}:{line}:{col}: {msg}")
        self.line = line
        self.col = col
        self.path = path


class UnsupportedDialect(TptpError):
    pass


class InvalidProof(TptpError):
    pass


# ---------------------------------------------------------------- lexer

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*|/\*.*?\*/)
  | (?P<op><=>|<~>|=>|<=|~\||~&|!=|[=~|&!?:,.()\[\]*+>-])
  | (?P<dollar>\$\$?[a-zA-Z0-9_]+)
  | (?P<upper>[A-Z][a-zA-Z0-9_]*)
  | (?P<lower>[a-z][a-zA-Z0-9_]*)
  | (?P<squote>'(?:[^'\\]|\\.)*')
  | (?P<dquote>"(?:[^"\\]|\\.)*")
  | (?P<number>[0-9]+(?:\.[0-9]+)?)
""", re.VERBOSE | re.DOTALL)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, path: str = "<input>") -> List[Token]:
    out: List[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise TptpSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, path)
        kind = m.lastgroup
        tok = m.group()
        if kind not in ("ws", "comment"):
            out.append(Token(kind, tok, line, pos - line_start + 1))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rfind("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


def _unquote(tok: Token) -> str:
    if tok.kind == "squote":
        return re.sub(r"\\(.)", r"\1", tok.text[1:-1])
    return tok.text


# ---------------------------------------------------------------- general terms (annotations)


@dataclass(frozen=True)
class GTerm:
    """Generic annotation term: ``name(args)``, a list (name ``'[]'``), or a variable."""
    name: str
    args: Tuple["GTerm", ...] = ()
    is_var: bool = False

    @property
    def is_list(self) -> bool:
        return self.name == "[]"

    def __str__(self) -> str:
        if self.is_list:
            return "[" + ",".join(map(str, self.args)) + "]"
        n = self.name if self.is_var else format_name(self.name)
        return n if not self.args else f"{n}({','.join(map(str, self.args))})"


def glist(items: Iterable[GTerm]) -> GTerm:
    return GTerm("[]", tuple(items))


def gterm_to_term(g: GTerm) -> Term:
    if g.is_var:
        return Var(g.name)
    if g.is_list:
        raise TptpError(f"list where a term was expected: {g}")
    return App(g.name, tuple(gterm_to_term(a) for a in g.args))


def term_to_gterm(t: Term) -> GTerm:
    if isinstance(t, Var):
        return GTerm(t.name, (), True)
    return GTerm(t.name, tuple(term_to_gterm(a) for a in t.args))


# ---------------------------------------------------------------- data types


@dataclass(frozen=True)
class Unit:
    name: str
    role: str
    payload: Union[Formula, Clause]
    language: str = "cnf"

    @property
    def is_clause(self) -> bool:
        return isinstance(self.payload, Clause)


@dataclass
class TptpProblem:
    units: List[Unit] = field(default_factory=list)

    def unit(self, name: str) -> Optional[Unit]:
        for u in self.units:
            if u.name == name:
                return u
        return None

    @property
    def conjectures(self) -> List[Unit]:
        return [u for u in self.units if u.role == "conjecture"]


@dataclass(frozen=True)
class DerivationStep:
    id: str
    conclusion: Union[Formula, Clause]
    rule: str
    premises: Tuple[str, ...] = ()
    annotations: Tuple[GTerm, ...] = ()
    role: str = "plain"
    language: str = "cnf"
    source: Optional[GTerm] = None

    @property
    def clause(self) -> Optional[Clause]:
        """The conclusion read as a clause (with assertions), if it has clause shape."""
        if isinstance(self.conclusion, Clause):
            return self.conclusion
        c = formula_to_clause(self.conclusion)
        if c is None:
            return None
        return Clause(c.literals, self.assertions)

    @property
    def formula(self) -> Formula:
        if isinstance(self.conclusion, Clause):
            return clause_to_formula(self.conclusion)
        return self.conclusion

    @property
    def assertions(self) -> frozenset:
        if isinstance(self.conclusion, Clause):
            return self.conclusion.assertions
        for g in self.annotations:
            if g.name == "assert" and g.args:
                return frozenset(a.name for a in _list_items(g.args[0]))
        return frozenset()

    @property
    def is_false(self) -> bool:
        if isinstance(self.conclusion, Clause):
            return self.conclusion.is_empty
        return self.conclusion == BOT and not self.assertions

    def info(self, name: str) -> List[GTerm]:
        return [g for g in self.annotations if g.name == name]

    def bindings(self) -> Optional[Dict[str, Term]]:
        found = self.info("bind")
        if not found:
            return None
        return {b.args[0].name: gterm_to_term(b.args[1]) for b in found if len(b.args) == 2}

    def new_symbols(self) -> List[str]:
        out = []
        for g in self.info("new_symbols"):
            if len(g.args) == 2:
                out.extend(a.name for a in _list_items(g.args[1]))
        return out

    @property
    def source_unit(self) -> Optional[str]:
        """Unit name cited by a ``file(path, name)`` source."""
        s = self.source
        if s is not None and s.name == "file" and len(s.args) >= 2:
            return s.args[1].name
        return None


def _list_items(g: GTerm) -> Tuple[GTerm, ...]:
    return g.args if g.is_list else (g,)


@dataclass
class ProofGraph:
    steps: Dict[str, DerivationStep]
    roots: Tuple[str, ...]
    sink: str

    def topological_order(self) -> List[str]:
        return topological_order(self.steps)

    def ancestors(self, sid: str) -> List[str]:
        """``sid`` and all steps it depends on, in topological order."""
        seen = set()
        stack = [sid]
        while stack:
            s = stack.pop()
            if s in seen:
                continue
            seen.add(s)
            stack.extend(self.steps[s].premises)
        return [s for s in self.topological_order() if s in seen]


def topological_order(steps: Dict[str, DerivationStep]) -> List[str]:
    """Premises before conclusions; ties broken by file order. Raises on cycles."""
    order: List[str] = []
    state: Dict[str, int] = {}
    for root in steps:
        if state.get(root):
            continue
        stack = [(root, iter(steps[root].premises))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                state[node] = 2
                order.append(node)
                continue
            if nxt not in steps:
                raise InvalidProof(f"step {node} cites unknown premise {nxt}")
            st = state.get(nxt, 0)
            if st == 1:
                raise InvalidProof(f"cyclic premise reference through {nxt}")
            if st == 0:
                state[nxt] = 1
                stack.append((nxt, iter(steps[nxt].premises)))
    return order


# ---------------------------------------------------------------- parser


class _Parser:
    def __init__(self, text: str, path: str) -> None:
        self.path = path
        self.toks = tokenize(text, path)
        self.i = 0

    # token helpers
    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def error(self, msg: str, tok: Optional[Token] = None) -> TptpSyntaxError:
        tok = tok or self.peek()
        return TptpSyntaxError(msg, tok.line, tok.col, self.path)

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text or t.kind in ("squote", "dquote"):
            raise self.error(f"expected {text!r}, found {t.text or 'end of input'!r}", t)
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.text == text and t.kind == "op"

    def name(self) -> str:
        t = self.next()
        if t.kind in ("lower", "squote", "number"):
            return _unquote(t)
        raise self.error(f"expected a name, found {t.text or 'end of input'!r}", t)

    # top level
    def units(self):
        while self.peek().kind != "eof":
            t = self.next()
            if t.kind != "lower":
                raise self.error(f"expected annotated formula, found {t.text!r}", t)
            if t.text == "include":
                self.expect("(")
                f = self.next()
                if f.kind != "squote":
                    raise self.error("include expects a quoted file name", f)
                selection = None
                if self.at(","):
                    self.next()
                    selection = [g.name for g in _list_items(self.general())]
                self.expect(")")
                self.expect(".")
                yield ("include", _unquote(f), selection, t)
                continue
            if t.text in ("tff", "thf", "tcf", "tpi"):
                raise UnsupportedDialect(f"{self.path}:{t.line}:{t.col}: {t.text} is not supported")
            if t.text not in ("cnf", "fof"):
                raise self.error(f"unknown annotated formula kind {t.text!r}", t)
            lang = t.text
            self.expect("(")
            name = self.name()
            self.expect(",")
            rt = self.next()
            role = rt.text
            if rt.kind != "lower" or role not in ROLES:
                raise self.error(f"unknown role {role!r}", rt)
            if role == "type":
                raise UnsupportedDialect(f"{self.path}:{rt.line}:{rt.col}: typed units are not supported")
            self.expect(",")
            payload = self.cnf_formula() if lang == "cnf" else self.formula()
            source = info = None
            if self.at(","):
                self.next()
                source = self.general()
                if self.at(","):
                    self.next()
                    info = self.general()
            self.expect(")")
            self.expect(".")
            yield ("unit", lang, name, role, payload, source, info, t)

    # general terms
    def general(self) -> GTerm:
        t = self.peek()
        if t.text == "[" and t.kind == "op":
            self.next()
            items = []
            if not self.at("]"):
                items.append(self.general())
                while self.at(","):
                    self.next()
                    items.append(self.general())
            self.expect("]")
            return glist(items)
        if t.kind == "upper":
            self.next()
            return GTerm(t.text, (), True)
        if t.kind in ("lower", "squote", "number", "dollar", "dquote"):
            self.next()
            name = _unquote(t)
            if t.kind == "dollar" and t.text in ("$fof", "$cnf") and self.at("("):
                self.next()
                f = self.formula() if t.text == "$fof" else clause_to_formula(self.cnf_formula())
                self.expect(")")
                return GTerm(t.text, (GTerm(print_formula(f)),))
            args = []
            if self.at("("):
                self.next()
                args.append(self.general())
                while self.at(","):
                    self.next()
                    args.append(self.general())
                self.expect(")")
            if self.at(":") and not args:
                # key:value pairs in general data
                self.next()
                return GTerm(":", (GTerm(name), self.general()))
            return GTerm(name, tuple(args))
        raise self.error(f"unexpected {t.text or 'end of input'!r} in annotation", t)

    # terms
    def term(self) -> Term:
        t = self.next()
        if t.kind == "upper":
            return Var(t.text)
        if t.kind in ("lower", "squote", "number", "dquote"):
            name = _unquote(t)
            if self.at("("):
                self.next()
                args = [self.term()]
                while self.at(","):
                    self.next()
                    args.append(self.term())
                self.expect(")")
                return App(name, tuple(args))
            return App(name)
        if t.kind == "dollar":
            raise UnsupportedDialect(f"{self.path}:{t.line}:{t.col}: interpreted symbol {t.text}")
        raise self.error(f"expected a term, found {t.text or 'end of input'!r}", t)

    def atom(self) -> Formula:
        t = self.peek()
        if t.kind == "dollar":
            if t.text == "$true":
                self.next()
                return TOP
            if t.text == "$false":
                self.next()
                return BOT
            raise UnsupportedDialect(f"{self.path}:{t.line}:{t.col}: interpreted symbol {t.text}")
        lhs = self.term()
        if self.at("="):
            self.next()
            return Atom(EQ, (lhs, self.term()))
        if self.at("!="):
            self.next()
            return Not(Atom(EQ, (lhs, self.term())))
        if isinstance(lhs, Var):
            raise self.error("variable used as a formula", t)
        return Atom(lhs.name, lhs.args)

    # cnf
    def cnf_formula(self) -> Clause:
        if self.at("("):
            save = self.i
            self.next()
            c = self.cnf_disjunction()
            if self.at(")"):
                self.next()
                return c
            self.i = save
        return self.cnf_disjunction()

    def cnf_disjunction(self) -> Clause:
        lits = self.cnf_literal()
        while self.at("|"):
            self.next()
            lits += self.cnf_literal()
        return Clause(tuple(lits))

    def cnf_literal(self) -> List[Literal]:
        neg = False
        if self.at("~"):
            self.next()
            neg = True
        a = self.atom()
        if a == BOT:
            if neg:
                raise self.error("~$false in a clause")
            return []
        if a == TOP:
            raise self.error("$true in a clause")
        if isinstance(a, Not):
            if neg:
                raise self.error("double negation in a clause literal")
            return [Literal(False, a.arg.pred, a.arg.args)]
        return [Literal(not neg, a.pred, a.args)]

    # fof
    def formula(self) -> Formula:
        lhs = self.unit_formula()
        t = self.peek()
        if t.kind == "op" and t.text in ("|", "&"):
            op = t.text
            parts = [lhs]
            while self.at(op):
                self.next()
                parts.append(self.unit_formula())
            return Or(tuple(parts)) if op == "|" else And(tuple(parts))
        if t.kind == "op" and t.text in ("<=>", "=>", "<=", "<~>", "~|", "~&"):
            self.next()
            rhs = self.unit_formula()
            return {
                "<=>": lambda: Iff(lhs, rhs),
                "=>": lambda: Implies(lhs, rhs),
                "<=": lambda: Implies(rhs, lhs),
                "<~>": lambda: Xor(lhs, rhs),
                "~|": lambda: Not(Or((lhs, rhs))),
                "~&": lambda: Not(And((lhs, rhs))),
            }[t.text]()
        return lhs

    def unit_formula(self) -> Formula:
        t = self.peek()
        if t.kind == "op":
            if t.text == "~":
                self.next()
                return Not(self.unit_formula())
            if t.text in ("!", "?"):
                self.next()
                self.expect("[")
                vs = [self._var()]
                while self.at(","):
                    self.next()
                    vs.append(self._var())
                self.expect("]")
                self.expect(":")
                body = self.unit_formula()
                q = Forall if t.text == "!" else Exists
                for v in reversed(vs):
                    body = q(v, body)
                return body
            if t.text == "(":
                self.next()
                f = self.formula()
                self.expect(")")
                return f
        return self.atom()

    def _var(self) -> str:
        t = self.next()
        if t.kind != "upper":
            raise self.error(f"expected a variable, found {t.text!r}", t)
        if self.at(":"):
            if self.peek(1).kind in ("lower", "dollar"):
                raise UnsupportedDialect(f"{self.path}:{t.line}:{t.col}: typed variable")
        return t.text


def _decode(data: Union[str, bytes]) -> str:
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise TptpSyntaxError(f"input is not UTF-8 ({e.reason})", 0, e.start) from None
    return data


def _read_units(text: Union[str, bytes], path: str):
    p = _Parser(_decode(text), path)
    try:
        return list(p.units())
    except RecursionError:
        raise TptpSyntaxError("formula nested too deeply", p.peek().line, p.peek().col, path) from None


def parse_problem(text: Union[str, bytes], tptp_root: Optional[Union[str, Path]] = None,
                  path: str = "<input>", _depth: int = 0) -> TptpProblem:
    """Parse a problem; ``include`` directives are resolved against ``tptp_root``."""
    if _depth > 16:
        raise TptpError("include nesting too deep")
    prob = TptpProblem()
    seen = set()
    for item in _read_units(text, path):
        if item[0] == "include":
            _, fname, selection, tok = item
            sub = _resolve_include(fname, tptp_root, path)
            if sub is None:
                raise TptpSyntaxError(f"cannot resolve include {fname!r}", tok.line, tok.col, path)
            inc = parse_problem(sub.read_bytes(), tptp_root, str(sub), _depth + 1)
            for u in inc.units:
                if selection is None or u.name in selection:
                    _add_unit(prob, u, seen, path)
            continue
        _, lang, name, role, payload, _, _, tok = item
        if role not in ("axiom", "hypothesis", "conjecture", "negated_conjecture", "definition",
                        "assumption", "lemma", "theorem", "corollary", "plain", "unknown"):
            raise TptpSyntaxError(f"role {role} not allowed in a problem", tok.line, tok.col, path)
        _add_unit(prob, Unit(name, role, payload, lang), seen, path)
    return prob


def _add_unit(prob: TptpProblem, u: Unit, seen: set, path: str) -> None:
    if u.name in seen:
        raise TptpError(f"{path}: duplicate unit name {u.name}")
    seen.add(u.name)
    prob.units.append(u)


def _resolve_include(fname: str, root, path: str) -> Optional[Path]:
    candidates = []
    if root is not None:
        candidates.append(Path(root) / fname)
    env = os.environ.get("TPTP")
    if env:
        candidates.append(Path(env) / fname)
    if path != "<input>":
        candidates.append(Path(path).parent / fname)
    for c in candidates:
        if c.is_file():
            return c
    return None


def _parse_source(source: Optional[GTerm], role: str) -> Tuple[str, Tuple[str, ...], Tuple[GTerm, ...]]:
    """(rule, premises, info) from a TSTP source annotation."""
    if source is None:
        return ("negated_conjecture" if role == "negated_conjecture" else "input"), (), ()
    if source.name == "inference" and len(source.args) == 3:
        rule = source.args[0].name
        info = _list_items(source.args[1])
        parents = []
        for p in _list_items(source.args[2]):
            if p.name == "inference":
                raise UnsupportedDialect("nested inference records are not supported")
            if p.name in ("theory", "creator"):
                continue
            parents.append(p.name)
        return rule, tuple(parents), tuple(info)
    if source.name == "introduced" and source.args:
        info = _list_items(source.args[1]) if len(source.args) > 1 else ()
        return source.args[0].name, (), tuple(info)
    if source.name == "file":
        return "input", (), ()
    return "input", (), ()


def parse_derivation(text: Union[str, bytes], path: str = "<input>") -> ProofGraph:
    steps: Dict[str, DerivationStep] = {}
    for item in _read_units(text, path):
        if item[0] == "include":
            raise TptpSyntaxError("include is not allowed in a derivation", item[3].line, item[3].col, path)
        _, lang, name, role, payload, source, _, tok = item
        if name in steps:
            raise InvalidProof(f"{path}:{tok.line}: duplicate step id {name}")
        rule, premises, info = _parse_source(source, role)
        if isinstance(payload, Clause):
            for g in info:
                if g.name == "assert" and g.args:
                    payload = Clause(payload.literals, frozenset(a.name for a in _list_items(g.args[0])))
        steps[name] = DerivationStep(name, payload, rule, premises, info, role, lang, source)
    return build_graph(steps)


def build_graph(steps: Dict[str, DerivationStep]) -> ProofGraph:
    if not steps:
        raise InvalidProof("derivation has no steps")
    topological_order(steps)  # dangling ids and cycles
    sinks = [s for s in steps.values() if s.is_false]
    if not sinks:
        raise InvalidProof("derivation does not conclude false")
    if len(sinks) > 1:
        raise InvalidProof("more than one step concludes false: " + ", ".join(s.id for s in sinks))
    sink = sinks[0]
    if not sink.premises:
        raise InvalidProof(f"sink {sink.id} is a root; nothing is derived")
    roots = tuple(s.id for s in steps.values() if is_root(s))
    return ProofGraph(steps, roots, sink.id)


def is_root(s: DerivationStep) -> bool:
    """Refutation inputs: premise-free non-conjecture steps and negated conjectures."""
    if s.role == "negated_conjecture" or s.rule == "negated_conjecture":
        return True
    return not s.premises and s.role != "conjecture" and s.rule in ("input", "file")


# ---------------------------------------------------------------- printer

_LOWER_RE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")
_NUM_RE = re.compile(r"[0-9]+\Z")


def format_name(name: str) -> str:
    if _LOWER_RE.match(name) or _NUM_RE.match(name) or name == "[]":
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    n = format_name(t.name)
    return n if not t.args else f"{n}({','.join(print_term(a) for a in t.args)})"


def print_literal(l: Literal) -> str:
    if l.is_equality:
        return f"{print_term(l.args[0])} {'=' if l.positive else '!='} {print_term(l.args[1])}"
    body = print_term(App(l.pred, l.args))
    return body if l.positive else "~" + body


def print_clause(c: Clause) -> str:
    if not c.literals:
        return "$false"
    return " | ".join(print_literal(l) for l in c.literals)


def print_formula(f: Formula) -> str:
    if isinstance(f, Truth):
        return "$true" if f.value else "$false"
    if isinstance(f, Atom):
        return print_literal(Literal(True, f.pred, f.args))
    if isinstance(f, Not):
        if isinstance(f.arg, Atom) and f.arg.pred == EQ:
            return print_literal(Literal(False, EQ, f.arg.args))
        return "~" + _wrap(f.arg)
    if isinstance(f, (And, Or)):
        op = " & " if isinstance(f, And) else " | "
        return op.join(_wrap(a) for a in f.args)
    if isinstance(f, (Implies, Iff, Xor)):
        op = {Implies: " => ", Iff: " <=> ", Xor: " <~> "}[type(f)]
        return _wrap(f.lhs) + op + _wrap(f.rhs)
    q = type(f)
    vs = []
    while isinstance(f, q):
        vs.append(f.var)
        f = f.body
    return ("! [" if q is Forall else "? [") + ",".join(vs) + "] : " + _wrap(f)


def _wrap(f: Formula) -> str:
    s = print_formula(f)
    if isinstance(f, (Truth, Atom)) or (isinstance(f, Not) and isinstance(f.arg, Atom)):
        return s
    if isinstance(f, (Not, Forall, Exists)):
        return s
    return "(" + s + ")"


def print_unit(u: Unit) -> str:
    body = print_clause(u.payload) if isinstance(u.payload, Clause) else print_formula(u.payload)
    return f"{u.language}({format_name(u.name)}, {u.role}, {body})."


def print_problem(p: TptpProblem) -> str:
    return "".join(print_unit(u) + "\n" for u in p.units)


def print_step(s: DerivationStep) -> str:
    if isinstance(s.conclusion, Clause):
        body = print_clause(s.conclusion)
    else:
        body = print_formula(s.conclusion)
    src = s.source
    if src is None or (src.name == "inference" and len(src.args) == 3):
        info = list(s.annotations)
        if isinstance(s.conclusion, Clause) and s.conclusion.assertions and not any(g.name == "assert" for g in info):
            info.append(GTerm("assert", (glist(GTerm(a) for a in sorted(s.conclusion.assertions)),)))
        if s.rule in ("input", "negated_conjecture") and not s.premises and not info and src is None:
            return f"{s.language}({format_name(s.id)}, {s.role}, {body})."
        if src is not None and tuple(info) == s.annotations:
            return f"{s.language}({format_name(s.id)}, {s.role}, {body}, {src})."
        rule = src.args[0] if src is not None else GTerm(s.rule)
        src = GTerm("inference", (rule, glist(info), glist(GTerm(p) for p in s.premises)))
    return f"{s.language}({format_name(s.id)}, {s.role}, {body}, {src})."


def print_derivation(g: ProofGraph) -> str:
    return "".join(print_step(s) + "\n" for s in g.steps.values())
