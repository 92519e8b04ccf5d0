"""Render a checked derivation as a three-part Lean-style script.

Part 1 declares the sort and every symbol as section variables, part 2 has one
theorem per inference, and part 3 assembles them into a proof of the
conjecture (or of False for pure refutations).
"""

from __future__ import annotations

import re
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .preprocess import definition_record
from .avatar import label_definition
from .replay import TRUSTED, CheckReport
from .rules import DEFAULT_CONSTANT
from .terms import (
    EQ, And, App, Atom, Clause, Exists, Forall, Formula, Iff, Implies, Literal, Not, Or, Term, Truth,
    Var, Xor, ordered_vars, signature,
)
from .tptp import DerivationStep, ProofGraph, TptpProblem


class EmitError(ValueError):
    pass


SORT = "ι"
_PLAIN = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
_KEYWORDS = frozenset("""
    at by by_contra calc class def do else end example exact fun have if import in instance let
    match namespace open section show structure then theorem universe variable where with from
    Type Prop Sort True False Not And Or Iff Xor' intro obtain specialize
""".split())

# checker -> tactic closing a part-2 theorem
_TACTIC = {"ennf": "simp_all", "nnf": "simp_all", "flatten": "simp_all", "simplify": "simp_all",
           "rectify": "simp_all", "clausify": "grind", "naming": "grind", "avatar_split": "grind",
           "avatar_component": "grind", "avatar_contradiction": "grind", "avatar_sat": "bv_decide"}
# introductions handled in the assembly instead of as part-2 theorems
_ASSEMBLY_ONLY = {"input", "conjecture", "negated_conjecture", "skolemize", "definition", "avatar_definition"}


def ident(name: str) -> str:
    """Lean identifier for ``name``; non-plain names are wrapped in «», which is injective."""
    if "«" in name or "»" in name:
        raise EmitError(f"symbol {name!r} cannot be escaped")
    if _PLAIN.match(name) and name not in _KEYWORDS:
        return name
    if not name or "\n" in name:
        raise EmitError(f"symbol {name!r} cannot be escaped")
    return f"«{name}»"


# ---------------------------------------------------------------- printing


def term(t: Term) -> str:
    if isinstance(t, Var):
        return ident(t.name)
    if not t.args:
        return ident(t.name)
    return " ".join([ident(t.name)] + [_arg(a) for a in t.args])


def _arg(t: Term) -> str:
    s = term(t)
    return f"({s})" if isinstance(t, App) and t.args else s


def atom(pred: str, args: Sequence[Term], positive: bool = True) -> str:
    if pred == EQ:
        return f"{term(args[0])} {'=' if positive else '≠'} {term(args[1])}"
    s = " ".join([ident(pred)] + [_arg(a) for a in args])
    return s if positive else f"¬{s}" if not args else f"¬({s})"


def literal(l: Literal) -> str:
    return atom(l.pred, l.args, l.positive)


def clause_body(c: Clause) -> str:
    if not c.literals:
        return "False"
    return " ∨ ".join(literal(l) for l in c.literals)


def _binders(names: Iterable[str]) -> str:
    return " ".join(ident(n) for n in names)


def clause_statement(c: Clause, labels: Sequence[str] = ()) -> str:
    vs = ordered_vars(Clause(c.literals))
    body = clause_body(c)
    if vs:
        body = f"∀ {_binders(vs)}, {body}"
    for lab in reversed(list(labels)):
        body = f"{ident(lab)} → {body}"
    return body


def formula(f: Formula, prec: int = 0) -> str:
    """Precedence: 0 binders/↔, 1 →, 2 ∨, 3 ∧, 4 ¬ and atoms, 5 function arguments."""
    if isinstance(f, Truth):
        return "True" if f.value else "False"
    if isinstance(f, Atom):
        s = atom(f.pred, f.args)
        return f"({s})" if (f.pred == EQ and prec >= 4) or (f.args and prec >= 5) else s
    if isinstance(f, Not):
        if isinstance(f.arg, Atom):
            s = atom(f.arg.pred, f.arg.args, False)
            return f"({s})" if (f.arg.pred == EQ and prec >= 4) or prec >= 5 else s
        s = f"¬{formula(f.arg, 4)}"
        return f"({s})" if prec >= 5 else s
    if isinstance(f, (Forall, Exists)):
        q = "∀" if isinstance(f, Forall) else "∃"
        names = [f.var]
        body = f.body
        while type(body) is type(f):
            names.append(body.var)
            body = body.body
        s = f"{q} {_binders(names)}, {formula(body, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(f, And):
        s = " ∧ ".join(formula(a, 4) for a in f.args) if f.args else "True"
        return f"({s})" if prec > 3 else s
    if isinstance(f, Or):
        s = " ∨ ".join(formula(a, 3) for a in f.args) if f.args else "False"
        return f"({s})" if prec > 2 else s
    if isinstance(f, Implies):
        s = f"{formula(f.lhs, 2)} → {formula(f.rhs, 1)}"
        return f"({s})" if prec > 1 else s
    if isinstance(f, Iff):
        s = f"{formula(f.lhs, 1)} ↔ {formula(f.rhs, 1)}"
        return f"({s})" if prec > 0 else s
    if isinstance(f, Xor):
        s = f"Xor' {formula(f.lhs, 5)} {formula(f.rhs, 5)}"
        return f"({s})" if prec >= 4 else s
    raise EmitError(f"cannot print {f!r}")


# ---------------------------------------------------------------- the emitter


class _Script:
    def __init__(self, problem: TptpProblem, proof: ProofGraph, report: Optional[CheckReport]):
        self.problem = problem
        self.proof = proof
        self.report = report
        self.routing = {}
        self.order = proof.ancestors(proof.sink) if proof.steps else []
        self.labels: List[str] = []  # AVATAR labels in definition order
        for sid in self.order:
            s = proof.steps[sid]
            parsed = label_definition(s.formula) if s.rule == "avatar_definition" else None
            if parsed and parsed[0] not in self.labels:
                self.labels.append(parsed[0])

    def checker(self, sid: str) -> str:
        if self.report is not None and sid in self.report.results:
            return self.report.results[sid].checker
        return "-"

    def statement(self, s: DerivationStep) -> str:
        c = s.clause
        if c is not None and s.language == "cnf":
            return clause_statement(c, self._ordered(c.assertions))
        if c is not None and c.assertions:
            return clause_statement(c, self._ordered(c.assertions))
        return formula(_closed_statement(s.formula))

    def _ordered(self, assertions: Iterable[str]) -> List[str]:
        a = set(assertions)
        return [l for l in self.labels if l in a] + sorted(a - set(self.labels))

    # ---- part 1

    def part1(self) -> List[str]:
        sig: Dict[Tuple[str, str], int] = {}
        for u in self.problem.units:
            signature(u.payload, sig)
        for sid in self.order:
            signature(self.proof.steps[sid].conclusion, sig)
            signature(self.proof.steps[sid].formula, sig)
        for l in self.labels:
            sig[("pred", l)] = 0
        fns = sorted(n for (k, n) in sig if k == "fn")
        preds = sorted(n for (k, n) in sig if k == "pred")
        out = ["-- Part 1: sort and symbols", "",
               f"variable {{{SORT} : Type}} [Inhabited {SORT}]", "",
               f"abbrev {DEFAULT_CONSTANT} {{α : Type}} [Inhabited α] : α := default", ""]
        for n in fns:
            if n == DEFAULT_CONSTANT:
                continue
            out.append(f"variable {{{ident(n)} : {self._type(sig[('fn', n)], SORT)}}}")
        for n in preds:
            out.append(f"variable {{{ident(n)} : {self._type(sig[('pred', n)], 'Prop')}}}")
        return out

    @staticmethod
    def _type(arity: int, result: str) -> str:
        return " → ".join([SORT] * arity + [result])

    # ---- part 2

    def part2(self) -> List[str]:
        out = ["-- Part 2: inference steps"]
        for sid in self.order:
            if self.checker(sid) in _ASSEMBLY_ONLY:
                continue
            s = self.proof.steps[sid]
            if not s.premises:
                continue
            out.append("")
            out.extend(self.step_theorem(s))
        return out

    def step_theorem(self, s: DerivationStep) -> List[str]:
        checker = self.checker(s.id)
        prems = [self.proof.steps[p] for p in s.premises]
        if checker == "avatar_sat":
            return self._sat_theorem(s, prems)
        hyps = [f"({ident('h' + p.id)} : {self.statement(p)})" for p in prems]
        head = f"theorem {ident('step_' + s.id)} {' '.join(hyps)} :"
        lines = [head, f"    {self.statement(s)} := by"]
        c = s.clause
        details = self._details(s.id)
        inst = details.get("instantiation")
        if inst is None or c is None:
            lines.append(f"  {_TACTIC.get(checker, 'grind')}")
            return lines
        labels = self._ordered(c.assertions)
        cvars = ordered_vars(Clause(c.literals))
        intro = [ident("l_" + l) for l in labels] + [ident(v) for v in cvars]
        if intro:
            lines.append("  intro " + " ".join(intro))
        for v, t in self._sorted_bindings(inst, cvars):
            lines.append(f"  let {ident(v)} : {SORT} := {term(t)}")
        for i, p in enumerate(prems):
            pc = p.clause
            args = [ident("l_" + l) for l in self._ordered(pc.assertions)] if pc is not None else []
            if pc is not None:
                args += [ident(f"{v}_{i}") for v in ordered_vars(Clause(pc.literals))]
            if args:
                lines.append(f"  have {ident('i' + p.id)} := {ident('h' + p.id)} {' '.join(args)}")
        lines.append("  grind")
        return lines

    def _sat_theorem(self, s: DerivationStep, prems: Sequence[DerivationStep]) -> List[str]:
        hyps = [f"({ident('h' + p.id)} : {clause_body(p.clause)})" for p in prems]
        return [f"theorem {ident('step_' + s.id)} {' '.join(hyps)} :", "    False := by", "  bv_decide"]

    def _details(self, sid: str) -> Mapping:
        if self.report is None or sid not in self.report.results:
            return {}
        return self.report.results[sid].verdict.details

    @staticmethod
    def _sorted_bindings(inst: Mapping[str, Term], cvars: Sequence[str]) -> List[Tuple[str, Term]]:
        index = {v: i for i, v in enumerate(cvars)}

        def key(item):
            v, t = item
            first = min((index[x] for x in ordered_vars(t) if x in index), default=len(index))
            base, _, prem = v.rpartition("_")
            return (first, prem, base)
        return sorted(inst.items(), key=key)

    # ---- part 3

    def part3(self) -> List[str]:
        conj = self.problem.conjectures
        roots = [sid for sid in self.order if sid in self.proof.roots
                 and self.checker(sid) != "negated_conjecture"
                 and self.proof.steps[sid].role != "negated_conjecture"]
        negs = [sid for sid in self.order if sid not in roots and sid in self.proof.roots]
        goal = formula(_conj_formula(conj[0])) if conj else "False"
        hyps = [f"({ident('e' + r)} : {self.statement(self.proof.steps[r])})" for r in roots]
        cnf_negs = [n for n in negs if not self.proof.steps[n].premises and not conj]
        hyps += [f"({ident('e' + n)} : {self.statement(self.proof.steps[n])})" for n in cnf_negs]
        out = ["-- Part 3: assembly", "", f"theorem goal {' '.join(hyps)} :", f"    {goal} := by"]
        for sid in self.order:
            s = self.proof.steps[sid]
            ch = self.checker(sid)
            e = ident("e" + sid)
            args = " ".join(ident("e" + p) for p in s.premises)
            if sid in roots or sid in cnf_negs or ch == "conjecture" or s.role == "conjecture":
                continue
            if sid in negs:
                out.append(f"  by_contra {e}")
            elif ch == "skolemize":
                out.extend(self._skolem_lines(s))
            elif ch == "definition":
                out.extend(self._definition_lines(s))
            elif ch == "avatar_definition":
                out.extend(self._label_lines(s))
            elif sid == self.proof.sink:
                out.append(f"  exact {ident('step_' + sid)} {args}".rstrip())
            else:
                out.append(f"  have {e} := {ident('step_' + sid)} {args}".rstrip())
        return out

    def _skolem_lines(self, s: DerivationStep) -> List[str]:
        from .replay import skolem_map
        prem = self.proof.steps[s.premises[0]]
        smap = skolem_map(s, prem.formula)
        e, ep = ident("e" + s.id), ident("e" + prem.id)
        names = ", ".join(ident(x.symbol) for x in smap)
        lines = [f"  have {e} := {ep}", f"  exists_prenex at {e}", f"  obtain ⟨{names}, {e}⟩ := {e}"]
        universals = ordered_vars(Clause(s.clause.literals)) if s.clause is not None else ()
        if universals and s.language == "cnf":
            lines.append(f"  specialize {e}")
        lines.append(f"  symm_match at {e}")
        return lines

    def _definition_lines(self, s: DerivationStep) -> List[str]:
        d = definition_record(s.formula)
        if d is None:
            raise EmitError(f"step {s.id} is not a definition")
        params = " ".join(ident(a) for a in d.args)
        lam = f"fun {params} => {formula(d.body, 0)}" if d.args else formula(d.body, 0)
        typ = " → ".join([SORT] * len(d.args) + ["Prop"])
        proof = {"iff": "Iff.rfl", "implies": "id", "implied": "id"}[d.polarity]
        if d.args:
            proof = f"fun {params} => {proof}"
        n = ident(d.symbol)
        return [f"  obtain ⟨{n}, {ident('e' + s.id)}⟩ : ∃ {n} : {typ}, {formula(s.formula)} :=",
                f"    ⟨{lam}, {proof}⟩"]

    def _label_lines(self, s: DerivationStep) -> List[str]:
        label, comp = label_definition(s.formula)
        n = ident(label)
        return [f"  obtain ⟨{n}, {ident('e' + s.id)}⟩ : ∃ {n} : Prop, {formula(_closed_statement(s.formula))} :=",
                f"    ⟨{formula(_close(s.formula.rhs), 0)}, Iff.rfl⟩"]


def _close(f: Formula) -> Formula:
    for v in reversed(ordered_vars(f)):
        f = Forall(v, f)
    return f


def _closed_statement(f: Formula) -> Formula:
    """Free variables are implicitly universal; a label names the closed component."""
    if label_definition(f) is not None:
        return Iff(f.lhs, _close(f.rhs))
    return _close(f)


def _conj_formula(u) -> Formula:
    p = u.payload
    if isinstance(p, Clause):
        from .terms import clause_to_formula
        return clause_to_formula(p)
    return p


def emit_script(problem: TptpProblem, proof: ProofGraph, report: Optional[CheckReport],
                allow_unverified: bool = False) -> str:
    if report is None or report.status != TRUSTED:
        if not allow_unverified:
            status = "unchecked" if report is None else report.status
            raise EmitError(f"refusing to emit a script for a proof with status {status}")
    sc = _Script(problem, proof, report)
    lines: List[str] = []
    if report is None or report.status != TRUSTED:
        status = "unchecked" if report is None else report.status
        lines += [f"-- WARNING: emitted without a trusted check (status: {status})", ""]
    lines += sc.part1()
    if sc.order:
        lines += [""] + sc.part2() + [""] + sc.part3()
    text = "\n".join(lines) + "\n"
    missing = reference_check(text)
    if missing:
        raise EmitError("undeclared names in emitted script: " + ", ".join(missing))
    return text


def emit_preamble(problem: TptpProblem) -> str:
    """Part 1 only (used for derivations with no steps)."""
    sc = _Script(problem, ProofGraph({}, (), ""), None)
    return "\n".join(sc.part1()) + "\n"


def emit_avatar_variant(problem: TptpProblem, proof: ProofGraph, report: CheckReport, sid: str) -> str:
    """The theorem for one step; asserted labels come first, in label-definition order."""
    sc = _Script(problem, proof, report)
    return "\n".join(sc.step_theorem(proof.steps[sid])) + "\n"


# ---------------------------------------------------------------- reference completeness

_IDENT = re.compile(r"«[^»]*»|[A-Za-z_][A-Za-z0-9_']*")
_TACTICS = frozenset("""
    grind simp_all bv_decide exists_prenex symm_match specialize intro let have obtain by_contra exact at by
    fun Iff rfl id default abbrev variable theorem goal Inhabited Type Prop True False Xor' α
""".split())


def _bound_names(line: str) -> Set[str]:
    out: Set[str] = set()
    for m in re.finditer(r"[∀∃]\s+([^,]+),", line):
        out.update(_IDENT.findall(m.group(1).split(":")[0]))
    for m in re.finditer(r"\(([^():]+) :", line):
        out.update(_IDENT.findall(m.group(1)))
    for pat in (r"^\s*intro (.*)$", r"^\s*by_contra (\S+)", r"^\s*(?:let|have) (\S+)", r"fun (.*?) =>",
                r"obtain ⟨([^⟩]*)⟩"):
        for m in re.finditer(pat, line):
            out.update(_IDENT.findall(m.group(1)))
    return out


def reference_check(text: str) -> List[str]:
    """Names used in the script that are neither declared in part 1, defined in part 2, nor bound locally."""
    declared: Set[str] = {SORT, DEFAULT_CONSTANT}
    theorems: Set[str] = set()
    problems: List[str] = []
    local: Set[str] = set()
    for raw in text.splitlines():
        line = raw.split("--", 1)[0]
        if not line.strip():
            continue
        m = re.match(r"variable \{(\S+) :", line)
        if m:
            declared.add(m.group(1))
            continue
        if line.startswith("abbrev "):
            continue
        m = re.match(r"theorem (\S+)", line)
        if m:
            local = set()
            theorems.add(m.group(1))
        local |= _bound_names(line)
        for tok in _IDENT.findall(line):
            if tok in _TACTICS or tok in _KEYWORDS or tok in declared or tok in theorems or tok in local:
                continue
            if tok not in problems:
                problems.append(tok)
    return problems
