"""Small constructors for writing clauses and formulas in TPTP syntax inside tests."""

from __future__ import annotations

from proofcheck.tptp import parse_problem


def C(text: str):
    """A clause from TPTP CNF syntax."""
    return parse_problem(f"cnf(t, axiom, {text}).").units[0].payload


def F(text: str):
    """A formula from TPTP FOF syntax."""
    return parse_problem(f"fof(t, axiom, {text}).").units[0].payload


def T(text: str):
    """A term, read as the left side of an equation."""
    return C(f"{text} = {text}").literals[0].args[0]
