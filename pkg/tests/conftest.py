from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from proofcheck.replay import replay  # noqa: E402
from proofcheck.tptp import parse_derivation, parse_problem  # noqa: E402

DATA = Path(__file__).resolve().parents[1] / "src" / "proofcheck" / "data"
GROUP_THEORY = DATA / "group_theory"
CORPUS = DATA / "corpus"
GOLDEN = Path(__file__).parent / "golden"


def load_pair(problem: Path, proof: Path):
    return parse_problem(problem.read_bytes(), path=str(problem)), parse_derivation(proof.read_bytes(), path=str(proof))


def corpus_pairs():
    return [(p, p.with_suffix(".tstp")) for p in sorted(CORPUS.glob("*.p"))]


@pytest.fixture(scope="session")
def group_theory():
    prob, graph = load_pair(GROUP_THEORY / "group.p", GROUP_THEORY / "group.tstp")
    return prob, graph, replay(prob, graph, problem_name="group.p", proof_name="group.tstp")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
