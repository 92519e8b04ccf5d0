from __future__ import annotations

import csv
import io
import json
import shutil

from conftest import CORPUS, GROUP_THEORY, GOLDEN
from proofcheck.cli import EXIT_INPUT, EXIT_OK, EXIT_UNTRUSTED, main

PROB, PROOF = str(GROUP_THEORY / "group.p"), str(GROUP_THEORY / "group.tstp")


def test_check_trusted(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["check", PROB, PROOF, "--out", str(out)]) == EXIT_OK
    assert "TrustedRefutation" in capsys.readouterr().out
    assert json.loads(out.read_text())["counts"]["verified"] == 16


def test_check_untrusted_and_bad_input(tmp_path, capsys):
    proof = tmp_path / "p.tstp"
    proof.write_text((GROUP_THEORY / "group.tstp").read_text().replace("forward_demodulation, [], [80, 25]",
                                                             "mystery_rule, [], [80, 25]"))
    assert main(["check", PROB, str(proof)]) == EXIT_UNTRUSTED
    assert main(["check", PROB, str(tmp_path / "missing.tstp")]) == EXIT_INPUT
    bad = tmp_path / "bad.tstp"
    bad.write_text("cnf(1, axiom, p(.")
    assert main(["check", PROB, str(bad)]) == EXIT_INPUT
    err = capsys.readouterr().err
    assert "bad.tstp:1:" in err


def test_emit_lean(tmp_path):
    out = tmp_path / "group_theory.lean"
    assert main(["emit-lean", PROB, PROOF, str(out)]) == EXIT_OK
    assert out.read_text(encoding="utf-8") == (GOLDEN / "group_theory.lean").read_text(encoding="utf-8")
    assert main(["emit-lean", PROB, PROOF, str(tmp_path / "nodir" / "x.lean")]) == EXIT_INPUT


def test_emit_lean_untrusted(tmp_path, capsys):
    prob, proof = str(CORPUS / "unsupported_rule.p"), str(CORPUS / "unsupported_rule.tstp")
    out = tmp_path / "u.lean"
    assert main(["emit-lean", prob, proof, str(out)]) == EXIT_UNTRUSTED
    assert not out.exists()
    assert main(["emit-lean", prob, proof, str(out), "--emit-unverified"]) == EXIT_OK
    assert out.read_text(encoding="utf-8").startswith("-- WARNING")
    assert "warning" in capsys.readouterr().err


def test_emit_lean_empty_proof(tmp_path):
    empty = tmp_path / "empty.tstp"
    empty.write_text("")
    out = tmp_path / "e.lean"
    assert main(["emit-lean", PROB, str(empty), str(out)]) == EXIT_INPUT
    assert main(["emit-lean", PROB, str(empty), str(out), "--emit-unverified"]) == EXIT_OK
    text = out.read_text(encoding="utf-8")
    assert "variable {mul : ι → ι → ι}" in text and "theorem" not in text


def test_env_vars_and_flag_precedence(tmp_path, monkeypatch):
    monkeypatch.setenv("PROOFCHECK_BUDGET_KERNEL", "not-a-number")
    assert main(["check", PROB, PROOF]) == EXIT_INPUT
    monkeypatch.setenv("PROOFCHECK_BUDGET_KERNEL", "100000")
    out = tmp_path / "env.json"
    monkeypatch.setenv("PROOFCHECK_OUT", str(out))
    assert main(["check", PROB, PROOF]) == EXIT_OK
    assert out.exists()
    flag_out = tmp_path / "flag.json"
    assert main(["check", PROB, PROOF, "--out", str(flag_out)]) == EXIT_OK
    assert flag_out.exists()
    routing = tmp_path / "routing.json"
    routing.write_text(json.dumps({"input": "input", "negated_conjecture": "negated_conjecture"}))
    monkeypatch.setenv("PROOFCHECK_ROUTING", str(routing))
    assert main(["check", PROB, PROOF]) == EXIT_UNTRUSTED
    from proofcheck.replay import default_routing
    full = tmp_path / "full.json"
    full.write_text(json.dumps(default_routing()))
    assert main(["check", PROB, PROOF, "--routing", str(full)]) == EXIT_OK


def _report(tmp_path, name, status, category):
    counts = {"steps": 3, "verified": 3 if category == "success" else 2, "failed": 0, "unsupported": 0,
              "resource_out": 0 if category == "success" else 1, "semantic_only": 0}
    (tmp_path / name).write_text(json.dumps({"status": status, "category": category, "counts": counts}))


def test_stats(tmp_path, capsys):
    _report(tmp_path, "a.json", "TrustedRefutation", "success")
    _report(tmp_path, "b.json", "Incomplete", "timeout")
    (tmp_path / "junk.json").write_text("{not json")
    csv_out = tmp_path / "stats.csv"
    assert main(["stats", str(tmp_path), "--out", str(csv_out)]) == EXIT_OK
    captured = capsys.readouterr()
    table = captured.out.splitlines()
    assert [c.strip() for c in table[1].split("|")] == ["1", "1", "0"]
    assert "junk.json" in captured.err
    rows = list(csv.DictReader(io.StringIO(csv_out.read_text())))
    assert [r["report"] for r in rows] == ["a.json", "b.json"]
    assert sum(int(r["verified"]) for r in rows) == 5
    assert sum(int(r["resource_out"]) for r in rows) == 1


def test_stats_empty_dir(tmp_path, capsys):
    assert main(["stats", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert [c.strip() for c in out[1].split("|")] == ["0", "0", "0"]
    assert out[2].startswith("report,status,category")
    assert main(["stats", str(tmp_path / "nope")]) == EXIT_INPUT


def test_batch_and_stats_round_trip(tmp_path, capsys):
    src = tmp_path / "in"
    src.mkdir()
    for stem in ("sup_basic", "unsupported_rule"):
        for ext in (".p", ".tstp"):
            shutil.copy(CORPUS / f"{stem}{ext}", src / f"{stem}{ext}")
    reports = tmp_path / "reports"
    assert main(["batch", str(src), "--out", str(reports), "--jobs", "2"]) == EXIT_UNTRUSTED
    out = capsys.readouterr().out
    assert "sup_basic: TrustedRefutation" in out and "unsupported_rule: Incomplete" in out
    assert sorted(p.name for p in reports.iterdir()) == ["sup_basic.json", "unsupported_rule.json"]
    assert main(["stats", str(reports)]) == EXIT_OK
    assert [c.strip() for c in capsys.readouterr().out.splitlines()[1].split("|")] == ["1", "0", "1"]
    assert main(["batch", str(tmp_path / "reports")]) == EXIT_INPUT
