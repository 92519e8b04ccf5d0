"""Command-line interface: check, emit-lean, stats, batch.

Every flag can also be set through an environment variable (``PROOFCHECK_`` +
the flag name in upper case with dashes as underscores); flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .emit import EmitError, emit_preamble, emit_script
from .kernel import DEFAULT_BUDGET
from .replay import DEFAULT_WALL, TRUSTED, CheckReport, ReplayConfig, load_routing, replay
from .tptp import TptpError, parse_derivation, parse_problem

EXIT_OK = 0
EXIT_UNTRUSTED = 1
EXIT_INPUT = 2

ENV_PREFIX = "PROOFCHECK_"


def _env(name: str, default=None):
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"), default)


def _env_flag(name: str) -> bool:
    return str(_env(name, "")).strip().lower() in ("1", "true", "yes", "on")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tptp-root", default=_env("tptp-root"), help="directory for resolving include() directives")
    p.add_argument("--budget-kernel", type=int, default=int(_env("budget-kernel", DEFAULT_BUDGET)),
                   help="kernel congruence-closure calls per step (default %(default)s)")
    p.add_argument("--budget-wall", type=float, default=float(_env("budget-wall", DEFAULT_WALL)),
                   help="wall-clock seconds per step (default %(default)s)")
    p.add_argument("--jobs", type=int, default=int(_env("jobs", 1)), help="parallel workers (default %(default)s)")
    p.add_argument("--routing", default=_env("routing"), help="JSON file mapping rule names to checkers")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="proofcheck", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="replay a derivation and report per-step verdicts")
    c.add_argument("problem")
    c.add_argument("proof")
    c.add_argument("--out", default=_env("out"), help="write the JSON report here")
    _common(c)

    e = sub.add_parser("emit-lean", help="check, then write a Lean-style proof script")
    e.add_argument("problem")
    e.add_argument("proof")
    e.add_argument("out")
    e.add_argument("--emit-unverified", action="store_true", default=_env_flag("emit-unverified"),
                   help="write the script even if the check is not trusted")
    _common(e)

    s = sub.add_parser("stats", help="aggregate a directory of JSON reports")
    s.add_argument("report_dir")
    s.add_argument("--out", default=_env("out"), help="write the per-report CSV here")

    b = sub.add_parser("batch", help="check every NAME.p / NAME.tstp pair in a directory")
    b.add_argument("directory")
    b.add_argument("--out", default=_env("out"), help="directory for JSON reports")
    _common(b)
    return ap


def _config(args) -> ReplayConfig:
    return ReplayConfig(routing=load_routing(args.routing), kernel_budget=args.budget_kernel,
                        wall_budget=args.budget_wall, jobs=max(1, args.jobs))


def _load(problem: str, proof: str, tptp_root: Optional[str]):
    prob = parse_problem(Path(problem).read_bytes(), tptp_root=tptp_root, path=problem)
    graph = parse_derivation(Path(proof).read_bytes(), path=proof)
    return prob, graph


def run_check(problem: str, proof: str, config: ReplayConfig, tptp_root: Optional[str]) -> CheckReport:
    prob, graph = _load(problem, proof, tptp_root)
    return replay(prob, graph, config, problem_name=Path(problem).name, proof_name=Path(proof).name)


def exit_code(report: CheckReport) -> int:
    return EXIT_OK if report.status == TRUSTED else EXIT_UNTRUSTED


def cmd_check(args) -> int:
    try:
        config = _config(args)
        report = run_check(args.problem, args.proof, config, args.tptp_root)
    except (TptpError, OSError, ValueError) as e:
        print(f"proofcheck: {e}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(report.summary())
    if args.out:
        try:
            Path(args.out).write_text(report.to_json(), encoding="utf-8")
        except OSError as e:
            print(f"proofcheck: {e}", file=sys.stderr)
            return EXIT_INPUT
    return exit_code(report)


def cmd_emit_lean(args) -> int:
    out = Path(args.out)
    if not out.parent.is_dir():
        print(f"proofcheck: output directory {out.parent} does not exist", file=sys.stderr)
        return EXIT_INPUT
    try:
        config = _config(args)
        prob = parse_problem(Path(args.problem).read_bytes(), tptp_root=args.tptp_root, path=args.problem)
        proof_text = Path(args.proof).read_bytes()
        if not proof_text.strip() and args.emit_unverified:
            out.write_text("-- WARNING: emitted without a trusted check (status: empty proof)\n\n"
                           + emit_preamble(prob), encoding="utf-8")
            return EXIT_OK
        graph = parse_derivation(proof_text, path=args.proof)
        report = replay(prob, graph, config, Path(args.problem).name, Path(args.proof).name)
    except (TptpError, OSError, ValueError) as e:
        print(f"proofcheck: {e}", file=sys.stderr)
        return EXIT_INPUT
    if report.status != TRUSTED and not args.emit_unverified:
        sys.stdout.write(report.summary())
        print(f"proofcheck: not emitting, status is {report.status}", file=sys.stderr)
        return EXIT_UNTRUSTED
    try:
        text = emit_script(prob, graph, report, allow_unverified=args.emit_unverified)
    except EmitError as e:
        print(f"proofcheck: {e}", file=sys.stderr)
        return EXIT_INPUT
    out.write_text(text, encoding="utf-8")
    if report.status != TRUSTED:
        print(f"proofcheck: warning: script emitted for a proof with status {report.status}", file=sys.stderr)
    return EXIT_OK


STATS_COLUMNS = ("report", "status", "category", "steps", "verified", "failed", "unsupported",
                 "resource_out", "semantic_only")


def collect_stats(report_dir: str) -> Tuple[dict, List[dict]]:
    totals = {"success": 0, "timeout": 0, "error": 0}
    rows = []
    for path in sorted(Path(report_dir).glob("*.json")):
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            row = {"report": path.name, "status": data["status"], "category": data["category"]}
            row.update({k: int(data["counts"][k]) for k in STATS_COLUMNS[3:]})
        except (OSError, ValueError, KeyError, TypeError) as e:
            print(f"proofcheck: warning: skipping {path.name}: {e}", file=sys.stderr)
            continue
        totals[row["category"]] = totals.get(row["category"], 0) + 1
        rows.append(row)
    return totals, rows


def stats_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=STATS_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def cmd_stats(args) -> int:
    if not Path(args.report_dir).is_dir():
        print(f"proofcheck: {args.report_dir} is not a directory", file=sys.stderr)
        return EXIT_INPUT
    totals, rows = collect_stats(args.report_dir)
    print(f"{'success':>9} | {'timeout':>9} | {'error':>9}")
    print(f"{totals['success']:>9} | {totals['timeout']:>9} | {totals['error']:>9}")
    text = stats_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def find_pairs(directory: str) -> List[Tuple[Path, Path]]:
    d = Path(directory)
    return [(p, p.with_suffix(".tstp")) for p in sorted(d.glob("*.p")) if p.with_suffix(".tstp").is_file()]


def cmd_batch(args) -> int:
    pairs = find_pairs(args.directory)
    if not pairs:
        print(f"proofcheck: no NAME.p / NAME.tstp pairs in {args.directory}", file=sys.stderr)
        return EXIT_INPUT
    out = Path(args.out) if args.out else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    try:
        routing = load_routing(args.routing)
    except (OSError, ValueError) as e:
        print(f"proofcheck: {e}", file=sys.stderr)
        return EXIT_INPUT
    # pairs run in parallel; steps inside one proof are checked sequentially
    config = ReplayConfig(routing=routing, kernel_budget=args.budget_kernel, wall_budget=args.budget_wall)

    def one(pair):
        try:
            return pair, run_check(str(pair[0]), str(pair[1]), config, args.tptp_root), None
        except (TptpError, OSError, ValueError) as e:
            return pair, None, e

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as ex:
        results = list(ex.map(one, pairs))
    worst = EXIT_OK
    for (prob, _), report, err in results:
        if err is not None:
            print(f"{prob.stem}: input error: {err}", file=sys.stderr)
            worst = max(worst, EXIT_INPUT)
            continue
        c = report.counts
        print(f"{prob.stem}: {report.status} ({c['verified']}/{c['steps']} verified)")
        if out is not None:
            (out / f"{prob.stem}.json").write_text(report.to_json(), encoding="utf-8")
        worst = max(worst, exit_code(report))
    return worst


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        parser = build_parser()
    except ValueError as e:
        print(f"proofcheck: bad {ENV_PREFIX}* environment value: {e}", file=sys.stderr)
        return EXIT_INPUT
    args = parser.parse_args(argv)
    handler = {"check": cmd_check, "emit-lean": cmd_emit_lean, "stats": cmd_stats, "batch": cmd_batch}
    return handler[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
