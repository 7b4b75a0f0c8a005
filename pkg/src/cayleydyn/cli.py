"""Command-line driver: ``cayleydyn <command> ...``.

Exit codes: 0 ok, 1 assertion or check failure, 2 usage/input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .algebra import GroupContext, NotAbelianError
from .decoder import corrupt, decode
from .isomorphism import isomorphic
from .oracle import bfs_membership
from .sampling import BudgetError
from .scheduler import ScriptError, Session, SessionConfig, parse_script, run_script, work_report
from .tables import CayleyTable, TableError, parse_spec, validate_table

log = logging.getLogger("cayleydyn")

REPORT_VERSION = 1


class UsageError(Exception):
    pass


def threads() -> int:
    raw = os.environ.get("CAYLEYDYN_THREADS", "0")
    try:
        k = int(raw)
    except ValueError:
        raise UsageError(f"CAYLEYDYN_THREADS must be an integer, got {raw!r}") from None
    if k < 0:
        raise UsageError("CAYLEYDYN_THREADS must be >= 0")
    return k


def _load(path) -> CayleyTable:
    try:
        return CayleyTable.load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _gens(s: str) -> list[int]:
    s = s.strip()
    if not s:
        return []
    try:
        return [int(x) for x in s.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise UsageError(f"bad generator list {s!r}") from None


def _context(t: CayleyTable) -> GroupContext:
    try:
        return GroupContext(t)
    except NotAbelianError as exc:
        raise UsageError(str(exc)) from None


def _dump(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True) + "\n"
    lines = []
    for k, v in report.items():
        if isinstance(v, list):
            lines.append(f"{k}: {len(v)} entries")
        else:
            lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


# -- commands ----------------------------------------------------------------------

def cmd_gen(args) -> int:
    rng = np.random.default_rng(args.seed)
    t = parse_spec(args.spec, rng)
    _write(t.to_text(), args.output)
    return 0


def cmd_validate(args) -> int:
    t = _load(args.table)
    sc = validate_table(t)
    _write(f"{sc.tag.name} n={t.n} identity={sc.identity}\n", None)
    return 0


def _session_cfg(args) -> SessionConfig:
    return SessionConfig(engine=args.engine, window=args.window, change_bound=args.budget, seed=args.seed)


def cmd_run(args) -> int:
    t = _load(args.table)
    g = _context(t)
    try:
        with open(args.script) as fh:
            commands = parse_script(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {args.script}: {exc.strerror}") from None
    for line, op, x, _ in commands:
        if x is not None and not 0 <= x < t.n:
            raise ScriptError(line, f"element {x} out of range")
    session = Session(g, _gens(args.initial), _session_cfg(args))
    oracle = (lambda eff, x: bfs_membership(t, g.e, eff, x)) if args.check else None
    result = run_script(session, commands, oracle)
    wr = work_report(session)
    report = {
        "v": REPORT_VERSION,
        "engine": args.engine,
        "seed": args.seed,
        "window": session.w,
        "change_bound": session.change_bound,
        "records": result["records"],
        "failures": result["failures"],
        "summary": {
            "steps": wr["steps"],
            "swaps": wr["commits"],
            "max_rebuild": wr["max_rebuild"],
            "mean_rebuild": wr["mean_rebuild"],
            "max_total": wr["max_total"],
            "W": wr["W"],
            "unapplied": result["unapplied"],
            **({"check": result["stats"]} if args.check else {}),
        },
    }
    _write(_dump(report, args.report), args.output)
    for f in result["failures"]:
        sys.stderr.write(f"line {f['line']}: {f['kind']} for element {f['g']}\n")
    return 1 if result["failures"] else 0


def cmd_iso(args) -> int:
    t1, t2 = _load(args.table1), _load(args.table2)
    g1, g2 = _context(t1), _context(t2)
    S1, S2 = _gens(args.gens1), _gens(args.gens2)
    for S, t in ((S1, t1), (S2, t2)):
        if any(not 0 <= x < t.n for x in S):
            raise UsageError("generator out of range")
    _write("ISOMORPHIC\n" if isomorphic(g1, S1, g2, S2) else "NOT-ISOMORPHIC\n", None)
    return 0


def cmd_decode(args) -> int:
    out = decode(_load(args.table))
    if out is None:
        _write("DECODE-FAIL\n", args.output)
        return 1
    _write(out.to_text(), args.output)
    return 0


def cmd_corrupt(args) -> int:
    t = _load(args.table)
    if not 0 <= args.delta:
        raise UsageError("delta must be non-negative")
    M, _ = corrupt(t, args.delta, np.random.default_rng(args.seed))
    _write(M.to_text(), args.output)
    return 0


def bench_rows(t: CayleyTable, engine: str, steps: int, budget, seed: int, window=None):
    """Random session; returns (session, rows)."""
    g = GroupContext(t)
    rng = np.random.default_rng([seed, 1])
    session = Session(g, (), SessionConfig(engine=engine, window=window, change_bound=budget, seed=seed))
    rows = []
    for _ in range(steps):
        k = int(rng.integers(0, session.change_bound + 1))
        eff = sorted(session.effective)
        changes = []
        for _ in range(k):
            if eff and rng.random() < 0.4:
                changes.append(("delete", int(rng.choice(eff))))
            else:
                changes.append(("insert", int(rng.integers(0, t.n))))
        rec = session.step(changes)
        session.query(int(rng.integers(0, t.n)))
        rows.append(dict(rec))
    return session, rows


def cmd_bench(args) -> int:
    rng = np.random.default_rng(args.seed)
    t = parse_spec(args.spec, rng)
    if validate_table(t).tag.name != "ABELIAN_GROUP":
        raise UsageError("bench needs an abelian group spec")
    session, rows = bench_rows(t, args.engine, args.steps, args.budget, args.seed, args.window)
    w = session.w
    worst, ok = 0.0, True
    lines = ["step,rebuild,change,query,budget,W,ratio"]
    for r in rows:
        ratio = r["rebuild"] / max(1, r["W"])
        worst = max(worst, ratio)
        ok &= r["rebuild"] <= r["budget"]
        lines.append(f"{r['clock']},{r['rebuild']},{r['change']},{r['query']},{r['budget']},{r['W']},{ratio:.4f}")
    Wmin = min(session.W_history)
    summary = {
        "v": REPORT_VERSION,
        "spec": args.spec,
        "engine": args.engine,
        "n": t.n,
        "window": w,
        "change_bound": session.change_bound,
        "steps": args.steps,
        "swaps": session.commits,
        "W_min": Wmin,
        "W_max": max(session.W_history),
        "max_rebuild": max((r["rebuild"] for r in rows), default=0),
        "max_rebuild_over_W": worst,
        "ratio_bound": 2 / w,
        "within_bound": bool(ok and worst <= 2 / w),
        "threads": threads(),
    }
    if args.csv:
        _write("\n".join(lines) + "\n", args.csv)
    _write(_dump(summary, args.report), None)
    return 0 if summary["within_bound"] else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cayleydyn", description="Dynamic membership over Cayley tables.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a table")
    p.add_argument("spec")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("validate", help="classify a table")
    p.add_argument("table")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="execute an event script")
    p.add_argument("table")
    p.add_argument("script")
    p.add_argument("--engine", choices=("rand", "det"), default="det")
    p.add_argument("--window", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--initial", default="", help="comma-separated initial generators")
    p.add_argument("--check", action="store_true")
    p.add_argument("--report", choices=("json", "text"), default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("iso", help="decide <S1> ~= <S2>")
    p.add_argument("table1")
    p.add_argument("gens1")
    p.add_argument("table2")
    p.add_argument("gens2")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("decode", help="correct a corrupted group table")
    p.add_argument("table")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("corrupt", help="corrupt floor(delta n) cells")
    p.add_argument("table")
    p.add_argument("--delta", type=float, default=0.07)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("bench", help="work per step of a random session")
    p.add_argument("spec")
    p.add_argument("--engine", choices=("rand", "det"), default="det")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--budget", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv")
    p.add_argument("--report", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        threads()
        return args.func(args)
    except (UsageError, TableError, ScriptError, BudgetError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
