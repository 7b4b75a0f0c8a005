"""Discrete-time dynamic membership sessions.

Queries are answered from a committed snapshot plus change buffers.  A
background rebuild for the generating set frozen at step ``tau`` advances
``ceil(W / w)`` work units per step and is swapped in at exactly ``tau + w``;
the next rebuild starts at the same moment.

Work units: one set product, one reduction probe or one cache-entry
(charpoly/adjugate) computation or update.  Queries cost one unit each; the
randomized engine additionally records how many samples it drew.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import Closure, GroupContext
from .linalg.membership import LinalgEngine
from .sampling import (
    BudgetError,
    ChangeBuffer,
    SampleConfig,
    apply_change,
    enumerate_with_buffers,
    member_in,
    rebase,
)
from .subgroup_tree import SubgroupTree
from .tables import ceil_log2

log = logging.getLogger(__name__)


def default_window(engine: str, n: int) -> int:
    if engine == "rand":
        return max(1, ceil_log2(n))
    return max(1, math.ceil(math.log2(math.log2(n)))) if n > 2 else 1


def default_change_bound(engine: str, n: int, c: int = 1) -> int:
    if engine == "rand":
        return max(1, ceil_log2(n)) * c
    if n <= 4:
        return c
    lg = math.log2(n)
    return max(1, math.floor(lg / math.log2(lg))) * c


@dataclass
class SessionConfig:
    engine: str = "det"  # "det" or "rand"
    window: Optional[int] = None
    change_bound: Optional[int] = None
    seed: int = 0
    budget_c: int = 1
    sample: SampleConfig = field(default_factory=SampleConfig)


@dataclass
class Snapshot:
    S: frozenset
    trees: list
    engines: Optional[list] = None  # det engine: one per Sylow component


class RebuildTask:
    """Cooperative rebuild of the snapshot for a frozen generating set."""

    def __init__(self, session: "Session", S, start: int):
        self.S = frozenset(S)
        self.start = start
        g = session.gctx
        self.trees = [SubgroupTree(c.ctx, self.S, key=c.proj) for c in g.components]
        self.engines = None
        self.W = sum(t.predicted_work() for t in self.trees)
        if session.cfg.engine == "det":
            self.engines = [LinalgEngine(c.ctx, session.capacity(c), (), key=c.proj, lazy=True)
                            for c in g.components]
            self.W += sum(e.predicted_build() for e in self.engines)
        self.done = 0
        self._it = self._run()

    def _run(self):
        for tree in self.trees:
            yield from tree.build_iter()
        if self.engines is not None:
            for tree, eng in zip(self.trees, self.engines):
                # slots start as the root's reduced generators, placed directly
                for j, x in enumerate(tree.generators(1)):
                    eng.slots[j] = x
                    eng.slot_of[x] = j
                    eng.cache.columns[j] = eng._vec(x)
                yield from eng.cache.build_iter()

    @property
    def finished(self) -> bool:
        return self.done >= self.W

    def advance(self, units: int) -> int:
        k = 0
        while k < units and self.done < self.W:
            next(self._it)
            self.done += 1
            k += 1
        if self.done >= self.W:
            for _ in self._it:  # exhaust; must not yield further
                raise AssertionError("rebuild produced more work than predicted")
        return k

    def snapshot(self) -> Snapshot:
        assert self.finished
        return Snapshot(self.S, self.trees, self.engines)


class Session:
    def __init__(self, gctx: GroupContext, S0=(), cfg: Optional[SessionConfig] = None):
        self.gctx = gctx
        self.cfg = cfg or SessionConfig()
        if self.cfg.engine not in ("det", "rand"):
            raise ValueError(f"unknown engine {self.cfg.engine!r}")
        n = gctx.n
        self.w = self.cfg.window or default_window(self.cfg.engine, n)
        self.change_bound = self.cfg.change_bound or default_change_bound(self.cfg.engine, n, self.cfg.budget_c)
        self.clock = 0
        self.buf = ChangeBuffer()
        self.ledger: list[dict] = []
        self.commits = 0
        self._listing = None
        init = RebuildTask(self, S0, 0)
        init.advance(init.W)
        self.initial_work = init.W
        self.snap = init.snapshot()
        self.task = RebuildTask(self, self.effective, 0)
        self.W_history = [self.task.W]  # W of every rebuild task, in start order

    # -- helpers -------------------------------------------------------------

    def capacity(self, comp) -> int:
        return comp.ctx.m + 2 * self.w * self.change_bound

    @property
    def effective(self) -> set:
        return self.buf.effective(self.snap.S)

    @property
    def budget_per_step(self) -> int:
        return math.ceil(self.task.W / self.w)

    def _live_labels(self, tree, comp, stats) -> set:
        B = tree.generators(1)
        D = self.buf.D
        if not D.intersection(B):
            base = list(B)
        else:
            residual = tree.residual_generators(D, stats)
            closure = Closure(comp.ctx.table, comp.ctx.e)
            base = []
            for x in sorted(residual):
                stats["probes"] = stats.get("probes", 0) + 1
                y = int(comp.proj[x])
                if y not in closure:
                    base.append(x)
                    closure.add(y)
        return set(base) | self.buf.I

    def _sync_live(self) -> int:
        """Bring the det engine's live columns in line with the buffers."""
        if self.snap.engines is None:
            return 0
        units = 0
        for comp, tree, eng in zip(self.gctx.components, self.snap.trees, self.snap.engines):
            stats = {}
            target = self._live_labels(tree, comp, stats)
            units += stats.get("probes", 0) + stats.get("lists", 0)
            units += eng.set_labels(target)
        return units

    # -- dynamics ------------------------------------------------------------

    def step(self, changes=()) -> dict:
        changes = [(str(k).lower(), int(x)) for k, x in changes]
        if len(changes) > self.change_bound:
            raise BudgetError(f"{len(changes)} changes exceed per-step bound {self.change_bound}")
        for kind, x in changes:
            if not 0 <= x < self.gctx.n:
                raise ValueError(f"element {x} out of range")
        self.clock += 1
        for kind, x in changes:
            apply_change(self.buf, kind, x, self.snap.S)
        change_units = self._sync_live() if changes else 0
        budget = self.budget_per_step
        W = self.task.W
        rebuild = self.task.advance(budget)
        committed = False
        if self.clock == self.task.start + self.w:
            if not self.task.finished:
                raise AssertionError("rebuild not finished at window end")
            eff = self.effective
            self.snap = self.task.snapshot()
            self.buf = rebase(self.buf, eff, self.snap.S)
            change_units += self._sync_live()
            self.commits += 1
            committed = True
            self.task = RebuildTask(self, eff, self.clock)
            self.W_history.append(self.task.W)
        if len(self.buf) > 2 * self.w * self.change_bound:
            raise AssertionError("buffer bound violated")
        rec = {"clock": self.clock, "changes": len(changes), "rebuild": rebuild, "change": change_units,
               "query": 0, "samples": 0, "committed": committed, "buffer": len(self.buf),
               "budget": budget, "W": W}
        self.ledger.append(rec)
        self._listing = None
        return rec

    def query(self, g: int) -> bool:
        g = int(g)
        rec = self.ledger[-1] if self.ledger else None
        if rec is not None:
            rec["query"] += 1
        if self.cfg.engine == "det":
            return all(eng.member(g) for eng in self.snap.engines)
        if self._listing is None:
            rng = np.random.default_rng([self.cfg.seed, self.clock])
            self._listing = enumerate_with_buffers(self.gctx, self.snap.trees, self.buf, self.cfg.sample, rng)
            if rec is not None:
                rec["samples"] += self.cfg.sample.sample_count(self.gctx.n) * len(self.gctx.components)
        return member_in(self.gctx, self._listing, g)

    def witness(self, g: int):
        """Per-component exponent maps for ``g`` (det engine only)."""
        if self.cfg.engine != "det":
            raise ValueError("witnesses come from the deterministic engine")
        return [eng.witness(int(g)) for eng in self.snap.engines]


def new_session(engine: str, gctx: GroupContext, S0=(), w: Optional[int] = None,
                change_bound: Optional[int] = None, seed: int = 0, **kw) -> Session:
    return Session(gctx, S0, SessionConfig(engine=engine, window=w, change_bound=change_bound, seed=seed, **kw))


def step(session: Session, changes=()) -> dict:
    return session.step(changes)


def query(session: Session, g: int) -> bool:
    return session.query(g)


def work_report(session: Session) -> dict:
    steps = session.ledger
    rebuild = [r["rebuild"] for r in steps]
    total = [r["rebuild"] + r["change"] + r["query"] for r in steps]
    return {
        "steps": len(steps),
        "window": session.w,
        "change_bound": session.change_bound,
        "W": session.W_history,
        "initial_work": session.initial_work,
        "commits": session.commits,
        "max_rebuild": max(rebuild, default=0),
        "mean_rebuild": (sum(rebuild) / len(rebuild)) if rebuild else 0.0,
        "max_total": max(total, default=0),
        "mean_total": (sum(total) / len(total)) if total else 0.0,
        "per_step": [dict(r) for r in steps],
    }


# -- event scripts ---------------------------------------------------------------

class ScriptError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def parse_script(text: str) -> list[tuple]:
    """Commands as ``(line, op, arg, expect)`` tuples."""
    out = []
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        op = parts[0].upper()
        try:
            if op == "STEP" and len(parts) == 1:
                out.append((i, "STEP", None, None))
            elif op in ("INSERT", "DELETE", "QUERY") and len(parts) == 2:
                out.append((i, op, int(parts[1]), None))
            elif op == "ASSERT" and len(parts) == 3 and parts[2].upper() in ("IN", "OUT"):
                out.append((i, op, int(parts[1]), parts[2].upper() == "IN"))
            else:
                raise ScriptError(i, f"cannot parse {raw.strip()!r}")
        except ValueError as exc:
            if isinstance(exc, ScriptError):
                raise
            raise ScriptError(i, f"bad element in {raw.strip()!r}") from None
    return out


def run_script(session: Session, commands, oracle=None) -> dict:
    """Execute parsed commands; ``oracle(effective_set, g)`` enables checking.

    Returns a report with one record per STEP.  Failed ASSERTs and oracle
    mismatches are collected in ``failures`` (line-numbered).
    """
    records, pending, failures = [], [], []
    current = {"queries": []}
    stats = {"queries": 0, "false_negatives": 0, "false_positives": 0}
    for line, op, x, expect in commands:
        if op in ("INSERT", "DELETE"):
            if not 0 <= x < session.gctx.n:
                raise ScriptError(line, f"element {x} out of range")
            pending.append((op.lower(), x))
        elif op == "STEP":
            try:
                rec = session.step(pending)
            except BudgetError as exc:
                raise ScriptError(line, str(exc)) from None
            pending = []
            current = {"clock": rec["clock"], "changes": rec["changes"], "queries": [],
                       "work": {k: rec[k] for k in ("rebuild", "change", "query")}, "committed": rec["committed"]}
            records.append(current)
        else:
            if not 0 <= x < session.gctx.n:
                raise ScriptError(line, f"element {x} out of range")
            ans = session.query(x)
            q = {"line": line, "g": x, "answer": ans}
            stats["queries"] += 1
            if oracle is not None:
                truth = oracle(session.effective, x)
                q["oracle"] = truth
                if ans and not truth:
                    stats["false_positives"] += 1
                    failures.append({"line": line, "kind": "false-positive", "g": x})
                elif truth and not ans:
                    stats["false_negatives"] += 1
                    if session.cfg.engine == "det":
                        failures.append({"line": line, "kind": "false-negative", "g": x})
            if op == "ASSERT" and ans != expect:
                failures.append({"line": line, "kind": "assert", "g": x, "expected": expect, "answer": ans})
            current["queries"].append(q)
            if records:
                current["work"]["query"] = session.ledger[-1]["query"]
    if pending:
        log.warning("%d changes after the last STEP were not applied", len(pending))
    return {"records": records, "failures": failures, "stats": stats, "unapplied": len(pending)}
