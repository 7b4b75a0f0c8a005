"""Recovering a group table from a slightly corrupted copy.

If ``M`` differs from a group table in at most ``delta * n`` cells with
``delta < 1/13``, the identity is the unique row fixing a strict majority of
columns, and every product ``x_i x_j`` is the strict-majority value of
``M(M(i, z), M(w, j))`` over the pairs with ``M(z, w) = e``.
"""
from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Optional

import numpy as np

from .algebra import GroupContext
from .scheduler import Session, SessionConfig
from .tables import CayleyTable, Structure, ceil_log2, validate_table

log = logging.getLogger(__name__)

RADIUS = Fraction(1, 13)


def find_identity(M: CayleyTable) -> Optional[int]:
    n = M.n
    fixed = (M.op == np.arange(n)[None, :]).sum(axis=1)
    cand = np.flatnonzero(2 * fixed > n)
    if len(cand) != 1:
        if len(cand) > 1:
            log.info("several rows fix a majority of columns: %s", cand.tolist())
        return None
    return int(cand[0])


def identity_pairs(M: CayleyTable, e: int) -> np.ndarray:
    """``(k, 2)`` array of pairs ``(z, w)`` with ``M(z, w) = e``."""
    return np.argwhere(M.op == e)


def pair_count_ok(count: int, n: int, delta=RADIUS) -> bool:
    return (1 - delta) * n <= count <= (1 + delta) * n


def majority_table(M: CayleyTable, pairs: np.ndarray) -> Optional[np.ndarray]:
    """Cell-wise strict-majority vote, ``None`` if any cell has no majority."""
    n = M.n
    op = M.op
    z, w = pairs[:, 0], pairs[:, 1]
    s = len(z)
    if s == 0:
        return None
    L = op[:, z]  # n x s: M(i, z_k)
    R = op[w, :]  # s x n: M(w_k, j)
    out = np.empty((n, n), dtype=np.int64)
    # row blocks keep the n x n x s vote tensor small
    block = max(1, (1 << 22) // max(1, n * s))
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        V = op[L[lo:hi, None, :], R.T[None, :, :]]  # (hi-lo) x n x s
        rows = (hi - lo) * n
        flat = (np.arange(rows)[:, None] * n + V.reshape(rows, s)).ravel()
        counts = np.bincount(flat, minlength=rows * n).reshape(rows, n)
        best = counts.argmax(axis=1)
        if np.any(2 * counts[np.arange(rows), best] <= s):
            return None
        out[lo:hi] = best.reshape(hi - lo, n)
    return out


def decode(M: CayleyTable, delta=RADIUS) -> Optional[CayleyTable]:
    """The nearby group table, or ``None`` outside the decoding radius."""
    e = find_identity(M)
    if e is None:
        return None
    pairs = identity_pairs(M, e)
    if not pair_count_ok(len(pairs), M.n, delta):
        return None
    out = majority_table(M, pairs)
    if out is None:
        return None
    T = CayleyTable(out)
    if validate_table(T).tag < Structure.GROUP:
        return None
    return T


def corrupt(t: CayleyTable, delta: float, rng: np.random.Generator, count: Optional[int] = None):
    """Copy of ``t`` with ``floor(delta * n)`` cells changed to other values."""
    n = t.n
    k = int(math.floor(delta * n)) if count is None else int(count)
    cells = rng.choice(n * n, size=k, replace=False)
    op = t.op.copy()
    for c in cells:
        i, j = divmod(int(c), n)
        op[i, j] = (op[i, j] + int(rng.integers(1, n))) % n
    return CayleyTable(op), [divmod(int(c), n) for c in cells]


# -- dynamic tables ----------------------------------------------------------------

class DynamicTableSession:
    """Membership over a table that itself changes between steps.

    Each step the current table is decoded (memoized by digest).  While the
    decoded group equals the committed one, queries go to a plain session.
    A different abelian group starts a ``ceil(log2 n)``-step switch window
    during which answers are ``False`` and flagged ``provisional``.  When no
    abelian group decodes, answers are flagged ``undefined`` and kept
    consistent by remembering them.
    """

    def __init__(self, table: CayleyTable, S0=(), engine: str = "det", seed: int = 0,
                 table_budget_c: int = 1, change_bound: Optional[int] = None):
        self.M = table
        self.n = table.n
        self.engine = engine
        self.seed = seed
        self.change_bound = change_bound
        self.table_budget = max(1, self.n // max(1, ceil_log2(self.n))) * table_budget_c
        self.w = max(1, ceil_log2(self.n))
        self.S = set(int(x) for x in S0)
        self.clock = 0
        self._decoded = {}
        self.decodes = 0
        self.memo = {}
        self.pending = None  # (digest, table, start)
        G = self._decode(table)
        if G is None or validate_table(G).tag != Structure.ABELIAN_GROUP:
            raise ValueError("initial table does not decode to an abelian group")
        self.G = G
        self.session = self._new_session(G)
        self.state = "normal"

    def _decode(self, M: CayleyTable) -> Optional[CayleyTable]:
        key = M.digest()
        if key not in self._decoded:
            self.decodes += 1
            self._decoded[key] = decode(M)
        return self._decoded[key]

    def _new_session(self, G: CayleyTable) -> Session:
        cfg = SessionConfig(engine=self.engine, seed=self.seed, change_bound=self.change_bound)
        return Session(GroupContext(G), self.S, cfg)

    def step(self, table_changes=(), gen_changes=()) -> str:
        table_changes = list(table_changes)
        if len(table_changes) > self.table_budget:
            raise ValueError(f"{len(table_changes)} table changes exceed bound {self.table_budget}")
        self.clock += 1
        if table_changes:
            self.M = self.M.with_entries(table_changes)
        G = self._decode(self.M)
        prev = self.state
        gen_changes = list(gen_changes)
        self._fold(gen_changes)
        abelian = G is not None and validate_table(G).tag == Structure.ABELIAN_GROUP
        if abelian and G == self.G:
            self.pending = None
            if prev == "normal":
                self.session.step(gen_changes)
            else:
                self.session = self._new_session(G)
            self.state = "normal"
        elif abelian:
            if self.pending is None or self.pending[1] != G:
                self.pending = (G.digest(), G, self.clock)
            if self.clock >= self.pending[2] + self.w:
                self.G = G
                self.session = self._new_session(G)
                self.pending = None
                self.state = "normal"
            else:
                self.state = "provisional"
        else:
            self.pending = None
            self.state = "undefined"
        if self.state == "normal" and prev != "normal":
            self.memo = {}
        return self.state

    def _fold(self, gen_changes) -> None:
        for kind, x in gen_changes:
            if kind == "insert":
                self.S.add(int(x))
            elif kind == "delete":
                self.S.discard(int(x))

    def query(self, g: int) -> tuple[bool, Optional[str]]:
        g = int(g)
        if self.state == "normal":
            return self.session.query(g), None
        if self.state == "provisional":
            return False, "provisional"
        if g not in self.memo:
            self.memo[g] = False
        return self.memo[g], "undefined"


def dynamic_table_session(table: CayleyTable, steps, S0=(), engine: str = "det", seed: int = 0):
    """Run ``(table_changes, gen_changes, queries)`` steps; answers per step."""
    s = DynamicTableSession(table, S0, engine=engine, seed=seed)
    out = []
    for table_changes, gen_changes, queries in steps:
        s.step(table_changes, gen_changes)
        out.append([s.query(g) for g in queries])
    return out
