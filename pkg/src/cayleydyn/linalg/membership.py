"""Deterministic membership in abelian p-groups by integer linear algebra.

``g`` lies in ``<x_1..x_r>`` iff ``sum_j z_j alpha_j = beta`` is solvable mod
the basis orders, where ``alpha_j`` and ``beta`` are exponent vectors.  After
scaling row ``i`` by ``p^(m - m_i)`` every congruence is mod ``p^m`` and the
system becomes ``A~ z = b`` over the integers with ``A~ = [A | p^m I]``.

Solvability is read off maximal minors: it holds iff the p-adic valuation of
the gcd of the ``l x l`` minors of ``A~`` does not drop when ``b`` is appended
as an extra column.  The cache keeps, for every ``l``-column selection ``M``
of ``A~``, the characteristic polynomial and polynomial adjugate of
``xi I - M``, which are updated in place when columns change.  Minors that
involve ``b`` come from Cramer's rule on the cached adjugates.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from ..algebra import PGroupContext
from .intmat import solve_integer
from .polymat import adj_from_charadj, char_update, charpoly_adj, det_from_charpoly

log = logging.getLogger(__name__)

MAX_COLUMNS = 24
MAX_RANK = 10
MAX_ENTRIES = 50_000
CHUNK = 3  # columns per rank-t update


class GuardError(ValueError):
    pass


def valuation(x: int, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def scaled_vector(ctx: PGroupContext, g: int) -> list[int]:
    """Exponent vector of ``g`` with coordinate ``i`` scaled by ``p^(m - m_i)``."""
    pm = ctx.p ** ctx.m
    return [int(c) * (pm // o) for c, o in zip(ctx.expvec[g], ctx.orders)]


@dataclass
class LinearSystem:
    A: list  # l x r
    At: list  # l x (r + l)
    b: list
    p: int
    m: int
    T: list

    @property
    def rank(self) -> int:
        return len(self.b)


def encode_system(ctx: PGroupContext, T, g: int, budget: Optional[int] = None) -> LinearSystem:
    T = [int(x) for x in T]
    if budget is not None and len(T) > budget:
        raise GuardError(f"{len(T)} generators exceed budget {budget}")
    l = ctx.rank
    pm = ctx.p ** ctx.m
    cols = [scaled_vector(ctx, x) for x in T]
    A = [[cols[j][i] for j in range(len(T))] for i in range(l)]
    At = [A[i] + [pm if k == i else 0 for k in range(l)] for i in range(l)]
    return LinearSystem(A, At, scaled_vector(ctx, g), ctx.p, ctx.m, T)


# -- cache of column selections ---------------------------------------------------

@dataclass
class Entry:
    key: tuple
    d: tuple  # det(xi I - M)
    adj: list  # adj(xi I - M)
    det: int
    adj_M: list  # adj(M)


def _make_entry(key, d, adj, l) -> Entry:
    return Entry(key, d, adj, det_from_charpoly(d, l), adj_from_charadj(adj, l))


class SubmatrixCache:
    """Charpolys and adjugates for every ``l``-subset of columns."""

    def __init__(self, l: int, p: int, columns, lazy: bool = False):
        columns = [[int(x) for x in c] for c in columns]
        if l > MAX_RANK:
            raise GuardError(f"rank {l} exceeds guard {MAX_RANK}")
        if len(columns) > MAX_COLUMNS:
            raise GuardError(f"{len(columns)} columns exceed guard {MAX_COLUMNS}")
        if l and math.comb(len(columns), l) > MAX_ENTRIES:
            raise GuardError("too many column selections")
        self.l = l
        self.p = p
        self.columns = columns
        self.entries: dict[tuple, Entry] = {}
        self.units = 0
        self._stack = None
        if not lazy:
            for _ in self.build_iter():
                pass

    @property
    def keys(self):
        return list(combinations(range(len(self.columns)), self.l)) if self.l else []

    def entry_count(self) -> int:
        return math.comb(len(self.columns), self.l) if self.l else 0

    def submatrix(self, key) -> list:
        return [[self.columns[c][i] for c in key] for i in range(self.l)]

    def build_iter(self):
        for key in self.keys:
            d, adj = charpoly_adj(self.submatrix(key))
            self.entries[key] = _make_entry(key, d, adj, self.l)
            self.units += 1
            yield
        self._stack = None

    # -- updates -------------------------------------------------------------

    def update_columns(self, changes: dict) -> int:
        """Replace columns, as rank-at-most-``CHUNK`` updates of every entry
        touching them.  Returns the number of entry updates performed."""
        changes = {int(c): [int(x) for x in v] for c, v in changes.items()
                   if [int(x) for x in v] != self.columns[int(c)]}
        if not changes or not self.l:
            for c, v in changes.items():
                self.columns[c] = v
            return 0
        order = sorted(changes)
        done = 0
        for s in range(0, len(order), CHUNK):
            chunk = order[s:s + CHUNK]
            cset = set(chunk)
            for key, ent in self.entries.items():
                pos = [k for k, c in enumerate(key) if c in cset]
                if not pos:
                    continue
                # M' = M + U V with U the column deltas and V row selectors;
                # xi I - M' = (xi I - M) + U (-I) V
                U = [[changes[key[k]][i] - self.columns[key[k]][i] for k in pos] for i in range(self.l)]
                V = [[int(j == k) for j in range(self.l)] for k in pos]
                C = [[-int(a == b) for b in range(len(pos))] for a in range(len(pos))]
                d, adj = char_update(ent.d, ent.adj, U, C, V)
                self.entries[key] = _make_entry(key, d, adj, self.l)
                done += 1
            for c in chunk:
                self.columns[c] = changes[c]
        self.units += done
        self._stack = None
        return done

    # -- queries -------------------------------------------------------------

    def _prepare(self):
        if self._stack is not None:
            return self._stack
        vals = [valuation(e.det, self.p) for e in self.entries.values() if e.det != 0]
        if not vals:
            raise ArithmeticError("all maximal minors vanish")
        v0 = min(vals)
        mod = self.p ** v0
        adj = [[[x % mod for x in row] for row in e.adj_M] for e in self.entries.values()]
        if self.l * mod * mod < 2 ** 62:
            stack = np.array(adj, dtype=np.int64)
        else:
            stack = np.array(adj, dtype=object)
        self._stack = (v0, mod, stack)
        return self._stack

    def min_valuation(self) -> int:
        return self._prepare()[0]

    def feasible(self, b) -> bool:
        """Compare minor-gcd valuations of ``A~`` and ``[A~ | b]``."""
        if not self.l:
            return True
        v0, mod, stack = self._prepare()
        bv = np.array([int(x) % mod for x in b], dtype=stack.dtype)
        # minors with b in place of column j are (adj(M) b)_j
        return not np.any((stack @ bv) % mod)

    def augmented_minors(self, b) -> list[int]:
        return [sum(a * int(x) for a, x in zip(row, b)) for e in self.entries.values() for row in e.adj_M]

    def snapshot(self) -> dict:
        return {k: (e.d, tuple(tuple(r) for r in e.adj)) for k, e in self.entries.items()}


def build_cache(At, b=None) -> SubmatrixCache:
    l = len(At)
    ncols = len(At[0]) if l else 0
    cols = [[At[i][j] for i in range(l)] for j in range(ncols)]
    p = None
    if l:
        # the last l columns are p^m I; recover p from p^m
        pm = At[0][ncols - l]
        p = next(q for q in range(2, pm + 1) if pm % q == 0)
    return SubmatrixCache(l, p, cols)


def feasible(sys: LinearSystem, cache: Optional[SubmatrixCache] = None) -> bool:
    if cache is None:
        cache = build_cache(sys.At)
    return cache.feasible(sys.b)


def verify_witness(ctx: PGroupContext, T, x, g: int) -> bool:
    y = ctx.e
    for t, z in zip(T, x):
        y = int(ctx.table.op[y, ctx.pow(int(t), int(z))])
    return y == g


class WitnessError(RuntimeError):
    pass


def solve_witness(sys: LinearSystem, ctx: Optional[PGroupContext] = None, g: Optional[int] = None):
    """Integer ``z`` with ``A~ z = b`` via a Hermite column form, or ``None``.

    When ``ctx`` and ``g`` are given, the exponents ``z[:r] mod p^m`` are
    checked by table multiplication before returning.
    """
    z = solve_integer(sys.At, sys.b)
    if z is None:
        return None
    if ctx is not None and g is not None:
        pm = sys.p ** sys.m
        x = [c % pm for c in z[:len(sys.T)]]
        if not verify_witness(ctx, sys.T, x, g):
            raise WitnessError("witness failed table verification")
    return z


def zero_extension_witness(sys: LinearSystem, cache: SubmatrixCache):
    """Solve with one minimum-valuation square block and zeros elsewhere.

    Returns ``(z, key)``; ``z`` is ``None`` when the block solution is not
    integral.
    """
    if not sys.rank:
        return [], ()
    v0 = cache.min_valuation()
    for key, e in cache.entries.items():
        if e.det != 0 and valuation(e.det, cache.p) == v0:
            y = [sum(a * x for a, x in zip(row, sys.b)) for row in e.adj_M]
            z = [0] * len(cache.columns)
            for k, c in enumerate(key):
                if y[k] % e.det:
                    return None, key
                z[c] = y[k] // e.det
            return z, key
    return None, None


# -- live engine ----------------------------------------------------------------------

class LinalgEngine:
    """Membership in ``<labels>`` for one p-group, with a fixed number of
    generator slots so that changes are column replacements."""

    def __init__(self, ctx: PGroupContext, capacity: int, labels=(), key=None, lazy: bool = False):
        self.ctx = ctx
        self.key = key
        self.capacity = int(capacity)
        self.slots: list[Optional[int]] = [None] * self.capacity
        self.slot_of: dict[int, int] = {}
        l = ctx.rank
        pm = ctx.p ** ctx.m
        zero = [0] * l
        labels = sorted(set(int(x) for x in labels))
        if len(labels) > self.capacity:
            raise GuardError(f"{len(labels)} generators exceed capacity {self.capacity}")
        cols = []
        for j in range(self.capacity):
            if j < len(labels):
                self.slots[j] = labels[j]
                self.slot_of[labels[j]] = j
                cols.append(self._vec(labels[j]))
            else:
                cols.append(list(zero))
        cols += [[pm if i == k else 0 for i in range(l)] for k in range(l)]
        self.cache = SubmatrixCache(l, ctx.p, cols, lazy=lazy)

    def _local(self, x: int) -> int:
        return int(self.key[x]) if self.key is not None else int(x)

    def _vec(self, x: int) -> list[int]:
        return scaled_vector(self.ctx, self._local(x))

    @property
    def labels(self) -> set[int]:
        return set(self.slot_of)

    def predicted_build(self) -> int:
        return self.cache.entry_count()

    def set_labels(self, target) -> int:
        """Move to generating labels ``target``; returns entry updates."""
        target = set(int(x) for x in target)
        removed = sorted(self.labels - target)
        added = sorted(target - self.labels)
        changes = {}
        for x in removed:
            j = self.slot_of.pop(x)
            self.slots[j] = None
            changes[j] = [0] * self.ctx.rank
        free = [j for j, s in enumerate(self.slots) if s is None]
        if len(added) > len(free):
            raise GuardError(f"{len(added)} insertions but only {len(free)} free slots")
        for x, j in zip(added, free):
            self.slots[j] = x
            self.slot_of[x] = j
            changes[j] = self._vec(x)
        return self.cache.update_columns(changes)

    def bulk_update(self, inserts=(), deletes=()) -> int:
        return self.set_labels((self.labels | set(int(x) for x in inserts)) - set(int(x) for x in deletes))

    def member(self, g: int) -> bool:
        return self.cache.feasible(self._vec(g))

    def system(self, g: int) -> LinearSystem:
        T = sorted(self.labels)
        return encode_system(self.ctx, [self._local(x) for x in T], self._local(g))

    def witness(self, g: int) -> Optional[dict]:
        """Exponents ``{label: z}`` with ``prod label^z = g``, or ``None``."""
        sys = self.system(g)
        z = solve_witness(sys, self.ctx, self._local(g))
        if z is None:
            return None
        pm = self.ctx.p ** self.ctx.m
        return {x: c % pm for x, c in zip(sorted(self.labels), z)}


def bulk_update(engine: LinalgEngine, inserts=(), deletes=()) -> int:
    return engine.bulk_update(inserts, deletes)
