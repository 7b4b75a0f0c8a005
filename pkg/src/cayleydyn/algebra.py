"""Precomputation for finite abelian groups given by Cayley tables.

Powers and orders, the Sylow decomposition into p-components (each
materialized as its own table), an independent basis per component with the
exponent vector of every element, and greedy generator reduction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .monoid_tree import set_product, singleton
from .tables import CayleyTable, Structure, factorize, validate_table


class NotAbelianError(ValueError):
    pass


class BasisError(RuntimeError):
    pass


@dataclass(frozen=True)
class PowerTable:
    pow: np.ndarray  # pow[g, k] = g^k for k = 0..n
    order: np.ndarray

    def __call__(self, g: int, k: int) -> int:
        return int(self.pow[g, k])


def power_table(t: CayleyTable, e: int) -> PowerTable:
    if e is None:
        raise ValueError("power_table needs an identity element")
    n = t.n
    pw = np.empty((n, n + 1), dtype=np.int64)
    pw[:, 0] = e
    idx = np.arange(n)
    for k in range(n):
        pw[:, k + 1] = t.op[pw[:, k], idx]
    hits = pw[:, 1:] == e
    # 0 marks monoid elements whose powers never return to the identity
    order = np.where(hits.any(axis=1), hits.argmax(axis=1) + 1, 0).astype(np.int64)
    pw.setflags(write=False)
    order.setflags(write=False)
    return PowerTable(pw, order)


def _group_power(pt: PowerTable, g: int, k: int) -> int:
    o = int(pt.order[g])
    return int(pt.pow[g, k % o])


# -- independent bases ----------------------------------------------------------

@dataclass
class Basis:
    gens: list[int]
    orders: list[int]
    p: int
    m: int

    @property
    def rank(self) -> int:
        return len(self.gens)

    @property
    def exponents(self) -> list[int]:
        return [round(math.log(o, self.p)) for o in self.orders]


def _basis_rec(t: CayleyTable, e: int, p: int) -> list[int]:
    if t.n == 1:
        return []
    pt = power_table(t, e)
    order = pt.order
    g = int(np.argmax(order))  # first element of maximal order
    og = int(order[g])
    cyc = [int(pt.pow[g, i]) for i in range(og)]
    cyc_index = {c: i for i, c in enumerate(cyc)}
    # cosets of <g>, represented by their smallest element
    coset_of = -np.ones(t.n, dtype=np.int64)
    reps = []
    cyc_arr = np.array(cyc)
    for x in range(t.n):
        if coset_of[x] >= 0:
            continue
        members = t.op[x, cyc_arr]
        coset_of[members] = len(reps)
        reps.append(x)
    reps_arr = np.array(reps)
    q = CayleyTable(coset_of[t.op[np.ix_(reps_arr, reps_arr)]])
    qe = int(coset_of[e])
    lifted = []
    for qx in _basis_rec(q, qe, p):
        r = reps[qx]
        oq = _quotient_order(q, qe, qx)
        y = int(pt.pow[r, oq])
        if y not in cyc_index:
            raise BasisError("coset power escaped the cyclic subgroup")
        s = cyc_index[y]
        if s % oq:
            raise BasisError(f"lifting failed: {oq} does not divide {s}")
        x = int(t.op[r, cyc[(og - s // oq) % og]])
        if int(order[x]) != oq:
            raise BasisError("lifted element has the wrong order")
        lifted.append(x)
    return [g] + lifted


def _quotient_order(q: CayleyTable, qe: int, x: int) -> int:
    k, y = 1, x
    while y != qe:
        y = int(q.op[y, x])
        k += 1
    return k


def independent_basis(t: CayleyTable, e: int, p: int):
    """Independent basis of an abelian p-group table and its coordinate maps.

    Returns ``(basis, expvec, decode, strides)`` where ``expvec[g]`` is the
    exponent vector of ``g``, ``decode`` maps a mixed-radix code back to the
    element and ``strides`` are the radix weights of the code.
    """
    n = t.n
    m = round(math.log(n, p)) if n > 1 else 0
    if p ** m != n:
        raise BasisError(f"order {n} is not a power of {p}")
    gens = _basis_rec(t, e, p)
    pt = power_table(t, e)
    orders = [int(pt.order[g]) for g in gens]
    if math.prod(orders) != n:
        raise BasisError("basis orders do not multiply to the group order")
    ell = len(gens)
    # enumerate all products g_1^e_1 ... g_l^e_l; code = sum e_i * stride_i
    elems = np.array([e], dtype=np.int64)
    for g, o in zip(gens, orders):
        powers = pt.pow[g, :o]
        elems = t.op[elems[None, :], powers[:, None]].ravel()
    # elems is ordered with the latest generator as the slowest index:
    # code = e_1 + o_1 * (e_2 + o_2 * (...))
    if len(elems) != n or len(set(elems.tolist())) != n:
        raise BasisError("basis representation is not a bijection")
    strides = np.cumprod([1] + orders[:-1]).astype(np.int64) if ell else np.zeros(0, dtype=np.int64)
    codes = np.arange(n)
    expvec = np.zeros((n, ell), dtype=np.int64)
    for i, (s, o) in enumerate(zip(strides, orders)):
        expvec[elems, i] = (codes // s) % o
    return Basis(gens, orders, p, m), expvec, elems, strides


# -- p-group and abelian-group contexts -------------------------------------------

@dataclass
class PGroupContext:
    """An abelian p-group with basis and exponent-vector encoding."""

    table: CayleyTable
    e: int
    p: int
    m: int
    powers: PowerTable
    basis: Basis
    expvec: np.ndarray
    decode_arr: np.ndarray
    strides: np.ndarray

    @classmethod
    def build(cls, t: CayleyTable, e: int, p: int) -> "PGroupContext":
        basis, expvec, decode, strides = independent_basis(t, e, p)
        expvec.setflags(write=False)
        return cls(t, e, p, basis.m, power_table(t, e), basis, expvec, decode, strides)

    @property
    def n(self) -> int:
        return self.table.n

    @property
    def rank(self) -> int:
        return self.basis.rank

    @property
    def orders(self) -> list[int]:
        return self.basis.orders

    def exponent_vector(self, g: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.expvec[g])

    def decode(self, coords) -> int:
        coords = np.asarray(coords, dtype=np.int64) % np.asarray(self.orders, dtype=np.int64)
        return int(self.decode_arr[int(np.dot(coords, self.strides))]) if self.rank else self.e

    def decode_many(self, coords: np.ndarray) -> np.ndarray:
        """Row-wise decode of an ``(s, rank)`` array of (unreduced) coordinates."""
        if not self.rank:
            return np.full(coords.shape[0], self.e, dtype=np.int64)
        red = coords % np.asarray(self.orders, dtype=np.int64)
        return self.decode_arr[red @ self.strides]

    def pow(self, g: int, k: int) -> int:
        return _group_power(self.powers, g, k)

    def order(self, g: int) -> int:
        return int(self.powers.order[g])


@dataclass
class SylowComponent:
    p: int
    a: int
    cofactor: int
    to_global: np.ndarray  # local index -> global element
    proj: np.ndarray  # global x -> local index of x^cofactor
    ctx: PGroupContext


@dataclass
class SylowDecomposition:
    primes: list[tuple[int, int]]
    cofactors: list[int]
    components: list[SylowComponent]


def sylow_decompose(t: CayleyTable, e: int = None, powers: PowerTable = None) -> SylowDecomposition:
    if e is None:
        sc = validate_table(t)
        if sc.tag != Structure.ABELIAN_GROUP:
            raise NotAbelianError("Sylow decomposition needs an abelian group")
        e = sc.identity
    if powers is None:
        powers = power_table(t, e)
    n = t.n
    primes = factorize(n)
    comps, cofs = [], []
    for p, a in primes:
        b = n // p ** a
        images = powers.pow[:, b]
        members = np.unique(images)
        if len(members) != p ** a:
            raise BasisError(f"Sylow {p}-subgroup has {len(members)} elements, expected {p ** a}")
        local = -np.ones(n, dtype=np.int64)
        local[members] = np.arange(len(members))
        sub = local[t.op[np.ix_(members, members)]]
        if np.any(sub < 0):
            raise BasisError(f"Sylow {p}-subgroup is not closed")
        sub_t = CayleyTable(sub)
        ctx = PGroupContext.build(sub_t, int(local[e]), p)
        comps.append(SylowComponent(p, a, b, members, local[images], ctx))
        cofs.append(b)
    return SylowDecomposition(primes, cofs, comps)


class GroupContext:
    """Everything precomputed for an abelian group table."""

    def __init__(self, t: CayleyTable):
        sc = validate_table(t)
        if sc.tag != Structure.ABELIAN_GROUP:
            raise NotAbelianError(f"expected an abelian group, got {sc.tag.name}")
        self.table = t
        self.n = t.n
        self.e = sc.identity
        self.powers = power_table(t, self.e)
        self.sylow = sylow_decompose(t, self.e, self.powers)

    @property
    def components(self) -> list[SylowComponent]:
        return self.sylow.components

    def order(self, g: int) -> int:
        return int(self.powers.order[g])

    def pow(self, g: int, k: int) -> int:
        return _group_power(self.powers, g, k)

    def project(self, x: int) -> list[int]:
        """Local indices of ``x^{b_i}`` in each Sylow component."""
        return [int(c.proj[x]) for c in self.components]


# -- generator reduction ----------------------------------------------------------

def cyclic_subgroup(t: CayleyTable, e: int, x: int) -> np.ndarray:
    m = singleton(t.n, e)
    y = x
    while not m[y]:
        m[y] = True
        y = int(t.op[y, x])
    return m


class Closure:
    """Incrementally grown subgroup ``<kept>`` of an abelian group table."""

    def __init__(self, t: CayleyTable, e: int):
        self.t = t
        self.H = singleton(t.n, e)
        self.e = e

    def __contains__(self, x: int) -> bool:
        return bool(self.H[x])

    def add(self, x: int) -> None:
        if not self.H[x]:
            self.H = set_product(self.t, self.H, cyclic_subgroup(self.t, self.e, x))


def reduce_generators(ctx, S, key: Optional[Callable[[int], int]] = None, stats: Optional[dict] = None):
    """Greedy subset of ``S`` generating the same subgroup.

    Scans ``S`` in ascending order and keeps ``x`` iff ``key(x)`` is not in the
    subgroup generated by the keys kept so far.  ``ctx`` needs ``table`` and
    ``e``.  Every scanned element counts as one membership probe in ``stats``.
    """
    closure = Closure(ctx.table, ctx.e)
    kept = []
    probes = 0
    for x in sorted(set(int(s) for s in S)):
        y = key(x) if key is not None else x
        probes += 1
        if y not in closure:
            kept.append(x)
            closure.add(y)
    if stats is not None:
        stats["probes"] = stats.get("probes", 0) + probes
    return kept


def generated_subgroup(ctx, S, key=None) -> np.ndarray:
    c = Closure(ctx.table, ctx.e)
    for x in S:
        c.add(key(x) if key is not None else int(x))
    return c.H


def exponent_vector(ctx: PGroupContext, g: int) -> tuple[int, ...]:
    return ctx.exponent_vector(g)
