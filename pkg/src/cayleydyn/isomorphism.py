"""Isomorphism of generated subgroups of abelian groups.

Two finite abelian groups are isomorphic iff their Sylow subgroups are, and
two abelian p-groups ``<S1>``, ``<S2>`` are isomorphic iff
``|<x^(p^j) : x in S1>| = |<x^(p^j) : x in S2>|`` for every ``j``.  Orders
come from the product ``prod t_j`` where ``t_j`` is the least ``t`` with
``g_j^t`` in ``<g_(j+1), ..., g_r>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .algebra import GroupContext, PGroupContext, reduce_generators
from .linalg.membership import encode_system, solve_witness
from .scheduler import Session, SessionConfig
from .tables import factorize


@dataclass(frozen=True)
class IsoProfile:
    p: int
    k: int
    layer_orders: tuple


def _member(ctx: PGroupContext, gens, g: int) -> bool:
    return solve_witness(encode_system(ctx, gens, g)) is not None


def subgroup_order(ctx: PGroupContext, gens, stats: Optional[dict] = None) -> int:
    """``|<gens>|`` for a p-group, by membership probes at p-power exponents."""
    gens = [int(x) for x in gens]
    total_r = 0
    for j, g in enumerate(gens):
        rest = gens[j + 1:]
        r, y = 0, g
        while not _member(ctx, rest, y):
            y = ctx.pow(y, ctx.p)
            r += 1
            if r > ctx.m:
                raise AssertionError("probe exponent exceeded the group exponent")
        total_r += r
    if total_r > ctx.m:
        raise AssertionError("order exponent exceeds m")
    if stats is not None:
        stats["exponent"] = total_r
    return ctx.p ** total_r


def layer_bound(p: int, *orders: int) -> int:
    """Largest ``k`` with ``p^k <= max(orders)``."""
    top, k = max(orders), 0
    while p ** (k + 1) <= top:
        k += 1
    return k


def power_layers(ctx: PGroupContext, S, p: int, k: int) -> IsoProfile:
    S = [int(x) for x in S]
    orders = []
    for j in range(k + 1):
        layer = [ctx.pow(x, p ** j) for x in S]
        orders.append(subgroup_order(ctx, layer))
    return IsoProfile(p, k, tuple(orders))


def support(gctx: GroupContext, S) -> set[int]:
    """Primes dividing the product of the orders of ``S``."""
    out = set()
    for x in S:
        out.update(p for p, _ in factorize(gctx.order(int(x))))
    return out


def _component(gctx: GroupContext, p: int):
    return next((c for c in gctx.components if c.p == p), None)


def profiles(gctx: GroupContext, S, primes, k_for) -> dict:
    out = {}
    for p in primes:
        comp = _component(gctx, p)
        k = k_for(p)
        if comp is None:
            out[p] = IsoProfile(p, k, (1,) * (k + 1))
        else:
            out[p] = power_layers(comp.ctx, [int(comp.proj[x]) for x in S], p, k)
    return out


def _reduced(comp, S) -> list[int]:
    # the p^j-power map is a homomorphism, so any generating set of <S>
    # gives the same layer subgroups
    local = sorted(set(int(comp.proj[x]) for x in S))
    return reduce_generators(comp.ctx, local)


def isomorphic(g1: GroupContext, S1, g2: GroupContext, S2) -> bool:
    S1, S2 = [int(x) for x in S1], [int(x) for x in S2]
    P = support(g1, S1)
    if P != support(g2, S2):
        return False
    for p in sorted(P):
        c1, c2 = _component(g1, p), _component(g2, p)
        T1, T2 = _reduced(c1, S1), _reduced(c2, S2)
        for j in range(layer_bound(p, g1.n, g2.n) + 1):
            o1 = subgroup_order(c1.ctx, [c1.ctx.pow(x, p ** j) for x in T1])
            o2 = subgroup_order(c2.ctx, [c2.ctx.pow(x, p ** j) for x in T2])
            if o1 != o2:
                return False
    return True


# -- dynamic version -------------------------------------------------------------

class _LayerSet:
    """One group's layer sessions, fed with images ``x^(p^j)``."""

    def __init__(self, gctx: GroupContext, primes, k_for, cfg: SessionConfig):
        self.gctx = gctx
        self.S: set[int] = set()
        self.layers = {}
        for p in primes:
            for j in range(k_for(p) + 1):
                self.layers[(p, j)] = {"session": Session(gctx, (), cfg), "count": {}}

    def image(self, p: int, j: int, x: int) -> int:
        return self.gctx.pow(x, p ** j)

    def step(self, changes) -> None:
        batches = {key: [] for key in self.layers}
        for kind, x in changes:
            x = int(x)
            if kind == "insert" and x not in self.S:
                self.S.add(x)
                delta = 1
            elif kind == "delete" and x in self.S:
                self.S.discard(x)
                delta = -1
            else:
                continue
            for (p, j), L in self.layers.items():
                y = self.image(p, j, x)
                c = L["count"].get(y, 0) + delta
                L["count"][y] = c
                if delta > 0 and c == 1:
                    batches[(p, j)].append(("insert", y))
                elif delta < 0 and c == 0:
                    batches[(p, j)].append(("delete", y))
        for key, L in self.layers.items():
            L["session"].step(batches[key])

    def layer_order(self, p: int, j: int) -> int:
        comp = _component(self.gctx, p)
        if comp is None:
            return 1
        sess = self.layers[(p, j)]["session"]
        return sum(1 for x in comp.to_global if sess.query(int(x)))


class DynamicIso:
    """Per-step verdict ``<S1> ~= <S2>`` under changes to both sets."""

    def __init__(self, g1: GroupContext, g2: GroupContext, engine: str = "det", seed: int = 0,
                 change_bound: Optional[int] = None):
        self.primes = sorted({p for p, _ in factorize(g1.n)} | {p for p, _ in factorize(g2.n)})
        self.k_for = lambda p: layer_bound(p, g1.n, g2.n)
        cb = change_bound
        cfg1 = SessionConfig(engine=engine, seed=seed, change_bound=cb)
        cfg2 = SessionConfig(engine=engine, seed=seed + 1, change_bound=cb)
        self.sides = (_LayerSet(g1, self.primes, self.k_for, cfg1), _LayerSet(g2, self.primes, self.k_for, cfg2))
        self.clock = 0

    def step(self, changes1=(), changes2=()) -> bool:
        self.sides[0].step(changes1)
        self.sides[1].step(changes2)
        self.clock += 1
        return self.verdict()

    def orders(self, side: int) -> dict:
        L = self.sides[side]
        return {p: tuple(L.layer_order(p, j) for j in range(self.k_for(p) + 1)) for p in self.primes}

    def verdict(self) -> bool:
        return self.orders(0) == self.orders(1)


def dynamic_isomorphic(g1: GroupContext, g2: GroupContext, steps, engine: str = "det", seed: int = 0) -> list[bool]:
    """Verdicts after each ``(changes1, changes2)`` step."""
    d = DynamicIso(g1, g2, engine=engine, seed=seed)
    return [d.step(c1, c2) for c1, c2 in steps]

