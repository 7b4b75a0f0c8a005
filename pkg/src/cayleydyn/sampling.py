"""Randomized membership for abelian groups.

Samples of ``<T>`` are drawn as ``prod x_j^{beta_j}`` with uniform ``beta``,
evaluated on exponent vectors rather than by chaining table products.  The
union of enough samples lists the subgroup; a buffered query combines a
snapshot tree with pending insertions and deletions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import GroupContext, PGroupContext
from .tables import ceil_log2


class BudgetError(RuntimeError):
    """Too many generators or buffered changes for the current snapshot."""


@dataclass
class SampleConfig:
    samples: Optional[int] = None  # None: ceil(N (ln N + 5)) for a group of order N
    seed: int = 0
    delta_fail: float = 0.01
    budget_exp: int = 3

    def sample_count(self, N: int) -> int:
        if self.samples is not None:
            return int(self.samples)
        if N <= 1:
            return 1
        return math.ceil(N * (math.log(N) + 5))

    def generator_budget(self, n: int) -> int:
        return max(2, ceil_log2(n)) ** self.budget_exp

    def buffer_budget(self, n: int) -> int:
        return max(2, ceil_log2(n)) ** (self.budget_exp + 1)


def miss_bound(order: int, s: int) -> float:
    """Upper bound on the chance that s uniform draws miss some element."""
    if order <= 1:
        return 0.0
    return order * (1 - 1 / order) ** s


@dataclass
class ChangeBuffer:
    I: set = field(default_factory=set)
    D: set = field(default_factory=set)

    def __len__(self) -> int:
        return len(self.I) + len(self.D)

    def effective(self, S) -> set:
        return (set(S) | self.I) - self.D

    def copy(self) -> "ChangeBuffer":
        return ChangeBuffer(set(self.I), set(self.D))


def apply_change(buf: ChangeBuffer, kind: str, g: int, snapshot) -> None:
    """Fold one insert/delete into the buffers relative to ``snapshot``."""
    g = int(g)
    if kind == "insert":
        if g in buf.D:
            buf.D.discard(g)
        elif g in snapshot or g in buf.I:
            return
        else:
            buf.I.add(g)
    elif kind == "delete":
        if g in buf.I:
            buf.I.discard(g)
        elif g in snapshot:
            buf.D.add(g)
    else:
        raise ValueError(f"unknown change kind {kind!r}")


def rebase(buf: ChangeBuffer, effective: set, snapshot: set) -> ChangeBuffer:
    """Buffers expressing ``effective`` relative to a new snapshot."""
    return ChangeBuffer(set(effective) - set(snapshot), set(snapshot) - set(effective))


# -- sampling -------------------------------------------------------------------

def _alpha(ctx: PGroupContext, T) -> np.ndarray:
    return ctx.expvec[np.asarray(list(T), dtype=np.int64)] if len(T) else np.zeros((0, ctx.rank), dtype=np.int64)


def sample_many(ctx: PGroupContext, T, rng: np.random.Generator, s: int) -> np.ndarray:
    """``s`` independent uniform elements of ``<T>`` (local indices)."""
    T = list(T)
    if not T or not ctx.rank:
        return np.full(s, ctx.e, dtype=np.int64)
    beta = rng.integers(0, ctx.n, size=(s, len(T)), dtype=np.int64)
    return ctx.decode_many(beta @ _alpha(ctx, T))


def sample_element(ctx: PGroupContext, T, rng: np.random.Generator) -> int:
    return int(sample_many(ctx, T, rng, 1)[0])


def product_by_table(ctx: PGroupContext, T, beta) -> int:
    """``prod T_j^{beta_j}`` by repeated table lookups (used to cross-check)."""
    y = ctx.e
    for x, b in zip(T, beta):
        y = int(ctx.table.op[y, ctx.pow(int(x), int(b))])
    return y


def _prepare(ctx: PGroupContext, T, n_ambient: int, cfg: SampleConfig) -> list[int]:
    T = sorted(set(int(x) for x in T) - {ctx.e})
    if len(T) > cfg.generator_budget(n_ambient):
        raise BudgetError(f"{len(T)} generators exceed budget {cfg.generator_budget(n_ambient)}")
    return T


def enumerate_subgroup(ctx: PGroupContext, T, cfg: SampleConfig, rng: Optional[np.random.Generator] = None,
                       n_ambient: Optional[int] = None) -> np.ndarray:
    """Union of sampled elements of ``<T>``; never contains a non-member."""
    n_ambient = n_ambient or ctx.n
    T = _prepare(ctx, T, n_ambient, cfg)
    if rng is None:
        rng = np.random.default_rng([cfg.seed, 0])
    out = np.zeros(ctx.n, dtype=bool)
    out[ctx.e] = True
    if T:
        out[sample_many(ctx, T, rng, cfg.sample_count(n_ambient))] = True
    return out


# -- buffered membership on a general abelian group -------------------------------

def buffered_generators(tree, buf: ChangeBuffer) -> list[int]:
    return sorted(set(tree.residual_generators(buf.D)) | set(buf.I))


def enumerate_with_buffers(gctx: GroupContext, trees, buf: ChangeBuffer, cfg: SampleConfig,
                           rng: Optional[np.random.Generator] = None) -> list[np.ndarray]:
    """Per-component sampled listing of ``<S u I \\ D>``."""
    if len(buf) > cfg.buffer_budget(gctx.n):
        raise BudgetError(f"{len(buf)} buffered changes exceed budget {cfg.buffer_budget(gctx.n)}")
    if rng is None:
        rng = np.random.default_rng([cfg.seed, 0])
    out = []
    for comp, tree in zip(gctx.components, trees):
        labels = buffered_generators(tree, buf)
        local = [int(comp.proj[x]) for x in labels]
        out.append(enumerate_subgroup(comp.ctx, local, cfg, rng, n_ambient=gctx.n))
    return out


def member_in(gctx: GroupContext, listing: list[np.ndarray], g: int) -> bool:
    """``g`` is a member iff every Sylow projection ``g^{b_i}`` is."""
    return all(bool(H[comp.proj[g]]) for comp, H in zip(gctx.components, listing))


def member_with_buffers(gctx: GroupContext, trees, buf: ChangeBuffer, g: int, cfg: SampleConfig,
                        rng: Optional[np.random.Generator] = None) -> bool:
    return member_in(gctx, enumerate_with_buffers(gctx, trees, buf, cfg, rng), int(g))
