"""Static tree of subgroups over a generating set of an abelian p-group.

Leaves carry the generators (ascending) and the cyclic subgroups they
generate; internal nodes carry ``H_v = <S_v>``.  For every node ``v`` and
proper descendant ``u`` the tree also stores the complement subgroup
``H_v:H_u = <S_v \\ S_u>`` and a reduced generating list ``T_vu`` of it, which
is what lets a batch of deletions be answered without rebuilding.

Generators are *labels* (elements of the ambient group); ``key`` maps a label
to the element of the p-group it stands for, so one tree per Sylow component
can share the ambient labels.
"""
from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from .algebra import Closure, cyclic_subgroup
from .monoid_tree import set_product, singleton

log = logging.getLogger(__name__)


def _depth_for(count: int) -> int:
    return (count - 1).bit_length() if count > 1 else 0


class SubgroupTree:
    def __init__(self, ctx, labels, key: Optional[np.ndarray] = None):
        self.ctx = ctx
        self.labels = sorted(set(int(x) for x in labels))
        self.key = key
        self.k = _depth_for(len(self.labels))
        self.offset = 1 << self.k
        self.num_nodes = 2 * self.offset - 1
        self.leaf_of = {x: self.offset + i for i, x in enumerate(self.labels)}
        # S_v as (lo, hi) ranges into self.labels
        self.span = [None] * (2 * self.offset)
        for v in range(1, 2 * self.offset):
            depth = v.bit_length() - 1
            width = self.offset >> depth
            lo = (v - (1 << depth)) * width
            self.span[v] = (min(lo, len(self.labels)), min(lo + width, len(self.labels)))
        self.A = np.zeros((2 * self.offset, 2 * self.offset), dtype=bool)
        for j in range(1, 2 * self.offset):
            i = j
            while i >= 1:
                self.A[i, j] = True
                i >>= 1
        self.H = [None] * (2 * self.offset)
        self.comp = {}
        self.T = {}
        self.node_gens = [None] * (2 * self.offset)
        self.work = 0
        self.rounds = 0
        self.built = False

    # -- helpers -------------------------------------------------------------

    def value(self, x: int) -> int:
        return int(self.key[x]) if self.key is not None else int(x)

    def S(self, v: int) -> list[int]:
        lo, hi = self.span[v]
        return self.labels[lo:hi]

    def descendants(self, v: int):
        lo, hi = 2 * v, 2 * v + 1
        while lo < 2 * self.offset:
            yield from range(lo, hi + 1)
            lo, hi = 2 * lo, 2 * hi + 1

    def pairs(self):
        for v in range(1, 2 * self.offset):
            for u in self.descendants(v):
                yield v, u

    def minus(self, v: int, u: int) -> list[int]:
        (lo, hi), (ulo, uhi) = self.span[v], self.span[u]
        return self.labels[lo:ulo] + self.labels[uhi:hi]

    def predicted_work(self) -> int:
        """Exact number of work units ``build_iter`` will yield."""
        w = len(self.labels)  # leaf cyclic subgroups
        w += self.offset - 1  # internal node products
        for v in range(1, 2 * self.offset):
            w += len(self.S(v))  # reduced generators of H_v
        for v, u in self.pairs():
            w += 1 + len(self.minus(v, u))  # complement product + its reduction
        return w

    def _reduce_iter(self, xs, out: list):
        closure = Closure(self.ctx.table, self.ctx.e)
        for x in xs:
            y = self.value(x)
            if y not in closure:
                out.append(x)
                closure.add(y)
            yield

    # -- construction --------------------------------------------------------

    def build_iter(self):
        """Populate all node data, yielding once per work unit."""
        t, e = self.ctx.table, self.ctx.e
        trivial = singleton(t.n, e)
        for v in range(self.offset, 2 * self.offset):
            lo, hi = self.span[v]
            if hi > lo:
                self.H[v] = cyclic_subgroup(t, e, self.value(self.labels[lo]))
                self.work += 1
                yield
            else:
                self.H[v] = trivial
        for v in range(self.offset - 1, 0, -1):
            self.H[v] = set_product(t, self.H[2 * v], self.H[2 * v + 1])
            self.work += 1
            yield
        for v in range(1, 2 * self.offset):
            for u in self.descendants(v):
                par = u >> 1
                base = trivial if par == v else self.comp[(v, par)]
                self.comp[(v, u)] = set_product(t, base, self.H[u ^ 1])
                self.work += 1
                yield
        for v in range(1, 2 * self.offset):
            gens = []
            for _ in self._reduce_iter(self.S(v), gens):
                self.work += 1
                yield
            self.node_gens[v] = gens
            for u in self.descendants(v):
                gens = []
                for _ in self._reduce_iter(self.minus(v, u), gens):
                    self.work += 1
                    yield
                self.T[(v, u)] = gens
        # bottom-up products, top-down complement paths, one reduction round
        self.rounds = (self.k + 1) + self.k + 1
        self.built = True

    @classmethod
    def build(cls, ctx, labels, key=None) -> "SubgroupTree":
        tree = cls(ctx, labels, key)
        for _ in tree.build_iter():
            pass
        return tree

    # -- queries -------------------------------------------------------------

    @property
    def root(self) -> np.ndarray:
        return self.H[1]

    def complement(self, v: int, u: int) -> np.ndarray:
        if u == v:
            return singleton(self.ctx.table.n, self.ctx.e)
        return self.comp[(v, u)]

    def generators(self, v: int, u: Optional[int] = None) -> list[int]:
        if u is None:
            return self.node_gens[v]
        if u == v:
            return []
        return self.T[(v, u)]

    def locate_deletion_roots(self, D) -> dict[int, int]:
        """Map each deleted label to the root of the largest subtree whose only
        deletion it is."""
        leaves = {}
        for x in sorted(set(int(d) for d in D)):
            if x in self.leaf_of:
                leaves[x] = self.leaf_of[x]
            else:
                log.warning("deletion %d is not a leaf label; skipped", x)
        cols = np.array(sorted(leaves.values()), dtype=np.int64)
        roots = {}
        for x, lx in leaves.items():
            others = cols[cols != lx]
            v, best = lx, lx
            while v >= 1:
                if others.size and self.A[v, others].any():
                    break
                best = v
                v >>= 1
            roots[x] = best
        return roots

    def residual_generators(self, D, stats: Optional[dict] = None) -> list[int]:
        """Labels generating ``<S \\ D>``: the stored complement lists at each
        deletion root plus the stored lists of maximal deletion-free subtrees
        outside those roots."""
        roots = self.locate_deletion_roots(D)
        out, seen = [], set()
        lists = 0

        def take(xs):
            for x in xs:
                if x not in seen:
                    seen.add(x)
                    out.append(x)

        for x, v in roots.items():
            take(self.generators(v, self.leaf_of[x]))
            lists += 1
        del_leaves = np.array(sorted(self.leaf_of[x] for x in roots), dtype=np.int64)
        if del_leaves.size:
            has_del = self.A[:, del_leaves].any(axis=1)
        else:
            has_del = np.zeros(2 * self.offset, dtype=bool)
        root_nodes = np.array(sorted(set(roots.values())), dtype=np.int64)
        for u in range(1, 2 * self.offset):
            if has_del[u] or (u > 1 and not has_del[u >> 1]):
                continue
            if root_nodes.size and self.A[root_nodes, u].any():
                continue
            take(self.generators(u))
            lists += 1
        if stats is not None:
            stats["lists"] = stats.get("lists", 0) + lists
        return out


def build(ctx, S, key=None) -> SubgroupTree:
    return SubgroupTree.build(ctx, S, key)


def locate_deletion_roots(tree: SubgroupTree, D) -> list[int]:
    roots = tree.locate_deletion_roots(D)
    return [roots[x] for x in sorted(roots)]


def residual_generators(tree: SubgroupTree, D) -> list[int]:
    return tree.residual_generators(D)
