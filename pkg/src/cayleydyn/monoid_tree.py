"""Dynamic submonoid membership for commutative monoids.

A full binary tree has one leaf per monoid element.  Each node ``v`` stores
``M_v``, the submonoid generated by the active leaves under it, and, for every
proper descendant ``u``, the complement ``M_v:M_u`` generated by the active
leaves under ``v`` but not under ``u``.  Single insertions and deletions are
absorbed with a constant number of set products per stored set.

Sets are numpy boolean masks of length ``n``.
"""
from __future__ import annotations

import numpy as np

from .tables import CayleyTable, Structure, validate_table


def set_product(t: CayleyTable, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``{a*b : a in A, b in B}`` as a mask."""
    ia = np.flatnonzero(A)
    ib = np.flatnonzero(B)
    out = np.zeros(t.n, dtype=bool)
    if ia.size and ib.size:
        out[t.op[np.ix_(ia, ib)].ravel()] = True
    return out


def singleton(n: int, x: int) -> np.ndarray:
    m = np.zeros(n, dtype=bool)
    m[x] = True
    return m


def power_set(t: CayleyTable, e: int, a: int) -> np.ndarray:
    """``{a^i : 1 <= i <= n} | {e}``, i.e. the submonoid generated by ``a``."""
    m = singleton(t.n, e)
    y = a
    for _ in range(t.n):
        m[y] = True
        y = int(t.op[y, a])
    return m


class MonoidTree:
    """Tree of submonoids over every element of a commutative monoid.

    Nodes use heap numbering (root 1, children ``2v`` and ``2v+1``); leaf for
    element ``a`` is ``offset + a`` with ``offset = 2**depth``.
    """

    def __init__(self, t: CayleyTable, S=(), identity=None, check=True):
        if check:
            sc = validate_table(t)
            if sc.tag < Structure.COMMUTATIVE_MONOID or sc.tag == Structure.GROUP:
                raise ValueError("MonoidTree needs a commutative monoid")
            identity = sc.identity
        elif identity is None:
            raise ValueError("identity required when check=False")
        self.table = t
        self.n = t.n
        self.e = int(identity)
        self.depth = (self.n - 1).bit_length()
        self.offset = 1 << self.depth
        self.num_nodes = 2 * self.offset - 1
        self.active = set()
        self.trivial = singleton(self.n, self.e)
        self.P = [power_set(t, self.e, a) for a in range(self.n)]
        self.products = 0
        self._build(set(int(s) for s in S))

    # -- tree geometry -------------------------------------------------------

    def leaf(self, a: int) -> int:
        return self.offset + a

    def is_descendant(self, u: int, v: int) -> bool:
        """True if ``u`` is in the subtree of ``v`` (improper included)."""
        du, dv = u.bit_length(), v.bit_length()
        return du >= dv and (u >> (du - dv)) == v

    def descendants(self, v: int):
        """Proper descendants of ``v`` in level order."""
        lo, hi = 2 * v, 2 * v + 1
        while lo < 2 * self.offset:
            yield from range(lo, hi + 1)
            lo, hi = 2 * lo, 2 * hi + 1

    @staticmethod
    def lca(u: int, v: int) -> int:
        du, dv = u.bit_length(), v.bit_length()
        if du > dv:
            u >>= du - dv
        else:
            v >>= dv - du
        while u != v:
            u >>= 1
            v >>= 1
        return u

    # -- construction --------------------------------------------------------

    def _prod(self, *sets):
        out = sets[0]
        for s in sets[1:]:
            out = set_product(self.table, out, s)
            self.products += 1
        return out

    def _build(self, S):
        self.active = {a for a in S}
        M = [None] * (2 * self.offset)
        for x in range(self.offset):
            M[self.offset + x] = self.P[x] if (x < self.n and x in self.active) else self.trivial
        for v in range(self.offset - 1, 0, -1):
            M[v] = self._prod(M[2 * v], M[2 * v + 1])
        self.M = M
        # comp[v][u] = M_v : M_u, built top-down along the path from v to u:
        # M_v:M_u = (M_v:M_parent(u)) * M_sibling(u)
        self.comp = [None] * (2 * self.offset)
        for v in range(1, 2 * self.offset):
            c = {}
            for u in self.descendants(v):
                par = u >> 1
                base = self.trivial if par == v else c[par]
                c[u] = self._prod(base, M[u ^ 1])
            self.comp[v] = c

    def complement(self, v: int, u: int) -> np.ndarray:
        if u == v:
            return self.trivial
        return self.comp[v][u]

    # -- queries -------------------------------------------------------------

    @property
    def root(self) -> np.ndarray:
        return self.M[1]

    def member(self, m: int) -> bool:
        return bool(self.M[1][m])

    # -- updates -------------------------------------------------------------

    def _update(self, a: int, inserting: bool) -> dict:
        """Apply one change; all new values are computed from the old ones."""
        la = self.leaf(a)
        Pa = self.P[a]
        before = self.products
        touched = 0
        new_M = {}
        new_comp = []
        v = la
        ancestors = []
        while v >= 1:
            ancestors.append(v)
            v >>= 1
        for nu in ancestors:
            if nu == la:
                new_M[nu] = Pa if inserting else self.trivial
            elif inserting:
                new_M[nu] = self._prod(self.M[nu], Pa)
            else:
                new_M[nu] = self.comp[nu][la]
            touched += 1
            for mu in self.descendants(nu):
                if self.is_descendant(la, mu):
                    continue
                mu_p = self.lca(la, mu)
                # children of mu_p towards a and towards mu
                mu1 = la >> (la.bit_length() - mu_p.bit_length() - 1)
                mu2 = mu1 ^ 1
                if inserting:
                    middle = self._prod(self.M[mu1], Pa) if mu1 != la else Pa
                else:
                    middle = self.complement(mu1, la)
                p0 = self.products
                val = self._prod(self.complement(nu, mu_p), middle, self.complement(mu2, mu))
                assert self.products - p0 <= 3
                new_comp.append((nu, mu, val))
                touched += 1
        for nu, val in new_M.items():
            self.M[nu] = val
        for nu, mu, val in new_comp:
            self.comp[nu][mu] = val
        if inserting:
            self.active.add(a)
        else:
            self.active.discard(a)
        return {"touched": touched, "products": self.products - before}

    def insert(self, a: int) -> dict:
        a = int(a)
        if a in self.active:
            return {"touched": 0, "products": 0}
        return self._update(a, True)

    def delete(self, a: int) -> dict:
        a = int(a)
        if a not in self.active:
            return {"touched": 0, "products": 0}
        return self._update(a, False)

    # -- introspection -------------------------------------------------------

    def snapshot(self):
        """Node sets and complements as comparable plain data."""
        nodes = {v: self.M[v].tobytes() for v in range(1, 2 * self.offset)}
        comps = {(v, u): s.tobytes() for v in range(1, 2 * self.offset) for u, s in self.comp[v].items()}
        return nodes, comps


def build(t: CayleyTable, S=()) -> MonoidTree:
    return MonoidTree(t, S)


def insert(tree: MonoidTree, a: int) -> dict:
    return tree.insert(a)


def delete(tree: MonoidTree, a: int) -> dict:
    return tree.delete(a)


def member(tree: MonoidTree, m: int) -> bool:
    return tree.member(m)
