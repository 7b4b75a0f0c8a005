"""Brute-force ground truth.

Nothing here shares code with the engines beyond reading ``CayleyTable.op``;
everything is plain Python loops so it can be reviewed on its own.
"""
from __future__ import annotations

from collections import Counter, deque

from .tables import CayleyTable


def _rows(t: CayleyTable):
    return t.op.tolist()


def _identity(rows):
    n = len(rows)
    for e in range(n):
        if all(rows[e][x] == x and rows[x][e] == x for x in range(n)):
            return e
    raise ValueError("table has no identity")


def enumerate_subgroup_bfs(t: CayleyTable, e: int, S) -> set[int]:
    """Everything reachable from ``e`` along edges ``x -> x*s`` for ``s`` in S."""
    rows = _rows(t)
    gens = sorted(set(int(s) for s in S))
    seen = {int(e)}
    queue = deque([int(e)])
    while queue:
        x = queue.popleft()
        row = rows[x]
        for s in gens:
            y = row[s]
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def bfs_membership(t: CayleyTable, e: int, S, g: int) -> bool:
    return int(g) in enumerate_subgroup_bfs(t, e, S)


def element_order(rows, e: int, x: int) -> int:
    k, y = 1, x
    while y != e:
        y = rows[y][x]
        k += 1
        if k > len(rows):
            raise ValueError(f"element {x} has no finite order w.r.t. {e}")
    return k


def order_profile(t: CayleyTable, elements=None) -> dict[int, int]:
    """Histogram ``order -> count`` over ``elements`` (default: all of t)."""
    rows = _rows(t)
    e = _identity(rows)
    if elements is None:
        elements = range(t.n)
    return dict(Counter(element_order(rows, e, x) for x in elements))


def _is_abelian_group(rows) -> bool:
    n = len(rows)
    e = _identity(rows)
    for a in range(n):
        if e not in rows[a]:
            return False
        for b in range(n):
            if rows[a][b] != rows[b][a]:
                return False
    for a in range(n):
        for b in range(n):
            ab = rows[a][b]
            for c in range(n):
                if rows[ab][c] != rows[a][rows[b][c]]:
                    return False
    return True


def iso_oracle(t1: CayleyTable, S1, t2: CayleyTable, S2, check_abelian: bool = True) -> bool:
    """Decide ``<S1> ~= <S2>`` by comparing sizes and element-order histograms."""
    r1, r2 = _rows(t1), _rows(t2)
    if check_abelian and not (_is_abelian_group(r1) and _is_abelian_group(r2)):
        raise ValueError("iso_oracle needs abelian groups")
    H1 = enumerate_subgroup_bfs(t1, _identity(r1), S1)
    H2 = enumerate_subgroup_bfs(t2, _identity(r2), S2)
    if len(H1) != len(H2):
        return False
    return order_profile(t1, H1) == order_profile(t2, H2)


def is_subgroup(t: CayleyTable, e: int, H) -> bool:
    rows = _rows(t)
    H = set(H)
    if e not in H:
        return False
    for a in H:
        if not any(rows[a][b] == e for b in H):
            return False
        for b in H:
            if rows[a][b] not in H:
                return False
    return True
