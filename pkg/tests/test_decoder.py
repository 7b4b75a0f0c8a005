import numpy as np
import pytest

from cayleydyn.algebra import GroupContext
from cayleydyn.decoder import DynamicTableSession, corrupt, decode, find_identity, identity_pairs
from cayleydyn.oracle import enumerate_subgroup_bfs
from cayleydyn.scheduler import new_session
from cayleydyn.tables import CayleyTable, abelian_from_invariants, cyclic, random_abelian, random_magma


def corrupt_identity_row(t, cols):
    return t.with_entries([(0, j, (j + 1) % t.n) for j in cols])


def test_find_identity_examples():
    assert find_identity(cyclic(6)) == 0
    M = corrupt_identity_row(cyclic(32), [3, 7])
    assert find_identity(M) == 0
    assert find_identity(CayleyTable(np.zeros((4, 4), dtype=np.int64))) is None


def test_identity_pair_examples(rng):
    pairs = {tuple(p) for p in identity_pairs(cyclic(6), 0).tolist()}
    assert pairs == {(z, (6 - z) % 6) for z in range(6)}
    for _ in range(20):
        M, _ = corrupt(cyclic(32), 0.07, rng)
        assert 30 <= len(identity_pairs(M, 0)) <= 34


def test_decode_clean_and_corrupted(rng):
    t = cyclic(32)
    assert decode(t) == t
    for _ in range(100):
        M, cells = corrupt(t, 0.07, rng)
        assert len(cells) == 2
        assert decode(M) == t


def test_decode_random_abelian(rng):
    for n in (16, 64):
        t = random_abelian(n, rng)
        M, _ = corrupt(t, 0.07, rng)
        assert decode(M) == t


def test_random_magmas_rejected(rng):
    for _ in range(100):
        out = decode(random_magma(16, rng))
        assert out is None


def test_session_stable_and_corrupted(rng):
    t = cyclic(16)
    dyn = DynamicTableSession(t, [4])
    twin = new_session("det", GroupContext(t), [4])
    budget = int(0.07 * 16)
    cells = []
    for step in range(10):
        changes = []
        if len(cells) < budget:
            i, j = (int(x) for x in rng.integers(0, 16, size=2))
            changes = [(i, j, (int(t.op[i, j]) + 1) % 16)]
            cells.append((i, j))
        gen = [("insert", int(rng.integers(0, 16)))] if step % 3 == 0 else []
        assert dyn.step(changes, gen) == "normal"
        twin.step(gen)
        for x in range(16):
            assert dyn.query(x) == (twin.query(x), None)


def test_session_switches_group():
    z4, v4 = cyclic(4), abelian_from_invariants([2, 2])
    dyn = DynamicTableSession(z4, [1])
    diff = [(i, j, int(v4.op[i, j])) for i in range(4) for j in range(4) if z4.op[i, j] != v4.op[i, j]]
    states = []
    while diff:
        chunk, diff = diff[:dyn.table_budget], diff[dyn.table_budget:]
        states.append(dyn.step(chunk))
        for x in range(4):
            ans, flag = dyn.query(x)
            assert flag == (None if states[-1] == "normal" else states[-1])
    assert dyn.M == v4
    for _ in range(dyn.w + 1):
        states.append(dyn.step())
    assert states[-1] == "normal" and "provisional" in states
    H = enumerate_subgroup_bfs(v4, 0, [1])
    assert {x for x in range(4) if dyn.query(x)[0]} == H


def test_undefined_answers_memoized():
    t = cyclic(8)
    dyn = DynamicTableSession(t, [2])
    assert dyn.step([(0, 0, 7), (0, 1, 7)]) == "undefined"
    first = dyn.query(3)
    assert first == (False, "undefined")
    assert dyn.step() == "undefined" and dyn.query(3) == first
    assert dyn.step([(0, 0, 0), (0, 1, 1)]) == "normal"
    assert dyn.query(2) == (True, None) and dyn.query(3) == (False, None)
    with pytest.raises(ValueError):
        dyn.step([(0, 0, 0)] * (dyn.table_budget + 1))
