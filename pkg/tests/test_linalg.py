from fractions import Fraction
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cayleydyn.algebra import GroupContext
from cayleydyn.linalg import (
    GuardError, LinalgEngine, bareiss_det, build_cache, det_crt, det_lemma, det_update, encode_system, feasible,
    smw_update, solve_witness, woodbury_inverse, zero_extension_witness,
)
from cayleydyn.linalg.intmat import ModulusTooSmall, inverse_fraction, primes_for, solve_integer
from cayleydyn.linalg.membership import SubmatrixCache, scaled_vector, verify_witness
from cayleydyn.linalg.polymat import adj_from_charadj, charpoly_adj, det_from_charpoly
from cayleydyn.oracle import bfs_membership, enumerate_subgroup_bfs
from cayleydyn.tables import cyclic, direct_product, random_abelian


def pctx(t):
    c = GroupContext(t).components[0]
    return c


def entry_for(M):
    cache = SubmatrixCache(len(M), 2, [list(col) for col in zip(*M)])
    return cache.entries[tuple(range(len(M)))]


# -- encoding and feasibility ---------------------------------------------------

def test_encode_examples():
    c = pctx(cyclic(8))
    sys = encode_system(c.ctx, [int(c.proj[2])], int(c.proj[4]))
    assert sys.A == [[2]] and sys.At == [[2, 8]] and sys.b == [4]
    assert encode_system(c.ctx, [int(c.proj[2])], c.ctx.e).b == [0]
    c2 = pctx(direct_product(cyclic(2), cyclic(4)))
    ctx = c2.ctx
    assert ctx.m == 3 and sorted(ctx.orders) == [2, 4]
    col = scaled_vector(ctx, int(c2.proj[1 * 4 + 2]))
    for v, o in zip(col, ctx.orders):
        assert 0 <= v < 8 and v % (8 // o) == 0


def test_feasible_examples():
    from cayleydyn.linalg.membership import LinearSystem
    for b, want in (([4], True), ([3], False), ([0], True)):
        sys = LinearSystem([[2]], [[2, 8]], b, 2, 3, [2])
        assert feasible(sys) is want


def test_build_cache_examples():
    cache = build_cache([[2, 8]])
    assert sorted(e.d for e in cache.entries.values()) == [(-8, 1), (-2, 1)]
    assert sorted(e.det for e in cache.entries.values()) == [2, 8]
    d, adj = charpoly_adj([[0]])
    assert d == (0, 1) and adj == [[(1,)]]
    d, adj = charpoly_adj([[2, 0], [0, 4]])
    assert d == (8, -6, 1) and det_from_charpoly(d, 2) == 8


def test_guards():
    with pytest.raises(GuardError):
        SubmatrixCache(11, 2, [[0] * 11] * 12)
    with pytest.raises(GuardError):
        SubmatrixCache(1, 2, [[1]] * 25)


def test_witness_examples():
    c = pctx(cyclic(8))
    ctx = c.ctx
    two, five, three = (int(c.proj[x]) for x in (2, 5, 3))
    z = solve_witness(encode_system(ctx, [two], int(c.proj[4])), ctx, int(c.proj[4]))
    assert z[0] % 8 in (2, 6)  # 2*2 = 4 and 2*6 = 12 = 4
    assert solve_witness(encode_system(ctx, [two], ctx.e), ctx, ctx.e) is not None
    z = solve_witness(encode_system(ctx, [two, five], three), ctx, three)
    assert verify_witness(ctx, [two, five], [x % 8 for x in z[:2]], three)
    assert solve_witness(encode_system(ctx, [two], three)) is None


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6))
def test_member_matches_bfs(seed):
    rng = np.random.default_rng(seed)
    t = random_abelian(int(rng.choice([8, 16, 27, 32, 64, 81, 128, 256])), rng)
    c = pctx(t)
    ctx = c.ctx
    T = rng.integers(0, t.n, size=int(rng.integers(0, 4))).tolist()
    H = enumerate_subgroup_bfs(t, GroupContext(t).e, T)
    local = [int(c.proj[x]) for x in T]
    cache = build_cache(encode_system(ctx, local, ctx.e).At)
    for g in range(t.n):
        sys = encode_system(ctx, local, int(c.proj[g]))
        ok = cache.feasible(sys.b)
        assert ok == (g in H)
        z = solve_witness(sys, ctx, int(c.proj[g]))
        assert (z is not None) == ok


# -- update identities ----------------------------------------------------------

def test_smw_examples():
    ent = entry_for([[2, 0], [0, 2]])
    d, adj = smw_update(ent, [[1], [0]], [[1]], [[1, 0]])
    assert d == (6, -5, 1)
    adjM = adj_from_charadj(adj, 2)
    det = det_from_charpoly(d, 2)
    assert [[Fraction(x, det) for x in row] for row in adjM] == [[Fraction(1, 3), 0], [0, Fraction(1, 2)]]
    assert smw_update(ent, [[1], [0]], [[0]], [[1, 0]]) == (ent.d, ent.adj)


def test_det_update_examples():
    ent = entry_for([[1, 0], [0, 1]])
    assert det_from_charpoly(det_update(ent, [[1], [0]], [[1], [0]]), 2) == 2
    assert det_update(ent, [[0], [0]], [[1], [0]]) == ent.d


def random_update(rng, l, t):
    M = rng.integers(-5, 6, size=(l, l)).tolist()
    U = rng.integers(-5, 6, size=(l, t)).tolist()
    C = rng.integers(-3, 4, size=(t, t)).tolist()
    V = rng.integers(-5, 6, size=(t, l)).tolist()
    return M, U, C, V


@given(st.integers(0, 10 ** 6), st.integers(2, 5), st.integers(1, 2))
def test_smw_matches_recompute(seed, l, t):
    rng = np.random.default_rng(seed)
    M, U, C, V = random_update(rng, l, t)
    ent = entry_for(M)
    Mp = (np.array(M) + np.array(U) @ np.array(C) @ np.array(V)).tolist()
    assert smw_update(ent, U, C, V) == charpoly_adj(Mp)
    Vt = rng.integers(-5, 6, size=(l, t)).tolist()
    Mq = (np.array(M) + np.array(U) @ np.array(Vt).T).tolist()
    assert det_from_charpoly(det_update(ent, U, Vt), l) == bareiss_det(Mq)


@given(st.integers(0, 10 ** 6))
def test_rational_identities(seed):
    rng = np.random.default_rng(seed)
    M, U, C, V = random_update(rng, 4, 2)
    Mp = (np.array(M) + np.array(U) @ np.array(C) @ np.array(V)).tolist()
    got = woodbury_inverse(M, U, C, V)
    want = inverse_fraction(Mp)
    if got is not None:
        assert got == want
    Vt = np.array(V).T.tolist()
    d = det_lemma(M, U, Vt)
    if d is not None:
        assert d == bareiss_det((np.array(M) + np.array(U) @ np.array(V)).tolist())


def test_det_crt_examples(rng):
    assert det_crt([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [5, 7]) == 1
    assert det_crt([[2, 1], [1, 2]], [7, 11]) == 3
    with pytest.raises(ModulusTooSmall):
        det_crt([[100, 1], [1, 100]], [3, 5])
    for _ in range(30):
        B = rng.integers(-255, 256, size=(6, 6)).tolist()
        assert det_crt(B, primes_for(B)) == bareiss_det(B)


def test_solve_integer_small():
    assert solve_integer([[2, 4]], [3]) is None
    z = solve_integer([[6, 10, 15]], [1])
    assert 6 * z[0] + 10 * z[1] + 15 * z[2] == 1


# -- cache updates and engine ---------------------------------------------------

def test_cache_update_is_confluent(rng):
    for _ in range(30):
        l = int(rng.integers(1, 4))
        cols = rng.integers(0, 16, size=(l + 4, l)).tolist()
        cache = SubmatrixCache(l, 2, cols)
        for _ in range(3):
            changes = {int(j): rng.integers(0, 16, size=l).tolist()
                       for j in rng.choice(len(cols), size=int(rng.integers(1, 5)), replace=False)}
            cache.update_columns(changes)
        assert cache.snapshot() == SubmatrixCache(l, 2, cache.columns).snapshot()


def test_bulk_update_examples():
    c = pctx(cyclic(8))
    eng = LinalgEngine(c.ctx, 4, [2], key=c.proj)
    assert not eng.member(3)
    before = eng.cache.snapshot()
    assert eng.bulk_update() == 0 and eng.cache.snapshot() == before
    eng.bulk_update(inserts=[5])
    assert eng.member(3)
    eng.bulk_update(deletes=[2, 5])
    assert [g for g in range(8) if eng.member(g)] == [0]
    with pytest.raises(GuardError):
        eng.bulk_update(inserts=range(1, 6))


def test_engine_witness():
    c = pctx(cyclic(16))
    eng = LinalgEngine(c.ctx, 3, [6, 10], key=c.proj)
    wit = eng.witness(4)
    acc = 0
    for x, z in wit.items():
        acc = (acc + x * z) % 16
    assert acc == 4
    assert eng.witness(1) is None


def test_zero_extension_artifact(rng):
    """A single minimum-valuation block with zeros elsewhere is not a reliable
    witness; the Hermite solver always is."""
    feasible_cases = failures = 0
    for _ in range(40):
        t = random_abelian(int(rng.choice([16, 32, 64, 81])), rng)
        c = pctx(t)
        ctx = c.ctx
        if ctx.rank > 3:
            continue
        T = [int(c.proj[x]) for x in rng.integers(0, t.n, size=3)]
        cache = build_cache(encode_system(ctx, T, ctx.e).At)
        for g in range(ctx.n):
            sys = encode_system(ctx, T, g)
            if not cache.feasible(sys.b):
                continue
            feasible_cases += 1
            assert solve_witness(sys, ctx, g) is not None
            z, _ = zero_extension_witness(sys, cache)
            failures += z is None
    print(f"zero-extension failures: {failures}/{feasible_cases}")
    assert feasible_cases > 0 and failures > 0
