import numpy as np
import pytest

from cayleydyn.algebra import GroupContext
from cayleydyn.oracle import enumerate_subgroup_bfs
from cayleydyn.sampling import BudgetError
from cayleydyn.scheduler import (
    ScriptError, Session, SessionConfig, default_change_bound, default_window, new_session, parse_script,
    run_script, work_report,
)
from cayleydyn.tables import cyclic, direct_product, random_abelian


def random_changes(rng, session, n):
    k = int(rng.integers(0, session.change_bound + 1))
    eff = sorted(session.effective)
    out = []
    for _ in range(k):
        if eff and rng.random() < 0.4:
            out.append(("delete", int(rng.choice(eff))))
        else:
            out.append(("insert", int(rng.integers(0, n))))
    return out


def test_default_windows():
    assert default_window("rand", 256) == 8
    assert default_window("det", 256) == 3
    assert default_change_bound("rand", 256) == 8
    assert default_change_bound("det", 256) == 2


def test_window_one_rebuilds_every_step():
    g = GroupContext(cyclic(16))
    s = new_session("det", g, [4], w=1)
    for _ in range(5):
        rec = s.step([])
        assert rec["committed"] and rec["rebuild"] == rec["W"]
    assert s.commits == 5


def test_w_steps_one_swap():
    g = GroupContext(cyclic(64))
    s = new_session("det", g, [4, 6], w=3)
    recs = [s.step([]) for _ in range(9)]
    assert [r["committed"] for r in recs] == [False, False, True] * 3
    for r in recs:
        assert r["rebuild"] <= r["budget"]


@pytest.mark.parametrize("engine", ["det", "rand"])
def test_identity_always_member(engine):
    g = GroupContext(cyclic(16))
    s = new_session(engine, g, [])
    rng = np.random.default_rng(0)
    for _ in range(20):
        s.step(random_changes(rng, s, 16))
        assert s.query(0)


def test_delete_sole_generator():
    g = GroupContext(cyclic(8))
    s = new_session("det", g, [1], w=2)
    s.step([("delete", 1)])
    assert not s.query(1)
    s.step([])
    assert not s.query(1) and s.query(0)


def test_budget_rejection():
    g = GroupContext(cyclic(16))
    s = new_session("det", g, [], change_bound=1)
    with pytest.raises(BudgetError):
        s.step([("insert", 1), ("insert", 2)])
    assert s.clock == 0


@pytest.mark.parametrize("n", [8, 16, 27, 36, 64, 81])
def test_det_lockstep(n):
    rng = np.random.default_rng(n)
    t = random_abelian(n, rng)
    g = GroupContext(t)
    if max(c.ctx.rank for c in g.components) > 3:
        pytest.skip("rank too large for the fast suite")
    s = new_session("det", g, rng.integers(0, n, size=2).tolist())
    for _ in range(40):
        s.step(random_changes(rng, s, n))
        H = enumerate_subgroup_bfs(t, g.e, s.effective)
        assert {x for x in range(n) if s.query(x)} == H


def test_rand_one_sided():
    rng = np.random.default_rng(7)
    t = cyclic(64)
    g = GroupContext(t)
    s = new_session("rand", g, [8], seed=1)
    agree = total = 0
    for _ in range(60):
        s.step(random_changes(rng, s, 64))
        H = enumerate_subgroup_bfs(t, g.e, s.effective)
        for x in range(64):
            ans = s.query(x)
            assert not ans or x in H
            agree += ans == (x in H)
            total += 1
    assert agree >= 0.99 * total


def test_determinism():
    def run():
        rng = np.random.default_rng(3)
        g = GroupContext(direct_product(cyclic(4), cyclic(8)))
        s = new_session("rand", g, [1], seed=5)
        out = []
        for _ in range(20):
            s.step(random_changes(rng, s, 32))
            out.append(tuple(s.query(x) for x in range(32)))
        return out, work_report(s)["per_step"]
    assert run() == run()


def test_work_report_bounds():
    g = GroupContext(cyclic(128))
    s = new_session("det", g, [2, 3])
    for _ in range(12):
        s.step([])
    rep = work_report(s)
    assert rep["steps"] == 12 and rep["commits"] == 12 // s.w
    for r in rep["per_step"]:
        assert r["rebuild"] <= -(-r["W"] // s.w) and r["change"] == 0


def test_parse_script():
    cmds = parse_script("INSERT 2  # c\n\nSTEP\nQUERY 4\nASSERT 3 OUT\n")
    assert cmds == [(1, "INSERT", 2, None), (3, "STEP", None, None), (4, "QUERY", 4, None),
                    (5, "ASSERT", 3, False)]
    for bad in ("FLY 2", "INSERT x", "ASSERT 2 MAYBE", "STEP 3"):
        with pytest.raises(ScriptError) as exc:
            parse_script("STEP\n" + bad)
        assert exc.value.line == 2


def test_run_script():
    t = cyclic(8)
    g = GroupContext(t)
    s = Session(g, [], SessionConfig())
    cmds = parse_script("INSERT 2\nSTEP\nASSERT 4 IN\nASSERT 3 OUT\nINSERT 5\nSTEP\nASSERT 3 IN\nINSERT 1\n")
    out = run_script(s, cmds, oracle=lambda eff, x: x in enumerate_subgroup_bfs(t, g.e, eff))
    assert out["failures"] == [] and len(out["records"]) == 2 and out["unapplied"] == 1
    bad = run_script(Session(g, [], SessionConfig()), parse_script("STEP\nASSERT 3 IN\n"))
    assert bad["failures"][0]["line"] == 2
