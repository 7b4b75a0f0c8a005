import numpy as np
import pytest
from hypothesis import given, strategies as st

from cayleydyn.tables import (
    CayleyTable, Structure, TableError, abelian_from_invariants, abelian_isomorphism_classes, adjoin_identity,
    cyclic, cyclic_monoid, direct_product, factorize, min_semilattice, parse_spec, random_abelian,
    random_commutative_monoid, random_magma, symmetric3, truncated_addition, validate_table, zero_semigroup,
)


def test_cyclic_and_product_classes():
    assert validate_table(cyclic(6)).tag == Structure.ABELIAN_GROUP
    assert validate_table(symmetric3()).tag == Structure.GROUP
    t = direct_product(cyclic(2), cyclic(4))
    assert t.n == 8 and validate_table(t).tag == Structure.ABELIAN_GROUP


@pytest.mark.parametrize("t", [truncated_addition(4), min_semilattice(4), cyclic_monoid(2, 3),
                               adjoin_identity(zero_semigroup(3))])
def test_monoid_builders_are_commutative_monoids(t):
    assert validate_table(t).tag == Structure.COMMUTATIVE_MONOID


def test_magma_is_detected(rng):
    sc = validate_table(CayleyTable(np.zeros((4, 4), dtype=np.int64)))
    assert sc.tag < Structure.MONOID
    assert validate_table(random_magma(8, rng)).tag <= Structure.MONOID


def test_text_roundtrip(tmp_path):
    t = abelian_from_invariants((2, 6))
    p = tmp_path / "t.tbl"
    t.save(p)
    assert CayleyTable.load(p) == t
    assert CayleyTable.from_text("# comment\n2\n0 1\n1 0\n") == cyclic(2)


@pytest.mark.parametrize("text", ["", "2\n0 1\n", "2\n0 1\n1 x\n", "0\n"])
def test_malformed_tables(text):
    with pytest.raises(TableError):
        CayleyTable.from_text(text)


@given(st.integers(2, 200))
def test_factorize(n):
    f = factorize(n)
    assert np.prod([p ** a for p, a in f]) == n


def test_isomorphism_class_counts():
    # number of abelian groups of order 1..16
    expected = [1, 1, 1, 2, 1, 1, 1, 3, 2, 1, 1, 2, 1, 1, 1, 5]
    assert [len(abelian_isomorphism_classes(n)) for n in range(1, 17)] == expected


def test_parse_spec(rng):
    assert parse_spec("cyclic:6", rng) == cyclic(6)
    assert parse_spec("product:cyclic:2xcyclic:4", rng) == direct_product(cyclic(2), cyclic(4))
    t = parse_spec("random-abelian:12", np.random.default_rng(7))
    assert t.n == 12 and validate_table(t).tag == Structure.ABELIAN_GROUP
    for bad in ["cyclic:0", "nope", "cyclic:x", "triangle:3"]:
        with pytest.raises(TableError):
            parse_spec(bad, rng)


def test_random_generators(rng):
    for _ in range(20):
        assert validate_table(random_abelian(int(rng.integers(1, 60)), rng)).tag == Structure.ABELIAN_GROUP
        m = random_commutative_monoid(64, rng)
        assert m.n <= 64 and validate_table(m).tag >= Structure.COMMUTATIVE_MONOID


def test_relabel_preserves_class(rng):
    t = abelian_from_invariants((3, 9))
    assert validate_table(t.relabel(rng.permutation(t.n))).tag == Structure.ABELIAN_GROUP
