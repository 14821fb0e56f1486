import pytest
from hypothesis import given, strategies as st

from oracles import partitions_brute
from reglab.lattice import (
    BL_LATTICE, DivisorClass, FiberConfig, Lattice, LatticeError, config_from_string,
    enumerate_max_picard_configs, gram_of, pair, parse_class, picard_number, primitive_class,
    self_intersection,
)

ints = st.integers(-50, 50)
classes = st.tuples(ints, ints).map(DivisorClass)

C, Fb = DivisorClass((1, 0)), DivisorClass((0, 1))


def test_basis_gram():
    assert gram_of(BL_LATTICE, [C, Fb]) == [[-2, 1], [1, 0]]
    assert BL_LATTICE.rank == 2 and BL_LATTICE.is_even()


@given(classes, classes, classes, ints)
def test_pairing_symmetric_bilinear(a, b, c, n):
    L = BL_LATTICE
    assert pair(L, a, b) == pair(L, b, a)
    assert pair(L, a + b, c) == pair(L, a, c) + pair(L, b, c)
    assert pair(L, n * a, b) == n * pair(L, a, b)


@given(classes)
def test_self_intersection_even(a):
    assert self_intersection(BL_LATTICE, a) % 2 == 0


def test_primitive_class_self_intersection():
    for g in range(101):
        assert self_intersection(BL_LATTICE, primitive_class(g)) == 2 * g - 2


def test_parse_and_label_examples():
    assert parse_class("C+5F") == DivisorClass((1, 5))
    assert parse_class("-2C - F") == DivisorClass((-2, -1))
    assert parse_class("3*F") == DivisorClass((0, 3))
    assert parse_class("0") == DivisorClass((0, 0))
    assert DivisorClass((1, 5)).label() == "C+5F"
    assert DivisorClass((0, 0)).label() == "0"
    for bad in ("", "C+G", "C F", "+", "2"):
        with pytest.raises(LatticeError):
            parse_class(bad)


@given(classes)
def test_label_roundtrip(a):
    assert parse_class(a.label()) == a


def test_lattice_validation():
    with pytest.raises(LatticeError):
        Lattice(((0, 1), (2, 0)), ("A", "B"))
    with pytest.raises(LatticeError):
        Lattice(((0,),), ("A", "B"))
    with pytest.raises(LatticeError):
        pair(BL_LATTICE, DivisorClass((1,)), C)


def test_picard_number_examples():
    assert picard_number(FiberConfig((4,) * 6)) == 20
    assert picard_number(FiberConfig((1,) * 24)) == 2
    assert FiberConfig((1, 3, 2)).chains == (3, 2, 1)
    with pytest.raises(LatticeError):
        FiberConfig((0, 3))
    with pytest.raises(LatticeError):
        config_from_string("4,x")


def test_max_picard_configs_match_brute_force():
    got = {tuple(sorted(c.chains)) for c in enumerate_max_picard_configs(24, 20)}
    assert got == partitions_brute(24, 6)
    assert (4, 4, 4, 4, 4, 4) in got
    for c in enumerate_max_picard_configs(24, 20):
        assert c.nodes == 24 and picard_number(c) == 20


@pytest.mark.parametrize("nodes,rank", [(12, 10), (10, 3), (6, 6), (5, 8)])
def test_configs_other_totals(nodes, rank):
    got = {tuple(sorted(c.chains)) for c in enumerate_max_picard_configs(nodes, rank)}
    s = nodes - rank + 2
    assert got == (partitions_brute(nodes, s) if s >= 1 else set())
