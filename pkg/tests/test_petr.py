from dataclasses import replace
from fractions import Fraction

import pytest

from snalip import fixtures as fx
from snalip.errors import HierarchyError
from snalip.petr import discreteness_check, nets, petr_extract, select_levels


@pytest.fixture(scope="module")
def hier():
    sp = fx.hierarchical()
    L, st = petr_extract(sp, 5)
    return sp, L, st


def test_net_sizes_and_levels(hier):
    sp, L, st = hier
    assert {k: len(v) for k, v in nets(sp, 5).items()} == {1: 8, 2: 8, 3: 64, 4: 64, 5: 512}
    assert st.selected == (1, 3, 5)
    assert len(L) == 449
    assert [s.case for s in st.steps] == ["a"]


def test_select_levels_skips_repeats():
    assert select_levels({1: 8, 2: 8, 3: 64, 4: 64, 5: 512}) == [1, 3, 5]


def test_discreteness_holds(hier):
    _, L, st = hier
    rep = discreteness_check(L, st)
    assert rep.ok and rep.bound > 0


def test_discreteness_catches_mutation(hier):
    sp, L, st = hier
    # add an outside point right next to a coarse member of L
    p = st.L[0][1]
    q = next(x for x in sp.points if x not in L and sp.dist(p, x) == Fraction(1, 32))
    rep = discreteness_check(L + [q], st)
    assert not rep.ok
    a, b, d, need = rep.violation
    assert d < need


def test_discreteness_catches_relabelled_level(hier):
    sp, L, st = hier
    # promote two fine points 1/32 apart to the coarse level, which needs 1/8
    a, b = st.L[1][:2]
    assert sp.dist(a, b) == Fraction(1, 32)
    moved = replace(st, L=(st.L[0] + (a, b), st.L[1][2:]))
    assert discreteness_check(L, st).ok
    assert not discreteness_check(L, moved).ok


def test_case_b_fires():
    sp = fx.concentration()
    L, st = petr_extract(sp, 5)
    assert any(s.case == "b" for s in st.steps)
    assert len(L) == 407
    assert discreteness_check(L, st).ok


def test_single_level_shortcut():
    sp = fx.ultrametric([(i,) for i in range(5)], [Fraction(1)])
    L, st = petr_extract(sp, 3)
    assert st.single_level and sorted(L) == sorted(sp.points)


def test_flat_hierarchy_rejected():
    sp = fx.two_point(d=Fraction(1, 8))
    with pytest.raises(HierarchyError):
        petr_extract(sp, 1)
