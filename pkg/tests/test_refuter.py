import itertools
from fractions import Fraction

import numpy as np
import pytest

from snalip import fixtures as fx
from snalip.errors import InputError, PreconditionError, SizeError
from snalip.refuter import (
    COLORS,
    Inconclusive,
    RefutationTrace,
    attack,
    color_pairs,
    coloring_from_table,
    monochromatic_subset,
    pair_color,
    shared_zero_attack,
)


def test_pair_colors():
    assert pair_color(("a", "b"), ("c", "d")) == "A"
    assert pair_color(("a", "b"), ("a", "d")) == "B1"
    assert pair_color(("a", "b"), ("c", "b")) == "B2"
    assert pair_color(("a", "b"), ("b", "d")) == "B3"


def test_monochromatic_subset_tie_order():
    c = coloring_from_table(4, {(0, 1): "A", (0, 2): "A", (1, 2): "A", (0, 3): "B1", (1, 3): "B1", (2, 3): "B2"})
    assert monochromatic_subset(c) == ("A", (0, 1, 2))
    # two triangles of equal size: A wins by colour order
    c = coloring_from_table(
        6,
        {(a, b): ("A" if b < 3 else "B1" if a >= 3 else "B3") for a, b in itertools.combinations(range(6), 2)},
    )
    assert monochromatic_subset(c) == ("A", (0, 1, 2))


def _oracle_max(k, table):
    best = 0
    for r in range(k, 1, -1):
        for S in itertools.combinations(range(k), r):
            for col in COLORS:
                if all(table[(a, b)] == col for a, b in itertools.combinations(S, 2)):
                    return r
    return best


@pytest.mark.parametrize("seed", range(10))
def test_exact_search_is_maximum(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 9))
    table = {(a, b): COLORS[int(rng.integers(0, 4))] for a, b in itertools.combinations(range(k), 2)}
    col, S = monochromatic_subset(coloring_from_table(k, table))
    assert len(S) == _oracle_max(k, table)
    assert all(table[(a, b)] == col for a, b in itertools.combinations(S, 2))
    gcol, G = monochromatic_subset(coloring_from_table(k, table), "greedy")
    assert all(table[(a, b)] == gcol for a, b in itertools.combinations(G, 2))


def test_exact_search_size_limit():
    k = 17
    table = {(a, b): "A" for a, b in itertools.combinations(range(k), 2)}
    with pytest.raises(SizeError):
        monochromatic_subset(coloring_from_table(k, table))
    assert len(monochromatic_subset(coloring_from_table(k, table), "greedy")[1]) == k


def test_bad_coloring_tables():
    with pytest.raises(InputError):
        coloring_from_table(3, {(0, 1): "A", (0, 2): "A", (1, 2): "Z"})
    with pytest.raises(InputError):
        coloring_from_table(3, {(0, 1): "A"})


def test_color_pairs_from_witnesses():
    col = color_pairs(fx.tent_disjoint())
    assert col.color(0, 1) == "A"


@pytest.mark.parametrize("seed", range(5))
def test_ud_case1_trace_verifies(seed):
    fam = fx.ud_case1_fixture(np.random.default_rng(seed))
    tr = attack(fam, "ud")
    assert isinstance(tr, RefutationTrace)
    assert tr.quotient > 1 and tr.recompute() == tr.quotient


def test_shared_zero_trace():
    tr = shared_zero_attack(fx.shared_zero_fixture(3, 5))
    assert tr.quotient == Fraction(96, 91)
    assert tr.pair == ("p3", "p5")
    assert attack(fx.shared_zero_fixture(3, 5), "proper").quotient == tr.quotient


def test_generic_modes():
    tr = attack(fx.violating_spikes())
    assert tr.quotient == Fraction(33, 32)
    out = attack(fx.tent_disjoint())
    assert isinstance(out, Inconclusive) and not out


def test_wrong_space_for_mode():
    with pytest.raises(PreconditionError):
        attack(fx.tent_disjoint(), "ud")
