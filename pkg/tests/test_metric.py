from fractions import Fraction

import numpy as np
import pytest

from snalip import fixtures as fx
from snalip.acceptance import oracle_axioms
from snalip.errors import InputError
from snalip.metric import (
    FiniteMetricSpace,
    disjoint_sum,
    is_uniformly_discrete,
    maximal_separated_subset,
    separation_radius,
    subspace,
    validate_metric,
)


def _idx(space, report):
    pos = {p: i for i, p in enumerate(space.points)}
    return {(v.axiom, tuple(pos[p] for p in v.witness)) for v in report.violations}


def test_valid_metric_has_no_violations():
    sp = fx.random_metric(np.random.default_rng(0), 6)
    assert validate_metric(sp).ok


def test_triangle_witness_convention():
    M = [[0, 1, 5], [1, 0, 1], [5, 1, 0]]
    sp = FiniteMetricSpace.from_matrix(["a", "b", "c"], "a", M)
    rep = validate_metric(sp)
    assert not rep
    assert ("triangle", ("a", "b", "c")) in {(v.axiom, v.witness) for v in rep.violations}


def test_asymmetric_and_zero_entries_reported():
    M = [[0, 1, 0], [2, 0, 1], [0, 1, 0]]
    sp = FiniteMetricSpace.from_matrix(["a", "b", "c"], "a", M)
    kinds = {v.axiom for v in validate_metric(sp).violations}
    assert {"symmetry", "positivity"} <= kinds


@pytest.mark.parametrize("seed", range(20))
def test_matches_bruteforce_oracle(seed):
    rng = np.random.default_rng(seed)
    M = fx.random_matrix(rng, int(rng.integers(1, 7)))
    sp = FiniteMetricSpace.from_matrix([f"p{i}" for i in range(len(M))], "p0", M)
    assert _idx(sp, validate_metric(sp)) == oracle_axioms(M)


def test_rejects_malformed_input():
    with pytest.raises(InputError):
        FiniteMetricSpace.from_matrix(["a", "a"], "a", [[0, 1], [1, 0]])
    with pytest.raises(InputError):
        FiniteMetricSpace.from_matrix(["a", "b"], "z", [[0, 1], [1, 0]])
    with pytest.raises(InputError):
        FiniteMetricSpace.from_matrix(["a", "b"], "a", [[0, 1]])
    with pytest.raises(InputError):
        FiniteMetricSpace.from_matrix(["a", "b"], "a", [[0, -1], [-1, 0]])


def test_separation_radius_and_witnesses():
    sp = FiniteMetricSpace.from_matrix(["a", "b", "c"], "a", [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    rep = separation_radius(sp, "b")
    assert rep.radius == 1 and rep.witnesses == ("a", "c")
    ok, m = is_uniformly_discrete(sp)
    assert ok and m == 1
    with pytest.raises(InputError):
        separation_radius(fx.two_point().__class__.from_matrix(["x"], "x", [[0]]), "x")


def test_maximal_separated_subset_is_separated_and_covering():
    sp = fx.line_part(20, den=4)
    net = maximal_separated_subset(sp, 1)
    assert net == [f"q{i}" for i in range(0, 20, 4)]
    for p in sp.points:
        assert min(sp.dist(p, q) for q in net) < 1


def test_disjoint_sum_and_subspace():
    sp = disjoint_sum([fx.two_point(), fx.two_point()], 3)
    assert len(sp) == 4 and sp.dist(sp.points[0], sp.points[2]) == 3
    assert validate_metric(sp).ok
    sub = subspace(sp, sp.points[:2])
    assert sub.matrix() == [[0, 1], [1, 0]]
    with pytest.raises(InputError):
        disjoint_sum([fx.two_point(d=2), fx.two_point(d=2)], Fraction(1, 2))
