from fractions import Fraction

import numpy as np
import pytest

from snalip import fixtures as fx
from snalip.certify import (
    ConstancyCounterexample,
    certify_c0,
    constancy_check,
    grid_oracle,
    sign_grid,
    summability_holds,
)
from snalip.errors import NotNormalizedError
from snalip.lipschitz import FunctionFamily, LipschitzFunction


def test_tent_family_is_certified():
    cert = certify_c0(fx.tent_disjoint())
    assert cert.verdict == "certified"
    assert cert.checked_pairs == 6


def test_violation_is_exact():
    v = certify_c0(fx.violating_spikes())
    assert v.verdict == "violated"
    assert v.pair == ("p1", "p3")
    assert v.excess == Fraction(1, 24)
    assert v.quotient == Fraction(33, 32)
    assert v.recompute() == v.quotient


def test_not_normalized_is_refused():
    sp = fx.two_point()
    f = LipschitzFunction.from_values(sp, {"y": 2}, "big")
    with pytest.raises(NotNormalizedError) as err:
        certify_c0(FunctionFamily([f]))
    assert err.value.norm == 2


@pytest.mark.parametrize("seed", range(12))
def test_certificate_agrees_with_sign_grid(seed):
    rng = np.random.default_rng(seed)
    fam = fx.random_family(rng, n_max=7, k_max=3)
    res = certify_c0(fam)
    worst = grid_oracle(fam, sign_grid(len(fam)))
    if res:
        assert worst <= 1
    else:
        assert worst > 1
        assert res.recompute() > 1


def test_constancy_and_summability():
    fam = fx.tent_disjoint()
    table = constancy_check(fam)
    assert not isinstance(table, ConstancyCounterexample)
    assert summability_holds(fam)
    sp = fx.line_part(3, den=1)
    f = LipschitzFunction.from_values(sp, [0, 1, 1], "f")
    g = LipschitzFunction.from_values(sp, [0, 1, 0], "g")
    bad = constancy_check(FunctionFamily([f, g], [("q0", "q1"), ("q0", "q1")]))
    assert isinstance(bad, ConstancyCounterexample)
    assert (bad.i, bad.j, bad.pair) == (1, 0, ("q0", "q1"))


def test_tent_sum_scale():
    res = certify_c0(fx.tent_sum(8, 200))
    assert res.verdict == "certified"
