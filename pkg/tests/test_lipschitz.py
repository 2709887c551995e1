import itertools
from fractions import Fraction

import numpy as np
import pytest

from snalip import fixtures as fx
from snalip.errors import InputError, UndefinedNormError
from snalip.lipschitz import FunctionFamily, LipschitzFunction, combine, lip_norm, sna_witnesses


def _brute(f):
    pts = f.space.points
    qs = {(p, q): f.quotient(p, q) for p, q in itertools.combinations(pts, 2)}
    best = max(qs.values())
    return best, [pq for pq, v in qs.items() if v == best]


@pytest.mark.parametrize("seed", range(15))
def test_norm_and_witnesses_match_bruteforce(seed):
    rng = np.random.default_rng(seed)
    sp = fx.random_metric(rng, int(rng.integers(2, 9)))
    f = LipschitzFunction.from_values(sp, [fx.random_rational(rng, -2, 2) for _ in sp.points], "f", normalize=True)
    norm, pairs = _brute(f)
    assert lip_norm(f) == norm
    assert [(w.p, w.q) for w in sna_witnesses(f)] == pairs
    assert all(w.check(f) for w in sna_witnesses(f))


def test_constant_function_has_norm_zero():
    f = LipschitzFunction.zero(fx.two_point())
    assert lip_norm(f) == 0


def test_one_point_space_has_no_norm():
    sp = fx.two_point().from_matrix(["x"], "x", [[0]])
    with pytest.raises(UndefinedNormError):
        lip_norm(LipschitzFunction.zero(sp))


def test_base_value_must_vanish():
    with pytest.raises(InputError):
        LipschitzFunction.from_values(fx.two_point(), {"x": 1})
    f = LipschitzFunction.from_values(fx.two_point(), {"x": 1, "y": 3}, normalize=True)
    assert f.value("y") == 2


def test_combine_is_pointwise():
    fam = fx.violating_spikes()
    g = combine(fam, ["1", "-1/2"])
    for p in fam.space.points:
        assert g.value(p) == fam[0].value(p) - Fraction(1, 2) * fam[1].value(p)


def test_family_checks():
    sp = fx.two_point()
    f = LipschitzFunction.from_values(sp, {"y": 1}, "a")
    with pytest.raises(InputError):
        FunctionFamily([])
    with pytest.raises(InputError):
        FunctionFamily([f, f])
    with pytest.raises(InputError):
        FunctionFamily([f], [("x", "x")])
    assert FunctionFamily([f.renamed(None)]).names == ["f1"]
