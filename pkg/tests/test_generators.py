from fractions import Fraction

import pytest

from snalip.errors import InputError
from snalip.generators import GENERATORS, make_generator
from snalip.metric import validate_metric


@pytest.mark.parametrize("kind", sorted(GENERATORS))
def test_truncations_are_metrics(kind):
    gen = make_generator(kind)
    sp = gen.truncate(12)
    assert len(sp) == 12
    assert validate_metric(sp).ok


@pytest.mark.parametrize("kind", sorted(GENERATORS))
def test_truncation_agrees_with_distance_formula(kind):
    gen = make_generator(kind)
    sp = gen.truncate(8)
    for i in range(8):
        for j in range(8):
            if i != j:
                assert sp.dist_at(i, j) == gen.distance(i, j)


def test_ud_first_distance():
    sp = make_generator("ud").truncate(2)
    assert sp.dist_at(0, 1) == Fraction(3, 2)


def test_unknown_kind_and_bad_size():
    with pytest.raises(InputError):
        make_generator("nope")
    with pytest.raises(InputError):
        make_generator("ud").truncate(0)
