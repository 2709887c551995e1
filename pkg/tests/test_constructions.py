from fractions import Fraction

import pytest

from snalip import fixtures as fx
from snalip.certify import certify_c0
from snalip.constructions import HypothesisError, TentSpec, case1_select, gamma_compose, tent, tent_family
from snalip.errors import PreconditionError
from snalip.generators import make_generator
from snalip.lipschitz import lip_norm


def test_tent_shape():
    sp = fx.line_part(5, den=1)
    t = tent(sp, "q2", "q4")
    assert [t.value_at(i) for i in range(5)] == [0, 1, 2, 1, 0]
    assert lip_norm(t) == 1


def test_tent_hypothesis_checked():
    sp = fx.line_part(6, den=1)
    with pytest.raises(HypothesisError):
        tent_family(sp, TentSpec([("q0", "q2"), ("q3", "q5")]))
    with pytest.raises(PreconditionError):
        tent_family(sp, TentSpec([("q0", "q0")]))


def test_triple_spikes_values_and_certificate():
    fam = fx.triple_spikes(8)
    assert fam[0].value("a1") == Fraction(7, 128)
    assert fam[0].value("b1") == Fraction(-1, 128)
    assert certify_c0(fam)


def test_case1_margins_and_certificate():
    sel = case1_select(make_generator("satellites"), 3)
    assert list(sel.margins) == [Fraction(3, 128), Fraction(3, 1024), Fraction(3, 8192)]
    assert certify_c0(sel.family)


def test_gamma_closeness_knob():
    sp, marks = fx.gamma_marks(4)
    assert certify_c0(gamma_compose(sp, marks, Fraction(1, 4)))
    with pytest.raises(HypothesisError):
        gamma_compose(sp, marks, Fraction(1, 2))
