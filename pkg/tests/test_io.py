import json

import numpy as np
import pytest

from snalip import fixtures as fx
from snalip import io
from snalip.certify import certify_c0
from snalip.errors import InputError
from snalip.generators import GENERATORS, make_generator


@pytest.mark.parametrize("kind", sorted(GENERATORS))
@pytest.mark.parametrize("form", ["explicit", "generator"])
def test_space_round_trip(kind, form):
    sp = make_generator(kind).truncate(9)
    text = io.dump_space(sp, form)
    back = io.parse_space(text)
    assert back == sp
    assert io.dump_space(back, form) == text


def test_family_round_trip():
    for fam in (fx.tent_disjoint(), fx.violating_spikes(), fx.triple_spikes(3)):
        text = io.dump_family(fam)
        back = io.parse_family(text)
        assert io.dump_family(back) == text
        assert back.names == fam.names
        assert back.witnesses == fam.witnesses


def test_family_with_space_reference(tmp_path):
    sp = fx.violating_spikes().space
    (tmp_path / "space.json").write_text(io.dump_space(sp))
    fam = fx.violating_spikes()
    (tmp_path / "fam.json").write_text(io.dump_family(fam, space_ref="space.json"))
    back = io.load_family(tmp_path / "fam.json")
    assert back.space == sp


def test_reports_are_exact_strings():
    rep = io.certificate_report(certify_c0(fx.violating_spikes()))
    assert rep["excess"] == "1/24" and rep["quotient"] == "33/32"
    assert rep["quotient_decimal"] == "1.031250000000"
    assert json.loads(io.dump_report(rep)) == rep


def test_decimal_truncates():
    from fractions import Fraction

    assert io.decimal(Fraction(2, 3), 4) == "0.6666"
    assert io.decimal(Fraction(-1, 8), 3) == "-0.125"


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "{}",
        '{"kind": "explicit", "points": ["a"], "base": "a"}',
        '{"kind": "explicit", "points": ["a"], "base": "a", "dist": [["x"]]}',
        '{"kind": "ud"}',
        '{"kind": "ud", "truncate": "3"}',
    ],
)
def test_bad_space_documents(text):
    with pytest.raises(InputError):
        io.parse_space(text)


def test_random_spaces_round_trip():
    rng = np.random.default_rng(7)
    for _ in range(10):
        sp = fx.random_metric(rng, int(rng.integers(1, 8)))
        assert io.parse_space(io.dump_space(sp)) == sp
