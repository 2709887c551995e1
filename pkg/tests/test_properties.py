"""Property-based checks against Fraction brute force."""

import itertools
from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from snalip import io
from snalip.acceptance import oracle_axioms
from snalip.certify import certify_c0, grid_oracle, sign_grid
from snalip.lipschitz import FunctionFamily, LipschitzFunction, lip_norm
from snalip.metric import FiniteMetricSpace, validate_metric

rationals = st.fractions(min_value=0, max_value=4, max_denominator=12)


@st.composite
def matrices(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    M = [[draw(rationals) for _ in range(n)] for _ in range(n)]
    if draw(st.booleans()):
        for i in range(n):
            M[i][i] = Fraction(0)
            for j in range(i):
                M[i][j] = M[j][i]
    return M


@st.composite
def metrics(draw, max_n=7, min_n=2):
    n = draw(st.integers(min_n, max_n))
    vals = st.fractions(min_value=1, max_value=2, max_denominator=8)
    M = [[Fraction(0)] * n for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        M[i][j] = M[j][i] = draw(vals)
    return FiniteMetricSpace.from_matrix([f"p{i}" for i in range(n)], "p0", M)


@st.composite
def families(draw):
    sp = draw(metrics(max_n=5))
    k = draw(st.integers(1, 3))
    members = []
    vals = st.fractions(min_value=-2, max_value=2, max_denominator=6)
    while len(members) < k:
        f = LipschitzFunction.from_values(sp, [draw(vals) for _ in sp.points], f"f{len(members) + 1}", normalize=True)
        norm = lip_norm(f)
        if norm:
            members.append(f.scaled(1 / norm))
    return FunctionFamily(members)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_validation_matches_oracle(M):
    sp = FiniteMetricSpace.from_matrix([f"p{i}" for i in range(len(M))], "p0", M)
    pos = {p: i for i, p in enumerate(sp.points)}
    got = {(v.axiom, tuple(pos[p] for p in v.witness)) for v in validate_metric(sp).violations}
    assert got == oracle_axioms(M)


@settings(max_examples=60, deadline=None)
@given(metrics())
def test_round_trip(sp):
    text = io.dump_space(sp)
    assert io.dump_space(io.parse_space(text)) == text


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.large_base_example])
@given(families())
def test_certificate_matches_sign_grid(fam):
    res = certify_c0(fam)
    worst = grid_oracle(fam, sign_grid(len(fam)))
    assert bool(res) == (worst <= 1)
    if not res:
        assert res.recompute() == res.quotient > 1
