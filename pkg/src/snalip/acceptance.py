"""The eleven acceptance criteria, each returning a CriterionResult.

Expected values come either from independent brute-force oracles written
here (plain Fractions or separately built integer matrices, sharing no
scan code with the library) or from closed forms of the constructions.
Timing covers the library calls under test, not oracle work.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import fixtures as fx
from .certify import (
    Certificate,
    ConstancyCounterexample,
    ConstancyTable,
    Violation,
    certify_c0,
    constancy_check,
    grid_oracle,
    sign_grid,
)
from .constructions import case1_select
from .generators import GENERATORS, make_generator
from .io import dump_space, parse_space
from .lipschitz import FunctionFamily, LipschitzFunction, combine, lip_norm, sna_witnesses
from .metric import FiniteMetricSpace, is_uniformly_discrete, separation_radius, validate_metric
from .petr import discreteness_check, petr_extract
from .refuter import RefutationTrace, attack, shared_zero_attack


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    ok: bool
    detail: str
    seconds: float
    limit: float | None = None

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        lim = f" (limit {self.limit:g} s)" if self.limit is not None else ""
        return f"[{status}] {self.number:2d}. {self.title}: {self.detail} [{self.seconds:.2f} s{lim}]"


class _Clock:
    def __init__(self):
        self.total = 0.0

    def __call__(self, fn, *args, **kw):
        t = time.perf_counter()
        try:
            return fn(*args, **kw)
        finally:
            self.total += time.perf_counter() - t


def _result(number, title, failures, detail, seconds, limit=None):
    ok = not failures and (limit is None or seconds < limit)
    if failures:
        detail = f"{len(failures)} failure(s), first: {failures[0]}"
    elif limit is not None and seconds >= limit:
        detail = f"{detail}; too slow"
    return CriterionResult(number, title, ok, detail, seconds, limit)


# ---------------------------------------------------------------- oracles


def oracle_axioms(M):
    """Brute-force violations of a Fraction matrix, in the library's witness convention.

    Triangle witnesses (p, q, r) mean M[p][r] > M[p][q] + M[q][r]; with a
    symmetric matrix only p < r is listed.
    """
    n = len(M)
    out = set()
    sym = all(M[i][j] == M[j][i] for i in range(n) for j in range(n))
    for i in range(n):
        if M[i][i] != 0:
            out.add(("identity", (i,)))
        for j in range(i + 1, n):
            if M[i][j] == 0 or M[j][i] == 0:
                out.add(("positivity", (i, j)))
            if M[i][j] != M[j][i]:
                out.add(("symmetry", (i, j)))
    for p, q, r in itertools.permutations(range(n), 3):
        if sym and not p < r:
            continue
        if M[p][r] > M[p][q] + M[q][r]:
            out.add(("triangle", (p, q, r)))
    return out


def _integer_matrix(gen, n):
    """Scaled integer distances of the first n points, built from the raw formula."""
    vals = [[gen.distance(i, j) if i != j else Fraction(0) for j in range(n)] for i in range(n)]
    den = 1
    for row in vals:
        for v in row:
            den = math.lcm(den, v.denominator)
    A = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            A[i, j] = vals[i][j].numerator * (den // vals[i][j].denominator)
    return A


def oracle_triangle_count(A, n):
    """Number of (p, q, r), p < r, with A[p,r] > A[p,q] + A[q,r] within the leading n points."""
    B = A[:n, :n]
    bad = 0
    for q in range(n):
        S = B[:, q][:, None] + B[q, :][None, :]
        V = np.asarray(B > S, dtype=bool)
        V[q, :] = False
        V[:, q] = False
        bad += int(np.triu(V, 1).sum())
    return bad


def _labels(space, report):
    idx = {p: i for i, p in enumerate(space.points)}
    return {(v.axiom, tuple(idx[p] for p in v.witness)) for v in report.violations}


# ---------------------------------------------------------------- criteria

TRUNCATIONS = (2, 3, 5, 10, 25, 50, 100, 200)


def crit_1(seed=1):
    rng = np.random.default_rng(seed)
    clock = _Clock()
    failures = []
    matrices = 0
    for t in range(200):
        n = int(rng.integers(1, 21))
        M = fx.random_matrix(rng, n)
        space = FiniteMetricSpace.from_matrix([f"p{i}" for i in range(n)], "p0", M)
        got = _labels(space, clock(validate_metric, space))
        want = oracle_axioms(M)
        matrices += 1
        if got != want:
            failures.append(f"random matrix {t} (n={n}): {len(got)} vs oracle {len(want)} violations")
    for kind in GENERATORS:
        gen = make_generator(kind)
        A = _integer_matrix(gen, max(TRUNCATIONS))
        for n in TRUNCATIONS:
            space = gen.truncate(n)
            rep = clock(validate_metric, space)
            want = oracle_triangle_count(A, n)
            if not rep.ok or want != 0:
                failures.append(f"{kind} N={n}: library ok={rep.ok}, oracle violations={want}")
    detail = f"{matrices} random matrices and {len(GENERATORS)} kinds x N in {TRUNCATIONS} agree with the oracle"
    return _result(1, "metric validation vs oracle", failures, detail, clock.total, 5)


def crit_2(seed=2):
    rng = np.random.default_rng(seed)
    clock = _Clock()
    failures = []
    counts = {"certified": 0, "violated": 0}
    for t in range(500):
        fam = fx.random_family(rng, 12, 3)
        res = clock(certify_c0, fam)
        best = clock(grid_oracle, fam, sign_grid(len(fam)))
        counts[res.verdict] += 1
        if isinstance(res, Certificate) != (best <= 1):
            failures.append(f"family {t}: verdict {res.verdict} but grid maximum {best}")
        if isinstance(res, Violation):
            q = res.recompute()
            if not q > 1 or q != res.quotient:
                failures.append(f"family {t}: sign vector recomputes to {q}")
    detail = f"500 families ({counts['certified']} certified, {counts['violated']} violated) match the sign grid"
    return _result(2, "duality equivalence", failures, detail, clock.total, 30)


def _perturb(rng, fam: FunctionFamily):
    """Break constancy of member 1 on member 0's attainment pair."""
    space = fam.space
    x, y = fam.witnesses[0]
    target = y if x == space.base else x
    off = space.nums[~np.eye(len(space), dtype=bool)]
    eta = Fraction(int(off.min()), space.den) / 2
    g = fam[1]
    vals = g.values()
    vals[target] += eta if rng.random() < 0.5 else -eta
    h = LipschitzFunction.from_values(space, vals, g.name)
    h = h.scaled(1 / lip_norm(h))
    members = list(fam.members)
    members[1] = h
    wit = list(fam.witnesses)
    wit[1] = tuple(sna_witnesses(h)[0])
    return FunctionFamily(members, wit)


def crit_3(seed=3):
    rng = np.random.default_rng(seed)
    failures = []
    certified = 0
    t0 = time.perf_counter()
    while certified < 100:
        if certified % 2:
            fam = fx.random_tent_family(rng)
        else:
            fam = fx.with_attainment(fx.random_family(rng, 10, 3))
            if not isinstance(certify_c0(fam), Certificate):
                continue
        certified += 1
        res = constancy_check(fam)
        if not isinstance(res, ConstancyTable):
            failures.append(f"certified family {certified}: counterexample {res}")
    perturbed = 0
    while perturbed < 100:
        fam = _perturb(rng, fx.random_tent_family(rng))
        perturbed += 1
        cert = certify_c0(fam)
        if not isinstance(cert, Violation):
            failures.append(f"perturbed family {perturbed} still certifies")
        if not isinstance(constancy_check(fam), ConstancyCounterexample):
            failures.append(f"perturbed family {perturbed}: no counterexample")
    detail = "100 certified families give full tables; 100 perturbed give counterexamples"
    return _result(3, "constancy forcing", failures, detail, time.perf_counter() - t0)


def crit_4(seed=4):
    rng = np.random.default_rng(seed)
    clock = _Clock()
    failures = []
    fam = clock(fx.tent_sum, 64, 2000)
    res = clock(certify_c0, fam)
    if not isinstance(res, Certificate):
        failures.append(f"tent family not certified: {res}")
    k = len(fam)
    for t in range(100):
        lam = [fx.random_rational(rng, -3, 3) for _ in range(k)]
        if not any(lam):
            lam[0] = Fraction(1)
        top = max(abs(v) for v in lam)
        g = clock(combine, fam, lam)
        norm = clock(lip_norm, g)
        wit = {(w.p, w.q) for w in clock(sna_witnesses, g)}
        arg = [i for i, v in enumerate(lam) if abs(v) == top]
        if norm != top:
            failures.append(f"lambda {t}: norm {norm} != max |lambda| {top}")
        elif not any(tuple(fam.witnesses[i]) in wit for i in arg):
            failures.append(f"lambda {t}: no argmax tent pair among the witnesses")
    detail = f"{len(fam.space)} points, {k} tents certified; 100 combinations have norm max|lambda|"
    return _result(4, "tent reproduction", failures, detail, clock.total, 10)


def crit_5():
    t0 = time.perf_counter()
    failures = []
    ud = make_generator("ud")
    top = ud.truncate(max(TRUNCATIONS))
    for n in range(2, len(top) + 1):
        block = top.nums[:n, :n]
        diam = Fraction(int(block.max()), top.den)
        i, j = np.unravel_index(int(np.argmax(block)), block.shape)
        if diam != Fraction(3, 2) or sorted((int(i), int(j))) != [0, 1]:
            failures.append(f"ud N={n}: diameter {diam} at {(int(i), int(j))}")
    for n in TRUNCATIONS:
        sp = ud.truncate(n)
        if sp.diameter() != Fraction(3, 2) or sp.diameter_pair() != ("p1", "p2"):
            failures.append(f"ud truncation N={n}: diameter {sp.diameter()}")
        r = separation_radius(sp, sp.points[-1])
        if r.radius != 1 + Fraction(1, n):
            failures.append(f"ud truncation N={n}: finite radius {r.radius}")
    for p in top.points:
        rep = separation_radius(ud, p)
        if rep.radius != 1 or rep.attained:
            failures.append(f"ud generator at {p}: {rep}")
    if is_uniformly_discrete(ud) != (True, Fraction(1)):
        failures.append("ud generator is not reported uniformly discrete with infimum 1")
    pr = make_generator("proper")
    ptop = pr.truncate(max(TRUNCATIONS) + 1)
    for k in range(1, max(TRUNCATIONS) + 1):
        rep = separation_radius(pr, f"p{k}")
        fin = separation_radius(ptop, f"p{k}")
        if not (rep.radius == k and rep.attained and rep.witnesses == ("p0",)):
            failures.append(f"proper generator at p{k}: {rep}")
        if not (fin.radius == k and fin.witnesses == ("p0",)):
            failures.append(f"proper truncation at p{k}: {fin}")
    detail = "ud diameter 3/2 for N=2..200, R=1 not attained; proper R(p_k)=k attained at p0 for k<=200"
    return _result(5, "counterexample space facts", failures, detail, time.perf_counter() - t0)


def crit_6(levels=8):
    t0 = time.perf_counter()
    failures = []
    fam = fx.triple_spikes(levels)
    res = certify_c0(fam)
    if not isinstance(res, Certificate):
        failures.append(f"spike family not certified: {res}")
    for k, f in enumerate(fam.members, start=1):
        d = Fraction(1, 16**k)
        wit = [(w.p, w.q) for w in sna_witnesses(f)]
        if wit != [(f"a{k}", f"b{k}")]:
            failures.append(f"f{k} witnesses {wit}")
        if f.value(f"a{k}") != 7 * d / 8 or f.value(f"b{k}") != -d / 8:
            failures.append(f"f{k} values {f.value(f'a{k}')}, {f.value(f'b{k}')}")
    detail = f"{levels} spikes certified, witnesses exactly (a_k, b_k), values 7d/8 and -d/8"
    return _result(6, "spike reproduction", failures, detail, time.perf_counter() - t0)


def crit_7(count=10):
    t0 = time.perf_counter()
    failures = []
    sel = case1_select(make_generator("satellites"), count)
    sp = sel.space
    checked = 0
    for n, m in itertools.combinations(range(count), 2):
        (an, bn), (am, bm) = sel.pairs[n], sel.pairs[m]
        checked += 1
        if sp.dist(an, am) < sp.dist(an, bn) + sp.dist(am, bm):
            failures.append(f"picks {n + 1}, {m + 1}")
    if any(a <= b for a, b in zip(sel.margins, sel.margins[1:])):
        failures.append(f"margins not strictly decreasing: {sel.margins}")
    if not isinstance(certify_c0(sel.family), Certificate):
        failures.append("case-1 tents not certified")
    detail = f"{checked} pair inequalities hold, margins strictly decreasing, tents certified"
    return _result(7, "case-1 greedy selection", failures, detail, time.perf_counter() - t0)


def crit_8(seed=8):
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    failures = []
    traces = 0
    for t in range(200):
        fam = fx.random_family(rng, 12, 3)
        res = certify_c0(fam)
        out = attack(fam, "generic")
        is_trace = isinstance(out, RefutationTrace)
        traces += is_trace
        if is_trace != isinstance(res, Violation):
            failures.append(f"family {t}: attack {type(out).__name__} vs {res.verdict}")
        if is_trace:
            q = out.recompute()
            if q != out.quotient or not q > 1:
                failures.append(f"family {t}: trace recomputes to {q}")
    tents = [fx.tent_disjoint()] + [fx.random_tent_family(rng) for _ in range(30)]
    for t, fam in enumerate(tents):
        if isinstance(attack(fam, "generic"), RefutationTrace):
            failures.append(f"tent family {t} refuted")
    detail = f"200 families ({traces} traces) agree with the certificate; {len(tents)} tent families inconclusive"
    return _result(8, "refuter soundness and completeness", failures, detail, time.perf_counter() - t0)


def crit_9(seed=9):
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    failures = []
    for t in range(50):
        fam = fx.ud_case1_fixture(rng, 64)
        out = attack(fam, "ud")
        if not (isinstance(out, RefutationTrace) and out.mode == "case1" and out.quotient > 1):
            failures.append(f"fixture {t}: {type(out).__name__}")
    gen = make_generator("proper")
    shared = 0
    for jn, jm in itertools.permutations(range(1, 7), 2):
        for sn, sm in itertools.product((1, -1), repeat=2):
            fam = fx.shared_zero_fixture(jn, jm, sn, sm)
            out = shared_zero_attack(fam)
            want = Fraction(jn + jm) / (jn + jm - gen.eps(max(jn, jm)))
            shared += 1
            if not isinstance(out, RefutationTrace) or out.quotient != want or not want > 1:
                failures.append(f"shared base j=({jn},{jm}) signs ({sn},{sm}): {out}")
    detail = f"50 ud fixtures give case1 traces; {shared} shared-base fixtures hit the closed-form quotient"
    return _result(9, "proof-pattern attack", failures, detail, time.perf_counter() - t0)


def _contract_oracle(space, state):
    """Every cross-level pair checked with Fractions."""
    bad = []
    kk = state.selected
    for n in range(2, len(state.L) + 1):
        excl = set(state.N[n - 1])
        for j in range(1, n):
            bound = Fraction(1, 2 ** (kk[j] + 2))
            for x in state.L[n - 1]:
                for y in state.L[j - 1]:
                    if y not in excl and space.dist(x, y) < bound:
                        bad.append((n, j, x, y))
    return bad


def _net_oracle(space, state):
    """Separation and maximality of every net, compared as Fractions."""
    bad = []
    idx = {p: i for i, p in enumerate(space.points)}
    for k, net in state.nets.items():
        lim = Fraction(1, 2**k)
        closest = space.nums[[idx[p] for p in net]].min(axis=0)
        cover = all(Fraction(int(v), space.den) < lim for v in closest)
        sep = all(space.dist(a, b) >= lim for a, b in itertools.combinations(net, 2))
        if not (sep and cover):
            bad.append(k)
    return bad


def crit_10():
    clock = _Clock()
    failures = []
    sp = fx.hierarchical()
    L, st = clock(petr_extract, sp, 5, Fraction(1, 2))
    if st.selected != (1, 3, 5):
        failures.append(f"hierarchical levels {st.selected}")
    failures += [f"contract {b}" for b in _contract_oracle(sp, st)[:3]]
    failures += [f"net {k} not maximal separated" for k in _net_oracle(sp, st)]
    removed = len(st.working[-1]) - sum(len(x) for x in st.L[1:])
    floor = len(st.nets[st.selected[-1]]) - removed - sum(len(x) for x in st.N)
    if len(L) < floor:
        failures.append(f"|L| = {len(L)} below {floor}")
    rep = clock(discreteness_check, L, st)
    if not rep.ok:
        failures.append(f"hierarchical discreteness: {rep.violation}")
    hier = f"hierarchical |L|={len(L)} (>= {floor}), cases {[s.case for s in st.steps]}"

    sp2 = fx.concentration()
    L2, st2 = clock(petr_extract, sp2, 5, Fraction(1, 2))
    if not any(s.case == "b" for s in st2.steps):
        failures.append("case (b) never fired on the concentration fixture")
    for s in st2.steps:
        for i, part in enumerate(st2.L[: s.j0 or 0], start=1):
            if sum(1 for p in s.N if p in part) > 1:
                failures.append(f"step {s.level}: more than one excluded point from L_{i}")
    failures += [f"contract {b}" for b in _contract_oracle(sp2, st2)[:3]]
    rep2 = clock(discreteness_check, L2, st2)
    if not rep2.ok:
        failures.append(f"concentration discreteness: {rep2.violation}")
    sizes = [len(n) for n in st2.N]
    detail = f"{hier}; concentration |L|={len(L2)}, |N_n|={sizes}"
    return _result(10, "separated-net extraction", failures, detail, clock.total, 10)


def crit_11(seed=11):
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    failures = []
    for kind in GENERATORS:
        sp = make_generator(kind).truncate(12)
        for form in ("explicit", "generator"):
            text = dump_space(sp, form)
            back = parse_space(text)
            if dump_space(back, form) != text or back != sp:
                failures.append(f"{kind} ({form})")
    for t in range(50):
        sp = fx.random_metric(rng, int(rng.integers(1, 16)))
        text = dump_space(sp)
        back = parse_space(text)
        if dump_space(back) != text or back != sp:
            failures.append(f"random space {t}")
    detail = f"{len(GENERATORS)} kinds in both forms and 50 random spaces re-emit byte-identically"
    return _result(11, "serialization round trip", failures, detail, time.perf_counter() - t0)


CRITERIA = (crit_1, crit_2, crit_3, crit_4, crit_5, crit_6, crit_7, crit_8, crit_9, crit_10, crit_11)


def run_all(only=None):
    out = []
    for i, fn in enumerate(CRITERIA, start=1):
        if only and i not in only:
            continue
        try:
            out.append(fn())
        except Exception as exc:  # report, do not hide
            out.append(CriterionResult(i, fn.__name__, False, f"raised {type(exc).__name__}: {exc}", 0.0))
    return out

