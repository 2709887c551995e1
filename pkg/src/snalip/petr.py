"""Extraction of a large discrete subset through a hierarchy of separated nets.

Cardinals become set sizes. The working set at step n holds the first
q_n points of the next selected net, with q_n = |M_{k_n}| + 1 standing
in for the successor cardinal, except the last working set which is the
whole finest selected net. Case (b) fires when one ball intersection
holds at least a tau fraction of the working set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import HierarchyError, InputError, InternalConsistencyError
from .metric import FiniteMetricSpace, maximal_separated_indices
from .rational import format_rational

_CLAMP = 2**62


def _closed_limit(r: Fraction, den: int) -> int:
    """t with  nums <= t  <=>  nums/den <= r."""
    return min(r.numerator * den // r.denominator, _CLAMP)


def _open_limit(r: Fraction, den: int) -> int:
    """t with  nums < t  <=>  nums/den < r."""
    return min(-((-r.numerator * den) // r.denominator), _CLAMP)


def _pow2(e: int) -> Fraction:
    return Fraction(1, 2**e)


@dataclass(frozen=True)
class PetrStep:
    level: int  # the L_n being built (1-based n)
    case: str  # "a" or "b"
    a_sizes: dict  # (j, centre label) -> |A_{j,centre}|, nonzero entries only
    j0: int | None
    alpha0: str | None
    L: tuple
    N: tuple


@dataclass(frozen=True)
class PetrState:
    space: FiniteMetricSpace = field(repr=False)
    tau: Fraction
    nets: dict  # k -> tuple of labels
    selected: tuple  # k_1 < k_2 < ...
    working: tuple  # M~_n, n = 1..s-1
    L: tuple  # L_n
    N: tuple  # N_n
    steps: tuple
    result: tuple

    @property
    def single_level(self) -> bool:
        return len(self.selected) == 1

    def level_bound(self, j: int) -> Fraction:
        """Contract bound 2^-(k_{j+1}+2) for level j (1-based)."""
        return _pow2(self.selected[j] + 2)

    def level_separation(self, j: int) -> Fraction:
        """L_j sits inside M_{k_{j+1}}, which is 2^-k_{j+1} separated."""
        if self.single_level:
            return _pow2(self.selected[0])
        return _pow2(self.selected[j])

    def finest_bound(self) -> Fraction:
        if self.single_level:
            return _pow2(self.selected[0])
        return min(self.level_bound(j) for j in range(1, len(self.L) + 1))

    def to_json(self) -> dict:
        return {
            "tau": format_rational(self.tau),
            "nets": {str(k): {"size": len(v)} for k, v in self.nets.items()},
            "selected_levels": list(self.selected),
            "working_sizes": [len(w) for w in self.working],
            "steps": [
                {
                    "level": s.level,
                    "case": s.case,
                    "j0": s.j0,
                    "alpha0": s.alpha0,
                    "largest_A": max(s.a_sizes.values(), default=0),
                    "L_size": len(s.L),
                    "N": list(s.N),
                }
                for s in self.steps
            ],
            "L_sizes": [len(x) for x in self.L],
            "N": [list(x) for x in self.N],
            "result_size": len(self.result),
            "result": list(self.result),
            "finest_bound": format_rational(self.finest_bound()),
        }


def nets(space: FiniteMetricSpace, levels: int) -> dict:
    """Greedy maximal 2^-k separated subsets (as index lists), k = 1..levels."""
    return {k: maximal_separated_indices(space, _pow2(k)) for k in range(1, levels + 1)}


def select_levels(sizes: dict, subsequence=None) -> list[int]:
    ks = sorted(sizes)
    if subsequence is None:
        sel = [ks[0]]
        for k in ks[1:]:
            if sizes[k] > sizes[sel[-1]]:
                sel.append(k)
        return sel
    sel = [int(k) for k in subsequence]
    for a, b in zip(sel, sel[1:]):
        if not (a < b and sizes[a] < sizes[b]):
            raise HierarchyError(f"net sizes do not increase from level {a} to level {b}")
    return sel


def petr_extract(space: FiniteMetricSpace, levels: int, tau=Fraction(1, 2), subsequence=None):
    """Return (L, state) with the cross-level separation contract verified exactly."""
    tau = Fraction(tau)
    if levels < 1:
        raise InputError("levels must be at least 1")
    if not 0 < tau <= 1:
        raise InputError("tau must lie in (0, 1]")
    pts = space.points
    net_idx = nets(space, levels)
    labels = {k: tuple(pts[i] for i in v) for k, v in net_idx.items()}
    if subsequence is not None and any(k not in net_idx for k in subsequence):
        raise InputError("subsequence levels must lie in 1..levels")

    if len(net_idx[1]) == len(space):
        first = labels[1]
        state = PetrState(space, tau, labels, (1,), (first,), (first,), ((),), (), first)
        return list(first), state

    sizes = {k: len(v) for k, v in net_idx.items()}
    kk = select_levels(sizes, subsequence)
    if len(kk) < 2:
        raise HierarchyError("net sizes never increase, so no level subsequence exists")
    s = len(kk)

    W = []
    for n in range(1, s):
        net = net_idx[kk[n]]
        if n < s - 1:
            q = min(len(net), len(net_idx[kk[n - 1]]) + 1)
            W.append(list(net[:q]))
        else:
            W.append(list(net))

    nums, den = space.nums, space.den
    L = [list(W[0])]
    N = [[]]
    steps = []
    for n in range(1, s - 1):
        target = np.array(W[n])
        masks = {}
        a_sizes = {}
        big = []
        for j in range(1, n + 1):
            centres = W[j - 1]
            lim = _closed_limit(_pow2(kk[j] + 1), den)
            block = np.asarray(nums[np.ix_(centres, target)] <= lim, dtype=bool)
            masks[j] = block
            counts = block.sum(axis=1)
            for a, c in enumerate(counts.tolist()):
                if c:
                    a_sizes[(j, pts[centres[a]])] = c
                if c * tau.denominator >= tau.numerator * len(target):
                    big.append((j, a))
        if not big:
            removed = np.zeros(len(target), dtype=bool)
            for j in masks:
                removed |= masks[j].any(axis=0)
            new_L = [int(t) for t in target[~removed]]
            new_N = []
            j0 = alpha0 = None
            case = "a"
        else:
            j0 = max(j for j, _ in big)
            a0 = min(a for j, a in big if j == j0)
            keep = masks[j0][a0].copy()
            for j in range(j0 + 1, n + 1):
                keep &= ~masks[j].any(axis=0)
            new_L = [int(t) for t in target[keep]]
            new_N = []
            for i in range(1, j0 + 1):
                lim = _open_limit(_pow2(kk[i] + 2), den)
                close = []
                if new_L:
                    near = np.asarray(nums[np.ix_(L[i - 1], new_L)] < lim, dtype=bool).any(axis=1)
                    close = [L[i - 1][t] for t in np.nonzero(near)[0]]
                if len(close) > 1:
                    raise InternalConsistencyError(
                        f"{len(close)} points of L_{i} lie near L_{n + 1}; at most one is possible"
                    )
                new_N.extend(close)
            alpha0 = pts[W[j0 - 1][a0]]
            case = "b"
        L.append(new_L)
        N.append(new_N)
        steps.append(
            PetrStep(
                n + 1, case, a_sizes, j0, alpha0,
                tuple(pts[i] for i in new_L), tuple(pts[i] for i in new_N),
            )
        )

    _verify_contract(space, kk, L, N)
    excluded = {i for part in N for i in part}
    members = sorted({i for part in L for i in part} - excluded)
    result = tuple(pts[i] for i in members)
    state = PetrState(
        space,
        tau,
        labels,
        tuple(kk),
        tuple(tuple(pts[i] for i in w) for w in W),
        tuple(tuple(pts[i] for i in x) for x in L),
        tuple(tuple(pts[i] for i in x) for x in N),
        tuple(steps),
        result,
    )
    return list(result), state


def _verify_contract(space, kk, L, N):
    """d(L_n, L_j minus N_n) >= 2^-(k_{j+1}+2) for every j < n."""
    nums, den = space.nums, space.den
    for n in range(2, len(L) + 1):
        Ln = L[n - 1]
        if not Ln:
            continue
        excl = set(N[n - 1])
        for j in range(1, n):
            rest = [x for x in L[j - 1] if x not in excl]
            if not rest:
                continue
            lim = _open_limit(_pow2(kk[j] + 2), den)
            if np.any(np.asarray(nums[np.ix_(Ln, rest)] < lim, dtype=bool)):
                raise InternalConsistencyError(f"separation contract fails between L_{n} and L_{j}")


@dataclass(frozen=True)
class DiscretenessReport:
    ok: bool
    bound: Fraction
    violation: tuple | None = None  # (p, q, distance, required)

    def __bool__(self):
        return self.ok


def discreteness_check(L, state: PetrState) -> DiscretenessReport:
    """Every pair of L respects the level-wise separation implied by the contract.

    Points of one level are at least 2^-k_{j+1} apart; points first seen at
    levels j < n are at least 2^-(k_{j+1}+2) apart. A point belonging to
    no L_n is held to the coarsest level's requirement.
    """
    space = state.space
    L = list(L)
    idx = [space.index(p) for p in L]
    level = {}
    for j, part in enumerate(state.L, start=1):
        for p in part:
            level.setdefault(p, j)
    lv = np.array([level.get(p, 1) for p in L], dtype=np.int64)
    m = len(L)
    if m < 2:
        return DiscretenessReport(True, state.finest_bound())
    same = {j: _open_limit(state.level_separation(j), space.den) for j in set(lv.tolist())}
    cross = {}
    if not state.single_level:
        cross = {j: _open_limit(state.level_bound(j), space.den) for j in set(lv.tolist())}
    sub = space.nums[np.ix_(idx, idx)]
    for a in range(m - 1):
        others = np.arange(a + 1, m)
        lo = np.minimum(lv[a], lv[others])
        eq = lv[others] == lv[a]
        req = np.array(
            [same[int(l)] if e else cross[int(l)] for l, e in zip(lo.tolist(), eq.tolist())],
            dtype=object,
        )
        bad = np.nonzero(np.asarray(sub[a, a + 1 :] < req, dtype=bool))[0]
        if bad.size:
            b = a + 1 + int(bad[0])
            l, e = int(min(lv[a], lv[b])), bool(lv[a] == lv[b])
            need = state.level_separation(l) if e else state.level_bound(l)
            return DiscretenessReport(
                False, state.finest_bound(), (L[a], L[b], space.dist(L[a], L[b]), need)
            )
    return DiscretenessReport(True, state.finest_bound())
