"""Exact check that a family spans an isometric copy of the c0 unit-vector basis.

For functions f_1..f_k the bound ||sum lam_i f_i|| <= max |lam_i| for all
real lam is equivalent to

    sum_i |f_i(p) - f_i(q)| <= d(p, q)      for every pair (p, q),

since the supremum of |sum lam_i c_i| over the unit cube is sum |c_i|.
Together with unit norms this gives ||sum lam_i f_i|| = max |lam_i|.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import InputError, InternalConsistencyError, NotNormalizedError
from .lipschitz import FunctionFamily, combine, lip_norm, sna_witnesses
from .rational import INT64_LIMIT, parse_rational, rescale, to_float_shared, widen

_CHUNK = 1 << 16


@dataclass(frozen=True)
class Certificate:
    family: FunctionFamily = field(repr=False)
    attainment: tuple  # one (p, q) per member
    checked_pairs: int
    constancy: dict  # (i, j) -> common value of f_i on member j's pair
    scope: str | None = None

    verdict = "certified"

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Violation:
    family: FunctionFamily = field(repr=False)
    pair: tuple
    sign_vector: tuple
    excess: Fraction

    verdict = "violated"

    def __bool__(self):
        return False

    @property
    def distance(self) -> Fraction:
        return self.family.space.dist(*self.pair)

    @property
    def quotient(self) -> Fraction:
        d = self.distance
        return (d + self.excess) / d

    def recompute(self) -> Fraction:
        """Quotient of combine(family, sign_vector) across the pair, from scratch."""
        g = combine(self.family, self.sign_vector)
        return g.quotient(*self.pair)


@dataclass(frozen=True)
class ConstancyTable:
    entries: dict  # (i, j) -> value of f_i on the pairs of member j
    pairs: dict  # j -> tuple of pairs that were checked

    def __bool__(self):
        return True


@dataclass(frozen=True)
class ConstancyCounterexample:
    i: int
    j: int
    pair: tuple
    values: tuple

    def __bool__(self):
        return False


# ---------------------------------------------------------------- scan


def _scaled_operands(family: FunctionFamily):
    F, fden = family.value_matrix()
    space = family.space
    L = math.lcm(fden, space.den)
    FL = rescale(F, L // fden)
    DL = rescale(space.nums, L // space.den)
    k = F.shape[1]
    if FL.dtype == np.int64 and FL.size:
        if int(np.abs(FL).max()) * 2 * (k + 1) >= INT64_LIMIT:
            FL = widen(FL)
    if FL.dtype == object or DL.dtype == object:
        FL, DL = widen(FL), widen(DL)
    return FL, DL, L


def _exact_sums(FL, P, Q):
    return np.abs(FL[P] - FL[Q]).sum(axis=1)


def first_violation(family: FunctionFamily):
    """Lexicographically first pair (i, j) breaking the pairwise bound, with its excess."""
    FL, DL, L = _scaled_operands(family)
    n = FL.shape[0]
    if n < 2:
        return None
    imgs = to_float_shared(FL, DL)
    if imgs is None:
        P, Q = np.triu_indices(n, 1)
        cand = np.column_stack([P, Q])
    else:
        fF, fD = imgs
        tol = kernels.l1_tolerance(FL.shape[1])
        colabs = np.abs(fF).sum(axis=1)
        status = kernels.pair_l1_status(fF, colabs, fD, tol)
        cand = np.argwhere(status > 0)
    for start in range(0, len(cand), _CHUNK):
        chunk = cand[start : start + _CHUNK]
        P, Q = chunk[:, 0], chunk[:, 1]
        S = _exact_sums(FL, P, Q)
        D = DL[P, Q]
        bad = np.nonzero(np.asarray(S > D, dtype=bool))[0]
        if bad.size:
            t = int(bad[0])
            i, j = int(P[t]), int(Q[t])
            return i, j, Fraction(int(S[t]) - int(D[t]), L)
    return None


def _sign(x):
    return (x > 0) - (x < 0)


def _norm_or_raise(f):
    norm = lip_norm(f)
    if norm != 1:
        raise NotNormalizedError(f.name, norm)
    return norm


def _scope(space):
    prov = space.provenance
    if isinstance(prov, dict) and "kind" in prov and "truncate" in prov:
        return f"certified on truncation N={prov['truncate']} of {prov['kind']}"
    return None


def certify_c0(family: FunctionFamily) -> Certificate | Violation:
    """Certificate if the pairwise l1 bound holds everywhere, else the first Violation.

    Every member must have norm exactly 1; otherwise NotNormalizedError.
    """
    space = family.space
    n = len(space)
    hit = first_violation(family)
    if hit is not None:
        for f in family.members:
            _norm_or_raise(f)
        i, j, excess = hit
        sigma = tuple(_sign(int(f.nums[i]) - int(f.nums[j])) for f in family.members)
        return Violation(family, (space.points[i], space.points[j]), sigma, excess)

    # the bound caps every norm at 1; now show each reaches 1
    attainment = []
    for f, w in zip(family.members, family.witnesses):
        if w is not None and f.quotient(*w) == 1:
            attainment.append(w)
            continue
        _norm_or_raise(f)
        if w is not None:
            raise InputError(f"declared witness {w} of {f.name!r} is not an attainment pair")
        first = sna_witnesses(f)[0]
        attainment.append((first.p, first.q))
    table = {}
    for j, (x, y) in enumerate(attainment):
        for i, f in enumerate(family.members):
            if i == j:
                continue
            a, b = f.value(x), f.value(y)
            if a != b:
                raise InternalConsistencyError(
                    f"{f.name} differs on the attainment pair ({x}, {y}) of a certified family"
                )
            table[i, j] = a
    return Certificate(family, tuple(attainment), n * (n - 1) // 2, table, _scope(space))


def constancy_check(family: FunctionFamily, all_pairs: bool = False):
    """Each member must be constant on every other member's attainment pair.

    Uses the declared witness pairs, or every attainment pair when
    ``all_pairs`` is set. Returns a ConstancyTable or the first
    ConstancyCounterexample found in (j, pair, i) order.
    """
    pairs = {}
    for j, (f, w) in enumerate(zip(family.members, family.witnesses)):
        if w is None:
            raise InputError(f"member {f.name!r} has no declared attainment pair")
        norm = lip_norm(f)
        if f.quotient(*w) != norm:
            raise InputError(f"declared pair {w} does not attain the norm of {f.name!r}")
        if all_pairs:
            pairs[j] = tuple((wp.p, wp.q) for wp in sna_witnesses(f))
        else:
            pairs[j] = (w,)
    entries = {}
    for j in range(len(family)):
        for pair in pairs[j]:
            x, y = pair
            for i, f in enumerate(family.members):
                if i == j:
                    continue
                a, b = f.value(x), f.value(y)
                if a != b:
                    return ConstancyCounterexample(i, j, pair, (a, b))
                entries.setdefault((i, j), a)
    return ConstancyTable(entries, pairs)


def summability_holds(family: FunctionFamily) -> bool:
    """sum_i |f_i(p)| <= d(p, base) at every point."""
    space = family.space
    b = space.base
    for p in space.points:
        if sum(abs(f.value(p)) for f in family.members) > space.dist(p, b):
            return False
    return True


# ---------------------------------------------------------------- oracle


def sign_grid(k: int, with_zero: bool = False):
    digits = (-1, 0, 1) if with_zero else (-1, 1)
    return [v for v in itertools.product(digits, repeat=k) if any(v)]


def grid_oracle(family: FunctionFamily, grid) -> Fraction:
    """Brute-force max over the grid of ||sum lam_i f_i|| / max |lam_i|.

    Evaluates every combination pointwise in Fractions and scans all
    pairs directly, sharing no code with the certificate scan.
    """
    grid = [tuple(parse_rational(x) for x in lam) for lam in grid]
    if not grid:
        raise InputError("grid must be nonempty")
    space = family.space
    pts = space.points
    k = len(family)
    vals = [[f.value_at(i) for i in range(len(pts))] for f in family.members]
    dist = space.matrix()
    best = None
    for lam in grid:
        if len(lam) != k:
            raise InputError(f"grid vector {lam} has the wrong length")
        top = max(abs(x) for x in lam)
        if top == 0:
            raise InputError("grid vectors must be nonzero")
        g = [sum(lam[m] * vals[m][i] for m in range(k)) for i in range(len(pts))]
        norm = max(
            abs(g[i] - g[j]) / dist[i][j] for i in range(len(pts)) for j in range(i + 1, len(pts))
        )
        r = norm / top
        if best is None or r > best:
            best = r
    return best
