"""Lipschitz functions vanishing at the base point, and families of them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .errors import ContractError, InputError, UndefinedNormError
from .metric import FiniteMetricSpace
from .rational import (
    INT64_LIMIT,
    narrow,
    parse_rational,
    reduce_scaled,
    rescale,
    scale_fractions,
    to_float,
    widen,
)


class LipschitzFunction:
    """Exact values on every point of a finite space, zero at the base.

    Values are ``nums[i] / den`` in the space's point order.
    """

    __slots__ = ("space", "nums", "den", "name", "_extremal")

    def __init__(self, space: FiniteMetricSpace, nums, den: int, name=None):
        nums = np.asarray(nums)
        if nums.shape != (len(space),):
            raise InputError(f"expected {len(space)} values, got shape {nums.shape}")
        if nums.dtype not in (np.int64, object):
            nums = narrow(nums.astype(object))
        if den <= 0:
            raise InputError("denominator must be positive")
        nums, den = reduce_scaled(nums, int(den))
        if nums[space.base_index] != 0:
            raise InputError(
                f"value at base {space.base!r} must be 0, got {Fraction(int(nums[space.base_index]), den)}"
            )
        nums = nums.copy()
        nums.setflags(write=False)
        self.space = space
        self.nums = nums
        self.den = den
        self.name = name
        self._extremal = None

    @classmethod
    def from_values(cls, space, values, name=None, normalize=False):
        """From a point->rational mapping (unlisted points are 0) or a full sequence.

        With ``normalize`` the base value is subtracted first, which is the
        isometry g -> g - g(base) of the Lipschitz seminorm.
        """
        if isinstance(values, Mapping):
            vals = [Fraction(0)] * len(space)
            for p, v in values.items():
                vals[space.index(p)] = parse_rational(v)
        else:
            vals = [parse_rational(v) for v in values]
            if len(vals) != len(space):
                raise InputError(f"expected {len(space)} values, got {len(vals)}")
        if normalize:
            b = vals[space.base_index]
            vals = [v - b for v in vals]
        nums, den = scale_fractions(vals)
        return cls(space, nums, den, name)

    @classmethod
    def zero(cls, space, name=None):
        return cls(space, np.zeros(len(space), dtype=np.int64), 1, name)

    def __len__(self):
        return len(self.nums)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"LipschitzFunction{label}({len(self)} points)"

    def __eq__(self, other):
        if not isinstance(other, LipschitzFunction):
            return NotImplemented
        return (
            self.space == other.space
            and self.den == other.den
            and bool(np.all(self.nums == other.nums))
        )

    __hash__ = None

    def value(self, p) -> Fraction:
        return Fraction(int(self.nums[self.space.index(p)]), self.den)

    __getitem__ = value

    def value_at(self, i: int) -> Fraction:
        return Fraction(int(self.nums[i]), self.den)

    def values(self) -> dict:
        return {p: self.value_at(i) for i, p in enumerate(self.space.points)}

    def renamed(self, name):
        out = LipschitzFunction(self.space, self.nums, self.den, name)
        out._extremal = self._extremal
        return out

    def scaled(self, c) -> "LipschitzFunction":
        c = Fraction(c)
        nums = narrow(widen(self.nums) * c.numerator)
        return LipschitzFunction(self.space, nums, self.den * c.denominator, self.name)

    def quotient(self, p, q) -> Fraction:
        """|f(p) - f(q)| / d(p, q) for distinct points."""
        if p == q:
            raise InputError("quotient needs two distinct points")
        return abs(self.value(p) - self.value(q)) / self.space.dist(p, q)


@dataclass(frozen=True)
class WitnessPair:
    p: str
    q: str
    ratio: Fraction

    def __iter__(self):
        return iter((self.p, self.q))

    def check(self, f: LipschitzFunction) -> bool:
        return self.p != self.q and f.quotient(self.p, self.q) == self.ratio


# ---------------------------------------------------------------- norm


def _extremal_pairs(f: LipschitzFunction):
    """(norm, [(i, j), ...]) with every maximizing pair, i < j, in order."""
    if f._extremal is not None:
        return f._extremal
    space = f.space
    n = len(space)
    if n < 2:
        raise UndefinedNormError("the Lipschitz norm needs at least two points")
    F = f.nums
    if not np.any(F != F[0]):
        iu, ju = np.triu_indices(n, 1)
        f._extremal = (Fraction(0), list(zip(iu.tolist(), ju.tolist())))
        return f._extremal
    fD = space.float_matrix()
    fF = to_float(F)
    if fD is None or fF is None:
        iu, ju = np.triu_indices(n, 1)
    else:
        cand = kernels.quotient_candidates(fF, fD)
        iu, ju = cand[:, 0], cand[:, 1]
    diff = np.abs(F[iu] - F[ju])
    dist = space.nums[iu, ju]
    best_n, best_d = 0, 1
    hits = []
    for i, j, a, b in zip(iu.tolist(), ju.tolist(), diff.tolist(), dist.tolist()):
        lhs, rhs = a * best_d, best_n * b
        if lhs > rhs:
            best_n, best_d = a, b
            hits = [(i, j)]
        elif lhs == rhs:
            hits.append((i, j))
    norm = Fraction(best_n * space.den, best_d * f.den)
    f._extremal = (norm, hits)
    return f._extremal


def lip_norm(f: LipschitzFunction) -> Fraction:
    """Exact maximum of |f(p) - f(q)| / d(p, q) over distinct pairs."""
    return _extremal_pairs(f)[0]


def sna_witnesses(f: LipschitzFunction) -> list[WitnessPair]:
    """Every pair where f attains its norm, in canonical pair order."""
    norm, hits = _extremal_pairs(f)
    pts = f.space.points
    return [WitnessPair(pts[i], pts[j], norm) for i, j in hits]


# ---------------------------------------------------------------- families


class FunctionFamily:
    """An ordered list of functions on one space, optionally with declared witnesses."""

    __slots__ = ("space", "members", "witnesses", "provenance", "_matrix")

    def __init__(self, members: Sequence[LipschitzFunction], witnesses=None, provenance=None):
        members = list(members)
        if not members:
            raise InputError("a family needs at least one member")
        space = members[0].space
        for f in members[1:]:
            if f.space is not space and f.space != space:
                raise InputError("all members must live on the same space")
        named = []
        for i, f in enumerate(members):
            named.append(f if f.name else f.renamed(f"f{i + 1}"))
        names = [f.name for f in named]
        if len(set(names)) != len(names):
            raise InputError("member names must be distinct")
        if witnesses is None:
            witnesses = [None] * len(named)
        witnesses = list(witnesses)
        if len(witnesses) != len(named):
            raise InputError("one witness entry per member expected")
        clean = []
        for w in witnesses:
            if w is None:
                clean.append(None)
                continue
            p, q = (str(x) for x in w)
            space.index(p)
            space.index(q)
            if p == q:
                raise InputError(f"witness pair ({p}, {q}) is degenerate")
            clean.append((p, q))
        self.space = space
        self.members = tuple(named)
        self.witnesses = tuple(clean)
        self.provenance = provenance
        self._matrix = None

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    @property
    def names(self):
        return [f.name for f in self.members]

    def index(self, name) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InputError(f"unknown member {name!r}") from None

    def value_matrix(self):
        """(N x k numerators, common denominator)."""
        if self._matrix is None:
            den = 1
            for f in self.members:
                den = math.lcm(den, f.den)
            cols = [rescale(f.nums, den // f.den) for f in self.members]
            if any(c.dtype == object for c in cols):
                cols = [widen(c) for c in cols]
            M = np.column_stack(cols)
            if M.dtype != object:
                M = M.astype(np.int64)
            M.setflags(write=False)
            self._matrix = (M, den)
        return self._matrix

    def with_witnesses(self, witnesses) -> "FunctionFamily":
        return FunctionFamily(self.members, witnesses, self.provenance)


def _coefficients(lam, k):
    lam = [parse_rational(x) for x in lam]
    if len(lam) != k:
        raise InputError(f"expected {k} coefficients, got {len(lam)}")
    return lam


def combine(family: FunctionFamily, lam) -> LipschitzFunction:
    """Pointwise sum of lam_i * f_i."""
    lam = _coefficients(lam, len(family))
    F, fden = family.value_matrix()
    lnums, lden = scale_fractions(lam)
    k = len(lam)
    small = (
        F.dtype == np.int64
        and lnums.dtype == np.int64
        and (int(np.abs(F).max()) if F.size else 0) * (int(np.abs(lnums).max()) or 1) * k
        < INT64_LIMIT
    )
    if small:
        nums = F @ lnums
    else:
        nums = widen(F).dot(widen(lnums))
    return LipschitzFunction(family.space, narrow(np.asarray(nums)), fden * lden)


def triangle_gap(f: LipschitzFunction, pair, C) -> bool:
    """|f(x) - C| + |f(y) - C| >= d(x, y) for a unit-norm f attaining at (x, y).

    Raises ContractError outside that setting; inside it the answer is
    always True, so callers use it as a checked lower bound.
    """
    if isinstance(pair, WitnessPair):
        x, y = pair.p, pair.q
    else:
        x, y = pair
    C = parse_rational(C)
    norm = lip_norm(f)
    if norm != 1:
        raise ContractError(f"triangle_gap needs a unit-norm function, norm is {norm}")
    if x == y or f.quotient(x, y) != norm:
        raise ContractError(f"({x}, {y}) is not an attainment pair")
    return abs(f.value(x) - C) + abs(f.value(y) - C) >= f.space.dist(x, y)
