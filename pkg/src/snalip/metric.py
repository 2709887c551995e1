"""Finite pointed metric spaces with exact rational distances."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .errors import InputError, InternalConsistencyError, PreconditionError
from .rational import INT64_LIMIT, narrow, parse_rational, rescale, scale_fractions, to_float


class FiniteMetricSpace:
    """Point labels, a base point and a distance matrix over one denominator.

    ``nums[i, j] / den`` is the distance between ``points[i]`` and
    ``points[j]``. The matrix is read-only; spaces are never mutated.
    """

    __slots__ = ("points", "base", "nums", "den", "provenance", "_index", "_float")

    def __init__(self, points, base, nums, den, provenance=None):
        points = tuple(str(p) for p in points)
        if len(set(points)) != len(points):
            raise InputError("point labels must be distinct")
        if not points:
            raise InputError("a metric space needs at least one point")
        nums = np.asarray(nums)
        if nums.ndim != 2 or nums.shape[0] != nums.shape[1]:
            raise InputError(f"distance matrix must be square, got shape {nums.shape}")
        if nums.shape[0] != len(points):
            raise InputError(
                f"distance matrix is {nums.shape[0]}x{nums.shape[0]} but there are {len(points)} points"
            )
        if nums.dtype not in (np.int64, object):
            nums = narrow(nums.astype(object))
        if den <= 0:
            raise InputError("denominator must be positive")
        if nums.size and min(nums.ravel()) < 0:
            raise InputError("negative distance entry")
        if str(base) not in points:
            raise InputError(f"base {base!r} is not a point of the space")
        nums = nums.copy()
        nums.setflags(write=False)
        self.points = points
        self.base = str(base)
        self.nums = nums
        self.den = int(den)
        self.provenance = provenance
        self._index = {p: i for i, p in enumerate(points)}
        self._float = None

    # -- construction -------------------------------------------------

    @classmethod
    def from_matrix(cls, points, base, matrix, provenance=None):
        """Build from a nested sequence of rationals (Fractions, ints or "p/q")."""
        rows = [[parse_rational(v) for v in row] for row in matrix]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise InputError("distance matrix must be square")
        nums, den = scale_fractions([v for r in rows for v in r], shape=(n, n))
        return cls(points, base, nums, den, provenance)

    @classmethod
    def from_function(cls, points, base, dist: Callable[[int, int], Fraction], provenance=None):
        """Build a symmetric space from ``dist(i, j)`` evaluated for i < j."""
        n = len(points)
        vals = {}
        den = 1
        for i in range(n):
            for j in range(i + 1, n):
                v = Fraction(dist(i, j))
                vals[i, j] = v
                den = math.lcm(den, v.denominator)
        nums = np.zeros((n, n), dtype=object)
        for (i, j), v in vals.items():
            nums[i, j] = nums[j, i] = v.numerator * (den // v.denominator)
        return cls(points, base, narrow(nums), den, provenance)

    # -- access ---------------------------------------------------------

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p):
        return p in self._index

    def __repr__(self):
        return f"FiniteMetricSpace({len(self)} points, base={self.base!r})"

    def __eq__(self, other):
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        if self.points != other.points or self.base != other.base:
            return False
        return bool(
            np.all(_as_object(self.nums) * other.den == _as_object(other.nums) * self.den)
        )

    __hash__ = None

    def index(self, p) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise InputError(f"unknown point {p!r}") from None

    @property
    def base_index(self) -> int:
        return self._index[self.base]

    def dist(self, p, q) -> Fraction:
        return Fraction(int(self.nums[self.index(p), self.index(q)]), self.den)

    def dist_at(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.nums[i, j]), self.den)

    def matrix(self) -> list[list[Fraction]]:
        return [[Fraction(int(v), self.den) for v in row] for row in self.nums]

    def float_matrix(self):
        """Float image of the numerators (scaled by an unspecified constant)."""
        if self._float is None:
            self._float = (to_float(self.nums),)
        return self._float[0]

    def diameter(self) -> Fraction:
        if len(self) < 2:
            return Fraction(0)
        return Fraction(int(self.nums.max()), self.den)

    def diameter_pair(self):
        i, j = np.unravel_index(int(np.argmax(self.nums)), self.nums.shape)
        i, j = sorted((int(i), int(j)))
        return self.points[i], self.points[j]


def _as_object(a):
    return a.astype(object) if a.dtype != object else a


# ------------------------------------------------------------------ reports


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str  # "identity", "positivity", "symmetry" or "triangle"
    witness: tuple

    def __str__(self):
        return f"{self.axiom} violated at {self.witness}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class SeparationReport:
    point: str
    radius: Fraction
    attained: bool
    witnesses: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.attained != bool(self.witnesses):
            raise InternalConsistencyError("attained flag must match presence of witnesses")


# ------------------------------------------------------------------ validation


def validate_metric(space: FiniteMetricSpace) -> ValidationReport:
    """Check the metric axioms exactly, listing every violation with its witness.

    Triangle violations are reported as ``(p, q, r)`` meaning
    d(p, r) > d(p, q) + d(q, r).
    """
    nums = space.nums
    n = len(space)
    pts = space.points
    out = []
    for i in np.nonzero(np.array([nums[i, i] != 0 for i in range(n)]))[0]:
        out.append(AxiomViolation("identity", (pts[i],)))
    off = ~np.eye(n, dtype=bool)
    zero = np.asarray(nums == 0, dtype=bool) & off
    # a zero in either direction counts once, under the ordered pair
    for i, j in np.argwhere(np.triu(zero | zero.T, 1)):
        out.append(AxiomViolation("positivity", (pts[i], pts[j])))
    asym = np.argwhere(nums != nums.T)
    symmetric = True
    for i, j in asym:
        symmetric = False
        if i < j:
            out.append(AxiomViolation("symmetry", (pts[i], pts[j])))
    for p, q, r in _triangle_violations(nums, full=not symmetric, fimage=space.float_matrix()):
        out.append(AxiomViolation("triangle", (pts[p], pts[q], pts[r])))
    return ValidationReport(tuple(out))


def _triangle_violations(nums, full, fimage=None):
    if fimage is None:
        return _triangle_exact(nums, full)
    flags = kernels.triangle_flags(fimage, full=full)
    if not len(flags):
        return []
    P, Q, R = flags[:, 0], flags[:, 1], flags[:, 2]
    bad = nums[P, R] > nums[P, Q] + nums[Q, R]
    keep = np.asarray(bad, dtype=bool)
    return [tuple(int(v) for v in row) for row in flags[keep, :3]]


def _triangle_exact(nums, full):
    n = nums.shape[0]
    out = []
    for p in range(n):
        S = nums[p, :, None] + nums
        bad = np.asarray(nums[p][None, :] > S, dtype=bool)
        bad[p, :] = False
        np.fill_diagonal(bad, False)
        if full:
            bad[:, p] = False
        else:
            bad[:, : p + 1] = False
        for q, r in zip(*np.nonzero(bad)):
            out.append((p, int(q), int(r)))
    return out


# ------------------------------------------------------------------ radii


def separation_radius(space, p) -> SeparationReport:
    """Separation radius R(p): infimum of distances from p to other points.

    Generators answer with their analytic full-space value; finite spaces
    return the exact minimum and every point achieving it.
    """
    if not isinstance(space, FiniteMetricSpace):
        return space.radius_profile(p)
    i = space.index(p)
    if len(space) < 2:
        raise InputError("separation radius is undefined on a one-point space")
    row = np.delete(space.nums[i], i)
    others = [q for k, q in enumerate(space.points) if k != i]
    m = row.min()
    wit = tuple(q for q, v in zip(others, row) if v == m)
    return SeparationReport(p, Fraction(int(m), space.den), True, wit)


def is_uniformly_discrete(space) -> tuple[bool, Fraction]:
    """Whether inf R(x) > 0, together with that infimum."""
    if not isinstance(space, FiniteMetricSpace):
        return space.uniform_discreteness
    n = len(space)
    if n < 2:
        raise InputError("uniform discreteness needs at least two points")
    off = space.nums[~np.eye(n, dtype=bool)]
    m = Fraction(int(off.min()), space.den)
    return m > 0, m


def maximal_separated_subset(space: FiniteMetricSpace, r) -> list[str]:
    """Greedy r-separated subset in point order; every point ends up within < r of it."""
    r = Fraction(r)
    if r <= 0:
        raise InputError("separation must be positive")
    idx = maximal_separated_indices(space, r)
    return [space.points[i] for i in idx]


def maximal_separated_indices(space: FiniteMetricSpace, r, candidates=None) -> list[int]:
    r = Fraction(r)
    # nums / den >= r  <=>  nums >= ceil(r * den)
    threshold = -((-r.numerator * space.den) // r.denominator)
    nums = space.nums
    if nums.dtype == np.int64:
        threshold = min(threshold, INT64_LIMIT * 2)
    order = range(len(space)) if candidates is None else candidates
    covered = np.zeros(len(space), dtype=bool)
    kept = []
    for i in order:
        if covered[i]:
            continue
        kept.append(i)
        covered |= np.asarray(nums[i] < threshold, dtype=bool)
    return kept


# ------------------------------------------------------------------ constructions


def disjoint_sum(parts: Sequence[FiniteMetricSpace], gap) -> FiniteMetricSpace:
    """Glue spaces together with every cross-part distance equal to ``gap``.

    Requires gap >= diameter/2 for each part, which is enough for the
    triangle inequality across parts. Labels become ``m<i>.<label>``.
    """
    gap = Fraction(gap)
    parts = list(parts)
    if not parts:
        raise InputError("disjoint_sum needs at least one part")
    if gap <= 0:
        raise PreconditionError("gap must be positive")
    for i, part in enumerate(parts, start=1):
        if 2 * gap < part.diameter():
            raise PreconditionError(
                f"gap {gap} is below half the diameter {part.diameter()} of part {i}"
            )
    if len(parts) == 1:
        return parts[0]
    den = gap.denominator
    for part in parts:
        den = math.lcm(den, part.den)
    gap_num = gap.numerator * (den // gap.denominator)
    n = sum(len(p) for p in parts)
    blocks = [rescale(p.nums, den // p.den) for p in parts]
    big = gap_num >= INT64_LIMIT or any(b.dtype == object for b in blocks)
    nums = np.full((n, n), gap_num, dtype=object if big else np.int64)
    labels = []
    start = 0
    for i, (part, block) in enumerate(zip(parts, blocks), start=1):
        m = len(part)
        nums[start : start + m, start : start + m] = block
        labels.extend(f"m{i}.{p}" for p in part.points)
        start += m
    base = f"m1.{parts[0].base}"
    prov = {"construction": "disjoint_sum", "gap": f"{gap.numerator}/{gap.denominator}", "parts": len(parts)}
    return FiniteMetricSpace(labels, base, nums, den, provenance=prov)


def subspace(space: FiniteMetricSpace, points: Iterable[str], base=None) -> FiniteMetricSpace:
    """Restriction to ``points`` (kept in the parent's order)."""
    wanted = set(points)
    idx = [i for i, p in enumerate(space.points) if p in wanted]
    if len(idx) != len(wanted):
        missing = wanted - set(space.points)
        raise InputError(f"unknown points {sorted(missing)}")
    labels = [space.points[i] for i in idx]
    if base is None:
        base = space.base if space.base in wanted else labels[0]
    nums = space.nums[np.ix_(idx, idx)]
    return FiniteMetricSpace(labels, base, nums, space.den)
