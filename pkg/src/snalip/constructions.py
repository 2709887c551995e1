"""Families that span isometric c0 copies by construction.

Every builder re-checks its hypotheses exactly and the resulting family
is expected to pass ``certify_c0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InputError, InsufficientSequenceError, PreconditionError
from .generators import ShrinkingSatellites
from .lipschitz import FunctionFamily, LipschitzFunction
from .metric import FiniteMetricSpace, separation_radius
from .rational import format_rational, narrow, widen


class HypothesisError(PreconditionError):
    def __init__(self, message, failures=()):
        self.failures = tuple(failures)
        super().__init__(message)


# ---------------------------------------------------------------- tents


@dataclass(frozen=True)
class TentSpec:
    """Tent centres x_g with witnesses y_g; the radius of tent g is d(x_g, y_g)."""

    pairs: tuple

    def __init__(self, pairs):
        object.__setattr__(self, "pairs", tuple((str(x), str(y)) for x, y in pairs))

    def radii(self, space):
        return [space.dist(x, y) for x, y in self.pairs]

    def failures(self, space) -> list[tuple[int, int]]:
        """Index pairs (a, b) with d(x_a, x_b) < r_a + r_b."""
        r = self.radii(space)
        idx = [space.index(x) for x, _ in self.pairs]
        out = []
        # vectorized over b for each a: numerators share the space denominator
        rn = np.array([int(v * space.den) for v in r], dtype=object)
        X = widen(space.nums)[np.ix_(idx, idx)]
        for a in range(len(idx)):
            bad = np.nonzero(np.asarray(X[a, a + 1 :] < rn[a] + rn[a + 1 :], dtype=bool))[0]
            out.extend((a, a + 1 + int(b)) for b in bad)
        return out

    def check(self, space):
        if not self.pairs:
            raise InputError("a tent spec needs at least one pair")
        xs = [x for x, _ in self.pairs]
        for x, y in self.pairs:
            space.index(x)
            space.index(y)
            if x == y:
                raise PreconditionError(f"degenerate tent pair ({x}, {y})")
        if len(set(xs)) != len(xs):
            raise PreconditionError("tent centres must be distinct")
        bad = self.failures(space)
        if bad:
            shown = ", ".join(f"({self.pairs[a][0]}, {self.pairs[b][0]})" for a, b in bad[:5])
            raise HypothesisError(
                f"d(x_a, x_b) >= r_a + r_b fails for {len(bad)} pair(s): {shown}", bad
            )


def tent(space: FiniteMetricSpace, x, y, name=None) -> LipschitzFunction:
    """max(0, d(x, y) - d(., x)), shifted to vanish at the base."""
    i = space.index(x)
    r = space.nums[i, space.index(y)]
    vals = r - space.nums[i]
    vals = np.where(np.asarray(vals > 0, dtype=bool), vals, 0)
    vals = narrow(np.asarray(vals - vals[space.base_index]))
    return LipschitzFunction(space, vals, space.den, name)


def tent_family(space: FiniteMetricSpace, spec) -> FunctionFamily:
    spec = spec if isinstance(spec, TentSpec) else TentSpec(spec)
    spec.check(space)
    members = [tent(space, x, y, f"t{g + 1}") for g, (x, y) in enumerate(spec.pairs)]
    prov = {"construction": "tent", "pairs": [list(p) for p in spec.pairs]}
    return FunctionFamily(members, spec.pairs, provenance=prov)


def part_extremes(space: FiniteMetricSpace):
    """(first, last) point of each ``m<i>.`` part of a disjoint sum, in part order."""
    groups = {}
    for p in space.points:
        head, sep, _ = p.partition(".")
        if not sep:
            raise InputError(f"point {p!r} carries no part prefix")
        groups.setdefault(head, []).append(p)
    return [(g[0], g[-1]) for g in groups.values() if len(g) >= 2]


# ---------------------------------------------------------------- spikes


@dataclass(frozen=True)
class SpikeSpec:
    pairs: tuple
    radii_a: tuple
    radii_b: tuple
    epsilons: tuple

    @classmethod
    def from_space(cls, space, pairs, radii=None):
        """Radii default to the finite separation radii of ``space``.

        ``radii`` may be an object with ``radius_profile`` (a generator)
        to use full-space values instead.
        """
        pairs = tuple((str(a), str(b)) for a, b in pairs)
        src = space if radii is None else radii
        ra = tuple(separation_radius(src, a).radius for a, _ in pairs)
        rb = tuple(separation_radius(src, b).radius for _, b in pairs)
        eps = tuple(x + y - space.dist(a, b) for x, y, (a, b) in zip(ra, rb, pairs))
        return cls(pairs, ra, rb, eps)

    def violations(self):
        out = []
        for k, e in enumerate(self.epsilons):
            if e <= 0:
                out.append(("eps", k))
        for k in range(len(self.pairs)):
            for j in range(k):
                if not self.radii_a[k] < self.epsilons[j] / 2:
                    out.append(("i", k))
                    break
            if not self.radii_b[k] < self.radii_a[k] / 2:
                out.append(("ii", k))
        return out


def spike_family(space: FiniteMetricSpace, spec: SpikeSpec) -> FunctionFamily:
    """f_k = R(a_k) - eps_k/2 at a_k, -R(b_k) + eps_k/2 at b_k, 0 elsewhere."""
    bad = spec.violations()
    if bad:
        what, k = bad[0]
        names = {"eps": "eps <= 0 (pair not in case B)", "i": "condition (i)", "ii": "condition (ii)"}
        raise PreconditionError(f"{names[what]} fails at spike {k + 1} {spec.pairs[k]}")
    members = []
    for k, (a, b) in enumerate(spec.pairs):
        if space.base in (a, b):
            raise PreconditionError(f"spike {k + 1} uses the base point")
        e = spec.epsilons[k]
        vals = {a: spec.radii_a[k] - e / 2, b: -spec.radii_b[k] + e / 2}
        members.append(LipschitzFunction.from_values(space, vals, f"s{k + 1}"))
    prov = {"construction": "spike", "pairs": [list(p) for p in spec.pairs]}
    return FunctionFamily(members, spec.pairs, provenance=prov)


# ---------------------------------------------------------------- case 1


@dataclass(frozen=True)
class Case1Selection:
    candidates: tuple  # picked a_k labels
    satellites: tuple  # b_k labels
    margins: tuple  # Delta_k = (d(a_k, 0) - R(a_k)) / 4
    radii: tuple
    space: FiniteMetricSpace
    family: FunctionFamily

    @property
    def pairs(self):
        return tuple(zip(self.candidates, self.satellites))

    def chain_failures(self):
        """Check d(a_n,a_m) >= d(a_n,0) - d(a_m,0) >= R(a_n) + 3 D_n >= d(a_n,b_n) + d(a_m,b_m)."""
        sp = self.space
        o = sp.base
        out = []
        k = len(self.candidates)
        for n in range(k):
            for m in range(n + 1, k):
                an, am = self.candidates[n], self.candidates[m]
                bn, bm = self.satellites[n], self.satellites[m]
                steps = [
                    sp.dist(an, am),
                    sp.dist(an, o) - sp.dist(am, o),
                    self.radii[n] + 3 * self.margins[n],
                    sp.dist(an, bn) + sp.dist(am, bm),
                ]
                for s in range(3):
                    if steps[s] < steps[s + 1]:
                        out.append((n, m, s))
        return out


def case1_select(gen: ShrinkingSatellites, count: int, max_scan: int = 10_000) -> Case1Selection:
    """First-fit picks a_k with d(a_k,0) <= (d(a_j,0) - R(a_j))/4 for all earlier picks."""
    if count < 1:
        raise InputError("count must be at least 1")
    if not isinstance(gen, ShrinkingSatellites):
        raise InputError("case1_select needs a shrinking_satellites generator")
    picks, radii, margins = [], [], []
    scanned = 0
    for n in gen.candidates():
        if len(picks) == count or scanned >= max_scan:
            break
        scanned += 1
        a = f"a{n}"
        t, r = gen.position(a), gen.radius_profile(a).radius
        if all(t <= (gen.position(p) - radii[j]) / 4 for j, p in enumerate(picks)):
            picks.append(a)
            radii.append(r)
            margins.append((t - r) / 4)
    if len(picks) < count:
        raise InsufficientSequenceError(len(picks), count)
    sats = []
    for a, r, m in zip(picks, radii, margins):
        b = gen.satellite(int(a[1:]), m)
        sats.append(b)
    space = gen.materialize([*picks, *sats])
    for a, b, r, m in zip(picks, sats, radii, margins):
        if space.dist(a, b) > r + m:
            raise PreconditionError(f"satellite {b} is farther than R({a}) + Delta")
    fam = tent_family(space, TentSpec(zip(picks, sats)))
    fam = FunctionFamily(
        fam.members,
        fam.witnesses,
        provenance={
            "construction": "case1",
            "kind": gen.kind,
            "params": gen.params_json(),
            "count": count,
            "margins": [format_rational(m) for m in margins],
        },
    )
    sel = Case1Selection(tuple(picks), tuple(sats), tuple(margins), tuple(radii), space, fam)
    bad = sel.chain_failures()
    if bad:
        n, m, s = bad[0]
        raise PreconditionError(f"separation chain breaks at picks ({n + 1}, {m + 1}), step {s + 1}")
    return sel


def case1_attained(space: FiniteMetricSpace, centres) -> FunctionFamily:
    """Attained-radius variant: pair each centre with its first nearest neighbour."""
    pairs = [(x, separation_radius(space, x).witnesses[0]) for x in centres]
    return tent_family(space, TentSpec(pairs))


# ---------------------------------------------------------------- gamma


def gamma_compose(space: FiniteMetricSpace, marks, closeness) -> FunctionFamily:
    """One tent per mark, reaching out to the farthest point within ``closeness``.

    Ties go to the first point in order. The tent hypothesis is then
    checked exactly; ``closeness`` is the knob that makes it hold.
    """
    closeness = Fraction(closeness)
    if closeness <= 0:
        raise InputError("closeness must be positive")
    marks = [str(m) for m in marks]
    if not marks:
        raise InputError("at least one mark is needed")
    limit = min(closeness.numerator * space.den // closeness.denominator, 2**62)  # floor(c * den)
    pairs = []
    for x in marks:
        i = space.index(x)
        row = space.nums[i]
        ok = np.asarray((row <= limit) & (row > 0), dtype=bool)
        ok[i] = False
        cand = np.nonzero(ok)[0]
        if not cand.size:
            raise PreconditionError(f"mark {x!r} has no neighbour within {closeness}")
        best = max(cand.tolist(), key=lambda j: (row[j], -j))
        pairs.append((x, space.points[best]))
    fam = tent_family(space, TentSpec(pairs))
    return FunctionFamily(
        fam.members,
        fam.witnesses,
        provenance={"construction": "gamma", "closeness": format_rational(closeness), "marks": marks},
    )
