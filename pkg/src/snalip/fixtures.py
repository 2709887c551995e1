"""Deterministic fixtures shared by the acceptance suite, the tests and the CLI.

Random builders take an explicit ``numpy.random.Generator`` so a seed
fully determines the output.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .constructions import SpikeSpec, part_extremes, spike_family, tent_family
from .generators import make_generator
from .lipschitz import FunctionFamily, LipschitzFunction, lip_norm, sna_witnesses
from .metric import FiniteMetricSpace, disjoint_sum

# ---------------------------------------------------------------- small shipped examples


def two_point(label_a="x", label_b="y", d=1) -> FiniteMetricSpace:
    return FiniteMetricSpace.from_matrix([label_a, label_b], label_a, [[0, d], [d, 0]])


def tent_disjoint() -> FunctionFamily:
    """Two unit 2-point spaces at gap 3 with one tent per copy."""
    space = disjoint_sum([two_point(), two_point()], 3)
    return tent_family(space, part_extremes(space))


def violating_spikes() -> FunctionFamily:
    """Two unit-norm spikes on the ud truncation N=4 that break the pairwise bound at (p1, p3).

    f1 is the spike +-3/4 on (p1, p2) shifted to vanish at p1, f2 the
    spike +-5/8 on (p3, p4).
    """
    space = make_generator("ud").truncate(4)
    f1 = LipschitzFunction.from_values(
        space, {"p1": "3/4", "p2": "-3/4", "p3": 0, "p4": 0}, "f1", normalize=True
    )
    f2 = LipschitzFunction.from_values(space, {"p3": "5/8", "p4": "-5/8"}, "f2")
    return FunctionFamily([f1, f2], [("p1", "p2"), ("p3", "p4")])


# ---------------------------------------------------------------- tents at scale


def line_part(n: int, den: int = 64, prefix="q") -> FiniteMetricSpace:
    """n points i/den on the rational line."""
    idx = np.arange(n, dtype=np.int64)
    nums = np.abs(idx[:, None] - idx[None, :])
    return FiniteMetricSpace([f"{prefix}{i}" for i in range(n)], f"{prefix}0", nums, den)


def tent_sum(parts: int = 64, points: int = 2000, gap=3) -> FunctionFamily:
    """``parts`` line segments of near-equal size glued at ``gap``, one tent per segment."""
    q, r = divmod(points, parts)
    sizes = [q + 1] * r + [q] * (parts - r)
    space = disjoint_sum([line_part(s) for s in sizes], gap)
    return tent_family(space, part_extremes(space))


# ---------------------------------------------------------------- spikes


def triple_spikes(levels: int = 8) -> FunctionFamily:
    gen = make_generator("triple")
    space = gen.truncate(1 + 3 * levels)
    spec = SpikeSpec.from_space(space, [gen.pair(n) for n in range(1, levels + 1)], radii=gen)
    return spike_family(space, spec)


# ---------------------------------------------------------------- ultrametric hierarchies


def ultrametric(leaves, scales, prefix="h") -> FiniteMetricSpace:
    """Leaves are digit tuples; two leaves first differing at position t sit scales[t] apart."""
    T = np.asarray(leaves, dtype=np.int64)
    scales = [Fraction(s) for s in scales]
    den = 1
    for s in scales:
        den = max(den, s.denominator)
    lv = [s.numerator * (den // s.denominator) for s in scales]
    diff = T[:, None, :] != T[None, :, :]
    first = np.argmax(diff, axis=2)
    nums = np.asarray(lv, dtype=np.int64)[first]
    nums[~diff.any(axis=2)] = 0
    labels = [prefix + ".".join(str(int(x)) for x in row) for row in T]
    return FiniteMetricSpace(labels, labels[0], nums, den)


HIER_SCALES = (Fraction(1, 2), Fraction(1, 8), Fraction(1, 32))


def hierarchical(branch: int = 8) -> FiniteMetricSpace:
    """branch^3 leaves: clusters of sizes (8, 64, 512) at scales (1/2, 1/8, 1/32)."""
    leaves = [(i, j, k) for i in range(branch) for j in range(branch) for k in range(branch)]
    return ultrametric(leaves, HIER_SCALES)


def concentration(heavy: int = 400, light: int = 2, branch: int = 8) -> FiniteMetricSpace:
    """Like ``hierarchical`` but the first mid cluster holds ``heavy`` leaves, the others ``light``."""
    leaves = []
    for i in range(branch):
        for j in range(branch):
            size = heavy if (i, j) == (0, 0) else light
            leaves.extend((i, j, k) for k in range(size))
    return ultrametric(leaves, HIER_SCALES)


def gamma_marks(marks: int = 8, depths=range(3, 9)) -> tuple[FiniteMetricSpace, list[str]]:
    """Marks at mutual distance 1/2, each with satellites at 2^-m (ultrametric)."""
    labels, groups, depth = [], [], []
    for g in range(marks):
        labels.append(f"x{g}")
        groups.append(g)
        depth.append(0)
        for m in depths:
            labels.append(f"x{g}.s{m}")
            groups.append(g)
            depth.append(m)
    dmax = max(depths)
    den = 2**dmax
    G = np.asarray(groups)
    D = np.asarray(depth)
    # mark to satellite m: 2^-m; satellites m, m2: 2^-min(m, m2)
    a, b = D[:, None], D[None, :]
    shallow = np.where((a == 0) | (b == 0), np.maximum(a, b), np.minimum(a, b))
    nums = np.where(G[:, None] == G[None, :], den >> shallow, den // 2).astype(np.int64)
    np.fill_diagonal(nums, 0)
    space = FiniteMetricSpace(labels, labels[0], nums, den)
    return space, [f"x{g}" for g in range(marks)]


# ---------------------------------------------------------------- refuter fixtures


def _spike(space, a, b, name):
    h = space.dist(a, b) / 2
    return LipschitzFunction.from_values(space, {a: h, b: -h}, name)


def ud_case1_fixture(rng: np.random.Generator, n: int = 64) -> FunctionFamily:
    """Members meeting the Case-1 conditions on the ud truncation of size n.

    The first pair (p_a, p_b) sits at small indices; the second starts at
    index c >= 6b, so every cross distance is at most 1 + 1/(6b). Both
    members are +-d/2 spikes; one or two extra disjoint spikes at high
    indices are mixed in.
    """
    space = make_generator("ud").truncate(n)
    b = int(rng.integers(3, 9))
    a = int(rng.integers(2, b))
    c = int(rng.integers(6 * b, n - 4))
    e = int(rng.integers(c + 1, n + 1))
    pairs = [(a, b), (c, e)]
    used = {a, b, c, e}
    free = [i for i in range(b + 1, n + 1) if i not in used]
    for _ in range(int(rng.integers(0, 3))):
        x, y = sorted(int(v) for v in rng.choice(free, 2, replace=False))
        free = [i for i in free if i not in (x, y)]
        pairs.append((x, y))
    members = [_spike(space, f"p{x}", f"p{y}", f"f{i + 1}") for i, (x, y) in enumerate(pairs)]
    return FunctionFamily(members, [(f"p{x}", f"p{y}") for x, y in pairs])


def shared_zero_fixture(jn: int, jm: int, sign_n: int = 1, sign_m: int = 1) -> FunctionFamily:
    """f attains through the base: f(p_j) = +-j, zero elsewhere."""
    gen = make_generator("proper")
    space = gen.truncate(max(jn, jm) + 1)
    fn = LipschitzFunction.from_values(space, {f"p{jn}": sign_n * jn}, "f1")
    fm = LipschitzFunction.from_values(space, {f"p{jm}": sign_m * jm}, "f2")
    return FunctionFamily([fn, fm], [("p0", f"p{jn}"), ("p0", f"p{jm}")])


# ---------------------------------------------------------------- random data


def random_rational(rng, lo, hi, dens=(1, 2, 3, 4, 5, 6, 8, 12)) -> Fraction:
    d = int(rng.choice(dens))
    return Fraction(int(rng.integers(int(lo * d), int(hi * d) + 1)), d)


def random_metric(rng, n: int, lo=1, hi=2) -> FiniteMetricSpace:
    """Distances in [lo, hi] with hi <= 2 lo, so every triple is fine."""
    M = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            M[i][j] = M[j][i] = random_rational(rng, lo, hi)
    return FiniteMetricSpace.from_matrix([f"p{i}" for i in range(n)], "p0", M)


def random_matrix(rng, n: int):
    """Square rational matrix that may or may not be a metric.

    Mixes valid metrics, triangle breakers (one stretched entry),
    asymmetric ones and zero off-diagonal entries.
    """
    mode = int(rng.integers(0, 4))
    M = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            M[i][j] = M[j][i] = random_rational(rng, 1, 2)
    if n >= 3 and mode == 1:
        i, j = (int(v) for v in rng.choice(n, 2, replace=False))
        M[i][j] = M[j][i] = M[i][j] + random_rational(rng, 2, 4)
    elif n >= 2 and mode == 2:
        i, j = (int(v) for v in rng.choice(n, 2, replace=False))
        M[i][j] += Fraction(1, 7)
    elif n >= 2 and mode == 3 and rng.random() < 0.5:
        i, j = (int(v) for v in rng.choice(n, 2, replace=False))
        M[i][j] = M[j][i] = Fraction(0)
    return M


def random_function(rng, space, name=None, sparsity=0.5, grid=4, span=2) -> LipschitzFunction | None:
    """Random grid values, normalized at the base and scaled to norm 1 (None if constant)."""
    vals = []
    for _ in range(len(space)):
        if rng.random() < sparsity:
            vals.append(Fraction(0))
        else:
            vals.append(Fraction(int(rng.integers(-span * grid, span * grid + 1)), grid))
    f = LipschitzFunction.from_values(space, vals, name, normalize=True)
    norm = lip_norm(f)
    if norm == 0:
        return None
    return f.scaled(1 / norm)


def random_family(rng, n_max=12, k_max=3, sparsity=None) -> FunctionFamily:
    n = int(rng.integers(2, n_max + 1))
    k = int(rng.integers(1, k_max + 1))
    space = random_metric(rng, n)
    sp = float(rng.uniform(0.3, 0.9)) if sparsity is None else sparsity
    members = []
    while len(members) < k:
        f = random_function(rng, space, f"f{len(members) + 1}", sp)
        if f is not None:
            members.append(f)
    return FunctionFamily(members)


def random_tent_family(rng, parts_max=4) -> FunctionFamily:
    """Random metric clusters glued at gap 3, one tent per cluster.

    Cluster distances stay within [1, 3/2], so tent radii sum to at most 3.
    """
    parts = []
    for _ in range(int(rng.integers(2, parts_max + 1))):
        parts.append(random_metric(rng, int(rng.integers(2, 5)), 1, Fraction(3, 2)))
    space = disjoint_sum(parts, 3)
    return tent_family(space, part_extremes(space))


def with_attainment(family: FunctionFamily) -> FunctionFamily:
    """Declare the first attainment pair of every member."""
    return family.with_witnesses([tuple(sna_witnesses(f)[0]) for f in family.members])


__all__ = [
    "concentration",
    "gamma_marks",
    "hierarchical",
    "line_part",
    "random_family",
    "random_function",
    "random_matrix",
    "random_metric",
    "random_rational",
    "random_tent_family",
    "shared_zero_fixture",
    "tent_disjoint",
    "tent_sum",
    "triple_spikes",
    "ud_case1_fixture",
    "ultrametric",
    "violating_spikes",
    "with_attainment",
]
