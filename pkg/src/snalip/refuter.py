"""Attacks that turn a candidate c0 family into a combination of norm > 1.

The ud and proper modes follow the case structure of the two
non-embedding arguments: colour member pairs by how their attainment
pairs meet, take a monochromatic subset, then look for (n0, m0) meeting
the inequalities that force ||f_n0 + delta f_m0|| > 1. On finite data
these scans can come up empty, which is reported as Inconclusive with
the failed condition for every candidate. The generic mode is the
complete decision procedure and simply repackages a certificate
Violation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .certify import ConstancyCounterexample, Violation, certify_c0, constancy_check
from .errors import InputError, InternalConsistencyError, PreconditionError, SizeError
from .generators import make_generator
from .lipschitz import FunctionFamily, combine, triangle_gap

COLORS = ("A", "B1", "B2", "B3")
EXACT_LIMIT = 16


# ---------------------------------------------------------------- colouring


def oriented_pairs(family: FunctionFamily) -> list[tuple[str, str]]:
    """Declared witness pairs with the lower-indexed point first."""
    space = family.space
    out = []
    for f, w in zip(family.members, family.witnesses):
        if w is None:
            raise InputError(f"member {f.name!r} has no declared witness pair")
        x, y = w
        if space.index(x) > space.index(y):
            x, y = y, x
        out.append((x, y))
    return out


def pair_color(pn, pm) -> str:
    (xn, yn), (xm, ym) = pn, pm
    if not {xn, yn} & {xm, ym}:
        return "A"
    if xn == xm:
        return "B1"
    if yn == ym:
        return "B2"
    return "B3"


@dataclass(frozen=True)
class RamseyColoring:
    indices: tuple
    pairs: tuple
    colors: dict  # (n, m) with n < m -> colour

    def color(self, n, m):
        return self.colors[(n, m) if n < m else (m, n)]


def color_pairs(family: FunctionFamily) -> RamseyColoring:
    pairs = oriented_pairs(family)
    k = len(pairs)
    colors = {(n, m): pair_color(pairs[n], pairs[m]) for n in range(k) for m in range(n + 1, k)}
    return RamseyColoring(tuple(range(k)), tuple(pairs), colors)


def coloring_from_table(k: int, colors: dict) -> RamseyColoring:
    """Coloring over indices 0..k-1 from an explicit {(n, m): colour} table."""
    table = {}
    for (n, m), c in colors.items():
        if c not in COLORS:
            raise InputError(f"unknown colour {c!r}")
        table[(min(n, m), max(n, m))] = c
    missing = [(n, m) for n in range(k) for m in range(n + 1, k) if (n, m) not in table]
    if missing:
        raise InputError(f"pairs without a colour: {missing[:5]}")
    return RamseyColoring(tuple(range(k)), (), table)


def _max_clique(n, adj):
    """Lexicographically first maximum clique (include-first branch and bound)."""
    best = []

    def grow(cur, cand):
        nonlocal best
        if len(cur) > len(best):
            best = list(cur)
        for pos, v in enumerate(cand):
            rest = cand[pos + 1 :]
            if len(cur) + 1 + len(rest) <= len(best):
                return
            grow(cur + [v], [u for u in rest if adj[v] >> u & 1])

    grow([], list(range(n)))
    return best


def _greedy_clique(n, adj):
    chosen = []
    for v in range(n):
        if all(adj[v] >> u & 1 for u in chosen):
            chosen.append(v)
    return chosen


def monochromatic_subset(coloring: RamseyColoring, mode: str = "exact"):
    """(colour, indices) with every index pair of that colour.

    exact: a maximum subset (at most 16 indices); greedy: maximal by
    inclusion. Ties go to colour order A < B1 < B2 < B3, then to the
    lexicographically first subset.
    """
    idx = list(coloring.indices)
    n = len(idx)
    if n < 2:
        raise InputError("need at least two indices")
    if mode == "exact" and n > EXACT_LIMIT:
        raise SizeError(f"exact search is limited to {EXACT_LIMIT} indices; use greedy")
    if mode not in ("exact", "greedy"):
        raise InputError(f"unknown mode {mode!r}")
    search = _max_clique if mode == "exact" else _greedy_clique
    best = None
    for c in COLORS:
        adj = [0] * n
        for (a, b), col in coloring.colors.items():
            if col == c:
                adj[a] |= 1 << b
                adj[b] |= 1 << a
        clique = search(n, adj)
        if best is None or len(clique) > len(best[1]):
            best = (c, clique)
    return best[0], tuple(idx[v] for v in best[1])


# ---------------------------------------------------------------- outcomes


@dataclass(frozen=True)
class RefutationTrace:
    mode: str
    family: FunctionFamily = field(repr=False)
    coefficients: tuple
    pair: tuple
    quotient: Fraction
    n0: int | None = None
    m0: int | None = None
    delta: int | None = None
    constant: Fraction | None = None
    margin: Fraction | None = None
    kstar: int | None = None
    color: str | None = None

    def __post_init__(self):
        q = self.recompute()
        if q != self.quotient or not q > 1:
            raise InternalConsistencyError(
                f"trace does not verify: recorded {self.quotient}, recomputed {q}"
            )

    def recompute(self) -> Fraction:
        g = combine(self.family, self.coefficients)
        return g.quotient(*self.pair)


@dataclass(frozen=True)
class Inconclusive:
    mode: str
    reasons: tuple  # (candidate description, failed condition)
    color: str | None = None
    subset: tuple = ()
    counterexample: ConstancyCounterexample | None = None

    def __bool__(self):
        return False


def _trace(mode, family, n0, m0, delta, pair, **extra):
    k = len(family)
    coeffs = [0] * k
    coeffs[n0] = 1
    coeffs[m0] = delta
    q = combine(family, coeffs).quotient(*pair)
    if not q > 1:
        return None, q
    return RefutationTrace(mode, family, tuple(coeffs), tuple(pair), q, n0, m0, delta, **extra), q


def _sign(x) -> int:
    return -1 if x < 0 else 1


def _require_truncation(space, kind):
    prov = space.provenance if isinstance(space.provenance, dict) else {}
    if prov.get("kind") == kind and "params" in prov:
        return make_generator(kind, prov["params"])
    gen = make_generator(kind)
    if len(space) >= 2:
        try:
            if space == gen.truncate(len(space)):
                return gen
        except InputError:
            pass
    raise PreconditionError(f"the family's space is not a {kind} truncation")


def _b_groups(pairs, color, S):
    """Reduce a B-coloured subset to groups sharing their first point.

    Returns (group indices, oriented pairs after relabelling, note).
    """
    pairs = list(pairs)
    if color == "B1":
        return [(tuple(S), pairs, "B1")]
    if color == "B2":
        swapped = [(y, x) for x, y in pairs]
        return [(tuple(S), swapped, "B2 relabelled to B1")]
    n0 = S[0]
    S1 = tuple(m for m in S[1:] if pairs[m][0] == pairs[n0][1])
    S2 = tuple(m for m in S[1:] if pairs[m][1] == pairs[n0][0])
    swapped = [(y, x) for x, y in pairs]
    out = [(S1, pairs, "B3 reduced to B1"), (S2, swapped, "B3 reduced to B2, relabelled to B1")]
    out.sort(key=lambda g: -len(g[0]))
    return out


# ---------------------------------------------------------------- generic


def _generic(family):
    res = certify_c0(family)
    if not isinstance(res, Violation):
        return Inconclusive("generic", (("all pairs", "certificate holds on this truncation"),))
    sigma = res.sign_vector
    nz = [i for i, s in enumerate(sigma) if s]
    if len(family) == 2 and len(nz) == 2:
        delta = sigma[0] * sigma[1]
        tr, _ = _trace("generic", family, 0, 1, delta, res.pair)
        return tr
    q = res.quotient
    return RefutationTrace("generic", family, tuple(sigma), res.pair, q)


# ---------------------------------------------------------------- ud space


def _ud_index(gen, label):
    return gen.index_of(label) + 1


def _ud_case1(family, gen, pairs, S, reasons):
    space = family.space
    f = family.members
    for n0 in S:
        xn, yn = pairs[n0]
        kn = max(_ud_index(gen, xn), _ud_index(gen, yn))
        eps = Fraction(1, 2 * kn)
        for m0 in S:
            if m0 == n0:
                continue
            tag = f"(n0, m0) = ({f[n0].name}, {f[m0].name})"
            xm, ym = pairs[m0]
            fn, fm = f[n0], f[m0]
            if max(abs(fm.value(xn)), abs(fm.value(yn))) > eps / 3:
                reasons.append((tag, "condition (i): |f_m0| exceeds eps_n0/3 on the n0 pair"))
                continue
            dmax = max(space.dist(a, b) for a in (xn, yn) for b in (xm, ym))
            if dmax > 1 + eps / 3:
                reasons.append((tag, "condition (ii): cross distance exceeds 1 + eps_n0/3"))
                continue
            if fn.value(xm) != fn.value(ym):
                reasons.append((tag, "f_n0 is not constant on the m0 pair"))
                continue
            C = fn.value(xm)
            a, b = xn, yn
            if abs(fn.value(a) - C) < abs(fn.value(b) - C):
                a, b = b, a
            c, d = xm, ym
            if abs(fm.value(c)) < abs(fm.value(d)):
                c, d = d, c
            km = max(_ud_index(gen, xm), _ud_index(gen, ym))
            eps_m = Fraction(1, 2 * km)
            if not (triangle_gap(fm, (c, d), 0) and triangle_gap(fn, (a, b), C)):
                raise InternalConsistencyError("triangle gap failed on an attainment pair")
            if abs(fm.value(c)) < Fraction(1, 2) + eps_m or abs(fn.value(a) - C) < Fraction(1, 2) + eps:
                raise InternalConsistencyError("lower bounds from the triangle gap do not hold")
            delta = _sign(fm.value(c))
            if fn.value(a) >= C:
                delta = -delta
            tr, q = _trace("case1", family, n0, m0, delta, (a, c), constant=C, margin=eps, color="A")
            if tr is None:
                raise InternalConsistencyError(f"case 1 preconditions hold but quotient is {q}")
            return tr
    return None


def _shared_first_scan(family, group, pairs, mode, reasons, admissible, bound, kstar):
    f = family.members
    for n0 in group:
        for m0 in group:
            if m0 == n0:
                continue
            tag = f"(n0, m0) = ({f[n0].name}, {f[m0].name})"
            why = admissible(n0, m0)
            if why:
                reasons.append((tag, why))
                continue
            x = pairs[n0][0]
            yn, ym = pairs[n0][1], pairs[m0][1]
            fn, fm = f[n0], f[m0]
            lim, inclusive = bound
            vals = (abs(fn.value(x)), abs(fm.value(x)))
            if not all(v <= lim if inclusive else v < lim for v in vals):
                reasons.append((tag, f"shared-point bound {lim} fails"))
                continue
            delta = -_sign(fn.value(yn)) * _sign(fm.value(ym))
            tr, q = _trace(mode, family, n0, m0, delta, (yn, ym), kstar=kstar, color="B1")
            if tr is None:
                reasons.append((tag, f"quotient at (y_n0, y_m0) is {q}, not above 1"))
                continue
            return tr
    return None


def _ud_attack(family):
    gen = _require_truncation(family.space, "ud_counterexample")
    pairs = oriented_pairs(family)
    if len(family) < 2:
        raise InputError("the attack needs at least two members")
    col = color_pairs(family)
    color, S = monochromatic_subset(col, "exact" if len(family) <= EXACT_LIMIT else "greedy")
    reasons = []
    if color == "A":
        tr = _ud_case1(family, gen, pairs, S, reasons)
        return tr or Inconclusive("ud", tuple(reasons), color, S)
    for group, oriented, note in _b_groups(pairs, color, S):
        if len(group) < 2:
            reasons.append((note, "fewer than two members after the reduction"))
            continue
        kstar = _ud_index(gen, oriented[group[0]][0])
        tr = _shared_first_scan(
            family, group, oriented, "case2", reasons, lambda n, m: None, (Fraction(1, 10), True), kstar
        )
        if tr:
            return tr
    return Inconclusive("ud", tuple(reasons), color, S)


# ---------------------------------------------------------------- proper space


def _proper_case1(family, gen, pairs, S, reasons):
    f = family.members
    idx = gen.index_of
    for n0 in S:
        xn, yn = pairs[n0]
        kn, jn = idx(xn), idx(yn)
        if kn == 0:
            reasons.append((f"n0 = {f[n0].name}", "witness pair touches the base"))
            continue
        try:
            eps_j, dj = gen.eps(jn), gen.gap(jn)
        except InputError as exc:
            reasons.append((f"n0 = {f[n0].name}", str(exc)))
            continue
        for m0 in S:
            if m0 == n0:
                continue
            tag = f"(n0, m0) = ({f[n0].name}, {f[m0].name})"
            xm, ym = pairs[m0]
            km, jm = idx(xm), idx(ym)
            fn, fm = f[n0], f[m0]
            if not km > jn:
                reasons.append((tag, "k(m0) > j(n0) fails"))
                continue
            if not (abs(fm.value(xn)) < dj / 2 and abs(fm.value(yn)) < dj / 2):
                reasons.append((tag, "|f_m0| < delta_j(n0)/2 fails on the n0 pair"))
                continue
            if fn.value(xm) != fn.value(ym):
                reasons.append((tag, "f_n0 is not constant on the m0 pair"))
                continue
            C = fn.value(xm)
            tests_a = (
                abs(fn.value(xn) - C) >= kn - eps_j / 2,
                abs(fn.value(yn) - C) >= jn - eps_j / 2,
            )
            tests_b = (
                abs(fm.value(xm)) >= km - (eps_j / 2 + dj / 2),
                abs(fm.value(ym)) >= jm - (gen.eps(jm) - eps_j / 2 - dj / 2),
            )
            found = False
            for a in (0, 1):
                for b in (0, 1):
                    if not (tests_a[a] and tests_b[b]):
                        continue
                    found = True
                    zn = (xn, yn)[a]
                    zm = (xm, ym)[b]
                    delta = -_sign(fn.value(zn) - C) * _sign(fm.value(zm))
                    tr, q = _trace(
                        f"proper-a{a}b{b}", family, n0, m0, delta, (zn, zm),
                        constant=C, margin=eps_j, color="A",
                    )
                    if tr:
                        return tr
                    reasons.append((tag, f"subcase a{a}b{b}: quotient {q} is not above 1"))
            if not found:
                reasons.append((tag, "none of the subcases (a0|a1) x (b0|b1) holds"))
    return None


def _shared_zero(family, gen, group, pairs, reasons):
    f = family.members
    n0, m0 = group[0], group[1]
    fn, fm = f[n0], f[m0]
    yn, ym = pairs[n0][1], pairs[m0][1]
    if fn.value(ym) != 0 or fm.value(yn) != 0:
        sub = FunctionFamily([fn, fm], [family.witnesses[n0], family.witnesses[m0]])
        return constancy_check(sub)
    delta = -_sign(fn.value(yn)) * _sign(fm.value(ym))
    tr, q = _trace("case2", family, n0, m0, delta, (yn, ym), kstar=0, color="B1")
    if tr is None:
        reasons.append((f"(n0, m0) = ({fn.name}, {fm.name})", f"quotient {q} is not above 1"))
    return tr


def _proper_attack(family):
    gen = _require_truncation(family.space, "proper_counterexample")
    pairs = oriented_pairs(family)
    if len(family) < 2:
        raise InputError("the attack needs at least two members")
    col = color_pairs(family)
    color, S = monochromatic_subset(col, "exact" if len(family) <= EXACT_LIMIT else "greedy")
    reasons = []
    if color == "A":
        tr = _proper_case1(family, gen, pairs, S, reasons)
        return tr or Inconclusive("proper", tuple(reasons), color, S)
    if color == "B3":
        n0 = S[0]
        S1 = tuple(m for m in S[1:] if pairs[m][0] == pairs[n0][1])
        groups = [(S1, "B3 reduced to B1")] if len(S1) >= 2 else []
        if not groups:
            reasons.append(("B3", "no reduction to B1 with at least two members"))
    elif color == "B1":
        groups = [(S, "B1")]
    else:
        reasons.append(("B2", "members share a second witness point, which constancy on attainment pairs excludes"))
        groups = []
    for group, note in groups:
        kstar = gen.index_of(pairs[group[0]][0])
        if kstar == 0:
            out = _shared_zero(family, gen, group, pairs, reasons)
            if isinstance(out, RefutationTrace):
                return out
            if isinstance(out, ConstancyCounterexample):
                return Inconclusive("proper", tuple(reasons), color, S, out)
            continue
        j = lambda n: gen.index_of(pairs[n][1])  # noqa: E731

        def admissible(n, m):
            if not j(m) > j(n) > kstar:
                return "j(m0) > j(n0) > k* fails"
            return None

        tr = _shared_first_scan(
            family, group, pairs, "case2", reasons, admissible, (Fraction(1, 4), False), kstar
        )
        if tr:
            return tr
    return Inconclusive("proper", tuple(reasons), color, S)


def shared_zero_attack(family: FunctionFamily):
    """k* = 0 branch: every witness pair starts at the base of a proper truncation."""
    gen = _require_truncation(family.space, "proper_counterexample")
    if len(family) < 2:
        raise InputError("the attack needs at least two members")
    pairs = oriented_pairs(family)
    base = family.space.base
    if any(x != base for x, _ in pairs):
        raise InputError("every witness pair must contain the base point")
    table = constancy_check(family)
    if isinstance(table, ConstancyCounterexample):
        return Inconclusive("shared-zero", (), "B1", tuple(range(len(family))), table)
    reasons = []
    tr = _shared_zero(family, gen, (0, 1), pairs, reasons)
    if isinstance(tr, RefutationTrace):
        jn, jm = gen.index_of(pairs[0][1]), gen.index_of(pairs[1][1])
        expected = Fraction(jn + jm) / (jn + jm - gen.eps(max(jn, jm)))
        if tr.quotient != expected:
            raise InternalConsistencyError(f"quotient {tr.quotient} differs from {expected}")
        return tr
    return Inconclusive("shared-zero", tuple(reasons), "B1", tuple(range(len(family))))


def attack(family: FunctionFamily, space_kind: str = "generic"):
    """Search for f_n0 + delta f_m0 (or a sign combination) with quotient > 1."""
    if space_kind == "generic":
        return _generic(family)
    if space_kind == "ud":
        return _ud_attack(family)
    if space_kind == "proper":
        return _proper_attack(family)
    raise InputError(f"unknown space kind {space_kind!r}")
