"""Lazy models of the countable spaces, with analytic separation radii.

A generator enumerates its points canonically, evaluates distances from a
closed formula and answers radius queries for the full infinite space.
``truncate(N)`` realizes the first N points as a FiniteMetricSpace.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import InputError, PreconditionError
from .metric import FiniteMetricSpace, SeparationReport
from .rational import format_rational, parse_rational

KIND_ALIASES = {
    "ud": "ud_counterexample",
    "proper": "proper_counterexample",
    "harmonic": "harmonic_sequence",
    "triple": "triple_cluster",
    "satellites": "shrinking_satellites",
    "disjoint": "disjoint_sum",
}


class SpaceGenerator:
    kind = ""
    base_label = ""

    def __init__(self, **params):
        self.params = self._check_params(params)

    def _check_params(self, params):
        if params:
            raise InputError(f"{self.kind} takes no parameters, got {sorted(params)}")
        return {}

    # subclasses implement these three
    def label(self, i: int) -> str:
        raise NotImplementedError

    def index_of(self, label: str) -> int:
        raise NotImplementedError

    def distance(self, i: int, j: int) -> Fraction:
        raise NotImplementedError

    def radius_profile(self, p) -> SeparationReport:
        raise NotImplementedError

    uniform_discreteness: tuple = (False, Fraction(0))
    length: int | None = None

    def __repr__(self):
        return f"{type(self).__name__}({self.params_json()})"

    def params_json(self) -> dict:
        return {k: _jsonable(v) for k, v in self.params.items()}

    def provenance(self, n: int) -> dict:
        return {"kind": self.kind, "params": self.params_json(), "truncate": n}

    def truncate(self, n: int) -> FiniteMetricSpace:
        """First ``n`` points of the canonical enumeration, base included."""
        if not isinstance(n, int) or n < 2:
            raise InputError("truncation needs N >= 2")
        if self.length is not None and n > self.length:
            raise InputError(f"{self.kind} with these params has only {self.length} points")
        labels = [self.label(i) for i in range(n)]
        return FiniteMetricSpace.from_function(
            labels, self.base_label, self.distance, provenance=self.provenance(n)
        )


def _jsonable(v):
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _label_number(label, prefix):
    m = re.fullmatch(re.escape(prefix) + r"(\d+)", str(label))
    if m is None:
        raise InputError(f"unknown point {label!r}")
    return int(m.group(1))


class UdCounterexample(SpaceGenerator):
    """Points p_1, p_2, ... with d(p_n, p_m) = 1 + 1/max(n, m).

    Bounded (diameter 3/2), uniformly discrete, and no point attains its
    separation radius 1.
    """

    kind = "ud_counterexample"
    base_label = "p1"
    uniform_discreteness = (True, Fraction(1))

    def label(self, i):
        return f"p{i + 1}"

    def index_of(self, label):
        n = _label_number(label, "p")
        if n < 1:
            raise InputError(f"unknown point {label!r}")
        return n - 1

    def distance(self, i, j):
        if i == j:
            return Fraction(0)
        return 1 + Fraction(1, max(i, j) + 1)

    def radius_profile(self, p):
        self.index_of(p)
        return SeparationReport(str(p), Fraction(1), False, ())


class ProperCounterexample(SpaceGenerator):
    """Points p_0, p_1, ... with d(p_k, p_j) = k + j - eps_max(k,j), d(p_k, p_0) = k.

    The eps profile is eps_k = eps_limit - eps_scale/(k+1) unless an
    explicit list ``eps`` (eps_1, eps_2, ...) is given, which also caps the
    number of points.
    """

    kind = "proper_counterexample"
    base_label = "p0"
    uniform_discreteness = (True, Fraction(1))

    def _check_params(self, params):
        params = dict(params)
        out = {}
        if "eps" in params:
            eps = [parse_rational(e) for e in params.pop("eps")]
            if not eps:
                raise InputError("eps list must be nonempty")
            out["eps"] = eps
            self.length = len(eps) + 1
        else:
            out["eps_limit"] = parse_rational(params.pop("eps_limit", "1/2"))
            out["eps_scale"] = parse_rational(params.pop("eps_scale", "1/2"))
        if params:
            raise InputError(f"unknown parameters {sorted(params)}")
        self.params = out
        self._check_profile()
        return out

    def _check_profile(self):
        if "eps" in self.params:
            eps = self.params["eps"]
            if eps[0] <= 0:
                raise PreconditionError("eps_1 must be positive")
            for k in range(len(eps)):
                if eps[k] >= Fraction(1, 2):
                    raise PreconditionError(f"eps_{k + 1} must be < 1/2")
                if k and eps[k] <= eps[k - 1]:
                    raise PreconditionError(f"eps must increase strictly (eps_{k} >= eps_{k + 1})")
        else:
            lim, sc = self.params["eps_limit"], self.params["eps_scale"]
            if sc <= 0:
                raise PreconditionError("eps_scale must be positive so eps increases")
            if lim > Fraction(1, 2):
                raise PreconditionError("eps_limit must be <= 1/2 so every eps_k < 1/2")
            if lim - sc / 2 <= 0:
                raise PreconditionError("eps_1 = eps_limit - eps_scale/2 must be positive")

    def eps(self, k: int) -> Fraction:
        if k < 1:
            raise InputError("eps is indexed from 1")
        if "eps" in self.params:
            if k > len(self.params["eps"]):
                raise InputError(f"eps_{k} is beyond the explicit profile")
            return self.params["eps"][k - 1]
        return self.params["eps_limit"] - self.params["eps_scale"] / (k + 1)

    def gap(self, k: int) -> Fraction:
        """delta_k = eps_{k+1} - eps_k."""
        return self.eps(k + 1) - self.eps(k)

    def label(self, i):
        return f"p{i}"

    def index_of(self, label):
        k = _label_number(label, "p")
        if self.length is not None and k >= self.length:
            raise InputError(f"unknown point {label!r}")
        return k

    def distance(self, k, j):
        if k == j:
            return Fraction(0)
        if k == 0:
            return Fraction(j)
        if j == 0:
            return Fraction(k)
        return k + j - self.eps(max(k, j))

    def radius_profile(self, p):
        k = self.index_of(p)
        if k == 0:
            return SeparationReport(str(p), Fraction(1), True, ("p1",))
        # d(p_k, p_j) = k + j - eps > k for every j >= 1 since eps < 1/2
        return SeparationReport(str(p), Fraction(k), True, ("p0",))


class HarmonicSequence(SpaceGenerator):
    """0 and the points 1/n on the rational line; base 0.

    Not uniformly discrete; R(1/n) = 1/(n(n+1)) is attained at 1/(n+1),
    while R(0) = 0 is not attained.
    """

    kind = "harmonic_sequence"
    base_label = "p0"

    def label(self, i):
        return f"p{i}"

    def index_of(self, label):
        return _label_number(label, "p")

    def position(self, i):
        return Fraction(0) if i == 0 else Fraction(1, i)

    def distance(self, i, j):
        return abs(self.position(i) - self.position(j))

    def radius_profile(self, p):
        n = self.index_of(p)
        if n == 0:
            return SeparationReport(str(p), Fraction(0), False, ())
        return SeparationReport(str(p), Fraction(1, n * (n + 1)), True, (f"p{n + 1}",))


class TripleCluster(SpaceGenerator):
    """Clusters {c_n, c_n + d_n, c_n + d_n + d_n/4} at c_n = 2^-n, d_n = delta^n.

    The base p0 sits at 0, the accumulation point. Labels are a<n>, b<n>,
    e<n> for the three cluster points. With delta = 1/16, R(a_n) = d_n and
    R(b_n) = R(e_n) = d_n/4, all attained.
    """

    kind = "triple_cluster"
    base_label = "p0"

    def _check_params(self, params):
        params = dict(params)
        delta = parse_rational(params.pop("delta", "1/16"))
        if params:
            raise InputError(f"unknown parameters {sorted(params)}")
        if not 0 < delta <= Fraction(1, 16):
            raise PreconditionError("delta must lie in (0, 1/16]")
        return {"delta": delta}

    def scale(self, n):
        return self.params["delta"] ** n

    def center(self, n):
        return Fraction(1, 2**n)

    def label(self, i):
        if i == 0:
            return "p0"
        n, r = divmod(i - 1, 3)
        return "abe"[r] + str(n + 1)

    def index_of(self, label):
        label = str(label)
        if label == "p0":
            return 0
        m = re.fullmatch(r"([abe])(\d+)", label)
        if m is None or int(m.group(2)) < 1:
            raise InputError(f"unknown point {label!r}")
        return 3 * (int(m.group(2)) - 1) + "abe".index(m.group(1)) + 1

    def position(self, i):
        if i == 0:
            return Fraction(0)
        n, r = divmod(i - 1, 3)
        n += 1
        d = self.scale(n)
        return self.center(n) + (Fraction(0), d, d + d / 4)[r]

    def distance(self, i, j):
        return abs(self.position(i) - self.position(j))

    def pair(self, n):
        """The spike pair (a_n, b_n)."""
        return f"a{n}", f"b{n}"

    def radius_profile(self, p):
        i = self.index_of(p)
        if i == 0:
            return SeparationReport(str(p), Fraction(0), False, ())
        n, r = divmod(i - 1, 3)
        n += 1
        d = self.scale(n)
        if r == 0:
            return SeparationReport(str(p), d, True, (f"b{n}",))
        if r == 1:
            return SeparationReport(str(p), d / 4, True, (f"e{n}",))
        return SeparationReport(str(p), d / 4, True, (f"b{n}",))


class ShrinkingSatellites(SpaceGenerator):
    """Candidates a_n -> 0 on the line whose separation radii are not attained.

    a_n sits at t_n = ratio^n with R(a_n) = r_n = rho * t_n. Its satellites
    s<n>_<m> sit at t_n + r_n (1 + 2^-m), m >= 1, so distances from a_n
    decrease to r_n without reaching it. The canonical enumeration lists
    the base and the candidates; satellites are materialized on request.
    """

    kind = "shrinking_satellites"
    base_label = "p0"

    def _check_params(self, params):
        params = dict(params)
        ratio = parse_rational(params.pop("ratio", "1/8"))
        rho = parse_rational(params.pop("rho", "1/4"))
        length = params.pop("length", None)
        if params:
            raise InputError(f"unknown parameters {sorted(params)}")
        if not 0 < ratio < 1 or rho <= 0:
            raise PreconditionError("need 0 < ratio < 1 and rho > 0")
        # the next candidate and its satellites stay more than r_n below a_n
        if not ratio * (1 + 2 * rho) < 1 - rho:
            raise PreconditionError("need ratio * (1 + 2 rho) < 1 - rho")
        out = {"ratio": ratio, "rho": rho}
        if length is not None:
            length = int(length)
            if length < 1:
                raise PreconditionError("length must be >= 1")
            out["length"] = length
            self.length = length + 1
        return out

    def t(self, n):
        return self.params["ratio"] ** n

    def r(self, n):
        return self.params["rho"] * self.t(n)

    def candidates(self):
        """Candidate indices 1, 2, ... (finite when a length is set)."""
        n = 1
        while self.length is None or n < self.length:
            yield n
            n += 1

    def label(self, i):
        return "p0" if i == 0 else f"a{i}"

    def index_of(self, label):
        label = str(label)
        if label == "p0":
            return 0
        m = re.fullmatch(r"a(\d+)", label)
        if m is None or int(m.group(1)) < 1:
            raise InputError(f"unknown point {label!r}")
        return int(m.group(1))

    def position(self, label) -> Fraction:
        label = str(label)
        if label == "p0":
            return Fraction(0)
        m = re.fullmatch(r"a(\d+)", label)
        if m:
            return self.t(int(m.group(1)))
        m = re.fullmatch(r"s(\d+)_(\d+)", label)
        if m and int(m.group(1)) >= 1 and int(m.group(2)) >= 1:
            n, k = int(m.group(1)), int(m.group(2))
            return self.t(n) + self.r(n) * (1 + Fraction(1, 2**k))
        raise InputError(f"unknown point {label!r}")

    def distance(self, i, j):
        return abs(self.position(self.label(i)) - self.position(self.label(j)))

    def satellite(self, n: int, slack) -> str:
        """First satellite of a_n within distance R(a_n) + slack."""
        slack = Fraction(slack)
        if slack <= 0:
            raise InputError("slack must be positive")
        r = self.r(n)
        k = 1
        while r / 2**k > slack:
            k += 1
        return f"s{n}_{k}"

    def materialize(self, labels) -> FiniteMetricSpace:
        """Finite space on the base plus the given candidates and satellites."""
        labels = list(dict.fromkeys(["p0", *labels]))
        pos = [self.position(p) for p in labels]
        return FiniteMetricSpace.from_function(
            labels,
            "p0",
            lambda i, j: abs(pos[i] - pos[j]),
            provenance={"kind": self.kind, "params": self.params_json(), "points": labels},
        )

    def radius_profile(self, p):
        label = str(p)
        if label == "p0":
            return SeparationReport(label, Fraction(0), False, ())
        m = re.fullmatch(r"a(\d+)", label)
        if m:
            return SeparationReport(label, self.r(int(m.group(1))), False, ())
        m = re.fullmatch(r"s(\d+)_(\d+)", label)
        if m:
            n, k = int(m.group(1)), int(m.group(2))
            self.position(label)
            return SeparationReport(label, self.r(n) / 2 ** (k + 1), True, (f"s{n}_{k + 1}",))
        raise InputError(f"unknown point {label!r}")


class DisjointSumGenerator(SpaceGenerator):
    """Countably many copies of the ud space at mutual distance ``gap``.

    Copy c, point i is labelled m<c>.p<i>; the enumeration walks the
    (copy, index) grid diagonally so every point appears at a finite step.
    """

    kind = "disjoint_sum"
    base_label = "m1.p1"
    uniform_discreteness = (True, Fraction(1))

    def _check_params(self, params):
        params = dict(params)
        gap = parse_rational(params.pop("gap", "3"))
        if params:
            raise InputError(f"unknown parameters {sorted(params)}")
        if gap < Fraction(3, 4):
            raise PreconditionError("gap must be at least half the copy diameter 3/2")
        return {"gap": gap}

    @staticmethod
    def cell(i):
        # diagonal s = c + idx (s >= 2); within a diagonal, copies ascending
        s = 2
        while i >= s - 1:
            i -= s - 1
            s += 1
        c = i + 1
        return c, s - c

    @staticmethod
    def cell_index(c, idx):
        s = c + idx
        return (s - 2) * (s - 1) // 2 + (c - 1)

    def label(self, i):
        c, idx = self.cell(i)
        return f"m{c}.p{idx}"

    def index_of(self, label):
        m = re.fullmatch(r"m(\d+)\.p(\d+)", str(label))
        if m is None or int(m.group(1)) < 1 or int(m.group(2)) < 1:
            raise InputError(f"unknown point {label!r}")
        return self.cell_index(int(m.group(1)), int(m.group(2)))

    def distance(self, i, j):
        if i == j:
            return Fraction(0)
        (c1, a), (c2, b) = self.cell(i), self.cell(j)
        if c1 != c2:
            return self.params["gap"]
        return 1 + Fraction(1, max(a, b))

    def radius_profile(self, p):
        self.index_of(p)
        return SeparationReport(str(p), Fraction(1), False, ())


GENERATORS = {
    cls.kind: cls
    for cls in (
        UdCounterexample,
        ProperCounterexample,
        HarmonicSequence,
        TripleCluster,
        ShrinkingSatellites,
        DisjointSumGenerator,
    )
}


def canonical_kind(kind: str) -> str:
    kind = KIND_ALIASES.get(kind, kind)
    if kind not in GENERATORS:
        raise InputError(f"unknown generator kind {kind!r}")
    return kind


def make_generator(kind: str, params: dict | None = None) -> SpaceGenerator:
    return GENERATORS[canonical_kind(kind)](**(params or {}))


def truncate(gen: SpaceGenerator, n: int) -> FiniteMetricSpace:
    return gen.truncate(n)
