"""Time the numba and numpy backends of the float pre-filters on the same inputs.

    python3 benchmarks/bench_kernels.py [--n 1500] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from snalip import kernels
from snalip import fixtures as fx


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def _inputs(n, seed):
    fam = fx.tent_sum(max(2, n // 30), n)
    space = fam.space
    D = space.nums.astype(np.float64) / space.den
    F = np.stack([np.asarray(g.nums, dtype=np.float64) / g.den for g in fam.members], axis=1)
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(n)
    return D, F, f


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1500)
    ap.add_argument("--tri-n", type=int, default=200, help="size for the cubic triangle scan")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    D, F, f = _inputs(args.n, args.seed)
    colabs = np.abs(F).sum(axis=1)
    Dt = D[: args.tri_n, : args.tri_n].copy()
    tol = kernels.l1_tolerance(F.shape[1])
    cases = {
        "triangle_flags": lambda use: kernels.triangle_flags(Dt, use=use),
        "pair_l1_status": lambda use: kernels.pair_l1_status(F, colabs, D, tol, use=use),
        "quotient_candidates": lambda use: kernels.quotient_candidates(f, D, use=use),
    }
    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    if "numba" in backends:
        for run in cases.values():  # compile outside the timed region
            run("numba")
    print(f"{'kernel':22s} " + " ".join(f"{b:>10s}" for b in backends) + "  agree")
    for name, run in cases.items():
        times, outs = [], []
        for b in backends:
            t, out = _best(lambda: run(b), args.repeat)
            times.append(t)
            outs.append(out)
        agree = all(np.array_equal(outs[0], o) for o in outs[1:])
        print(f"{name:22s} " + " ".join(f"{t:9.4f}s" for t in times) + f"  {agree}")


if __name__ == "__main__":
    main()
