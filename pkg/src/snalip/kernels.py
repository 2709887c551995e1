"""Float pre-filters for the O(N^2) and O(N^3) scans.

Each kernel sees float64 images of exact integer data and sorts the work
into "certainly fine", "certainly bad" and "too close to call". The
relative tolerance is far above the accumulated rounding error, so the
first two verdicts are rigorous; callers settle the third group in exact
integer arithmetic. Nothing returned from the public API is decided here.

Two interchangeable backends exist: numba-compiled loops and a pure
numpy path. Set ``SNALIP_NO_NUMBA=1`` to force numpy.
"""

from __future__ import annotations

import os

import numpy as np

# Rounding error in any kernel is a small multiple of 2**-53 per term.
TOL = 2.0**-40


def _numba_wanted() -> bool:
    return os.environ.get("SNALIP_NO_NUMBA", "").strip().lower() not in {"1", "true", "yes"}


try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


# ---------------------------------------------------------------- numpy path


def triangle_flags_numpy(D, full, tol=TOL):
    n = D.shape[0]
    chunks = []
    for p in range(n):
        # S[q, r] = D[p, q] + D[q, r]
        S = D[p, :, None] + D
        target = D[p][None, :]
        near = target >= S * (1.0 - tol)
        near[p, :] = False
        np.fill_diagonal(near, False)
        if full:
            near[:, p] = False
        else:
            near[:, : p + 1] = False
        q, r = np.nonzero(near)
        if q.size:
            sure = target[0, r] > S[q, r] * (1.0 + tol)
            chunks.append(np.column_stack([np.full(q.size, p), q, r, sure.astype(np.int64)]))
    if not chunks:
        return np.empty((0, 4), dtype=np.int64)
    return np.concatenate(chunks).astype(np.int64)


def pair_l1_status_numpy(FT, colabs, D, tol):
    n = D.shape[0]
    status = np.zeros((n, n), dtype=np.int8)
    for i in range(n - 1):
        s = np.abs(FT[i + 1 :] - FT[i]).sum(axis=1)
        e = tol * (colabs[i] + colabs[i + 1 :])
        d = D[i, i + 1 :]
        row = np.ones(s.shape, dtype=np.int8)
        row[s + e < d * (1.0 - tol)] = 0
        row[s - e > d * (1.0 + tol)] = 2
        status[i, i + 1 :] = row
    return status


def quotient_candidates_numpy(f, D, tol=TOL, block=128):
    # Row blocks over the upper triangle keep the temporaries in cache.
    # One global bound E covers every per-pair error, so the filter
    # q >= max(q) - 2E keeps every pair that can attain the true maximum.
    n = D.shape[0]
    blocks = []
    qmax, dmin = 0.0, np.inf
    for s in range(0, n - 1, block):
        e = min(s + block, n)
        d = D[s:e, s:]
        q = np.abs(f[s:e, None] - f[None, s:])
        with np.errstate(divide="ignore", invalid="ignore"):
            q /= d
        low = np.arange(e - s)[:, None] >= np.arange(n - s)[None, :]
        q[low] = -1.0
        qmax = max(qmax, float(q.max()))
        dmin = min(dmin, float(np.where(low, np.inf, d).min()))
        blocks.append(q)
    E = tol * (2.0 * float(np.abs(f).max()) / dmin + qmax)
    lo = qmax - 2.0 * E
    out = []
    for b, q in enumerate(blocks):
        i, j = np.nonzero(q >= lo)
        s = b * block
        out.append(np.column_stack([i + s, j + s]))
    return np.concatenate(out).astype(np.int64) if out else np.empty((0, 2), np.int64)


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def _triangle_scan(D, full, tol, out):
        n = D.shape[0]
        count = 0
        for p in range(n):
            for q in range(n):
                if q == p:
                    continue
                dpq = D[p, q]
                start = 0 if full else p + 1
                for r in range(start, n):
                    if r == q or r == p:
                        continue
                    s = dpq + D[q, r]
                    if D[p, r] >= s * (1.0 - tol):
                        if out.shape[0] > 0:
                            out[count, 0] = p
                            out[count, 1] = q
                            out[count, 2] = r
                            out[count, 3] = 1 if D[p, r] > s * (1.0 + tol) else 0
                        count += 1
        return count

    def triangle_flags_numba(D, full, tol=TOL):
        D = np.ascontiguousarray(D, dtype=np.float64)
        empty = np.empty((0, 4), dtype=np.int64)
        count = _triangle_scan(D, bool(full), tol, empty)
        out = np.empty((count, 4), dtype=np.int64)
        if count:
            _triangle_scan(D, bool(full), tol, out)
        return out

    @njit(cache=True)
    def _pair_l1_status(FT, colabs, D, tol, status):
        n = D.shape[0]
        k = FT.shape[1]
        for i in range(n - 1):
            for j in range(i + 1, n):
                s = 0.0
                for m in range(k):
                    s += abs(FT[i, m] - FT[j, m])
                e = tol * (colabs[i] + colabs[j])
                d = D[i, j]
                if s + e < d * (1.0 - tol):
                    status[i, j] = 0
                elif s - e > d * (1.0 + tol):
                    status[i, j] = 2
                else:
                    status[i, j] = 1

    def pair_l1_status_numba(FT, colabs, D, tol):
        n = D.shape[0]
        status = np.zeros((n, n), dtype=np.int8)
        _pair_l1_status(
            np.ascontiguousarray(FT, dtype=np.float64),
            np.ascontiguousarray(colabs, dtype=np.float64),
            np.ascontiguousarray(D, dtype=np.float64),
            tol,
            status,
        )
        return status

    @njit(cache=True)
    def _quotient_scan(f, D, tol, lo, out):
        n = D.shape[0]
        best = -np.inf
        count = 0
        for i in range(n - 1):
            fi = f[i]
            for j in range(i + 1, n):
                d = D[i, j]
                q = abs(fi - f[j]) / d
                err = tol * ((abs(fi) + abs(f[j])) / d + q)
                if q - err > best:
                    best = q - err
                if q + err >= lo:
                    if out.shape[0] > 0:
                        out[count, 0] = i
                        out[count, 1] = j
                    count += 1
        return best, count

    def quotient_candidates_numba(f, D, tol=TOL):
        f = np.ascontiguousarray(f, dtype=np.float64)
        D = np.ascontiguousarray(D, dtype=np.float64)
        empty = np.empty((0, 2), dtype=np.int64)
        lo, _ = _quotient_scan(f, D, tol, np.inf, empty)
        _, count = _quotient_scan(f, D, tol, lo, empty)
        out = np.empty((count, 2), dtype=np.int64)
        _quotient_scan(f, D, tol, lo, out)
        return out


# ---------------------------------------------------------------- dispatch


def backend() -> str:
    return "numba" if HAVE_NUMBA and _numba_wanted() else "numpy"


def triangle_flags(D, full=False, tol=TOL, use=None):
    """Triples (p, q, r) where d(p,r) <= d(p,q) + d(q,r) is not clearly slack.

    Rows are ``(p, q, r, sure)`` in lexicographic (p, q, r) order with
    ``sure == 1`` when the float image already shows a violation.
    """
    if (use or backend()) == "numba":
        return triangle_flags_numba(D, full, tol)
    return triangle_flags_numpy(D, full, tol)


def pair_l1_status(FT, colabs, D, tol, use=None):
    """Upper-triangular status of sum_m |F[i,m] - F[j,m]| against D[i,j].

    0 means certainly within, 2 certainly over, 1 undecided.
    """
    if (use or backend()) == "numba":
        return pair_l1_status_numba(FT, colabs, D, tol)
    return pair_l1_status_numpy(FT, colabs, D, tol)


def quotient_candidates(f, D, tol=TOL, use=None):
    """Pairs i < j that might attain max |f_i - f_j| / D_ij."""
    if (use or backend()) == "numba":
        return quotient_candidates_numba(f, D, tol)
    return quotient_candidates_numpy(f, D, tol)


def l1_tolerance(k: int) -> float:
    return max(TOL, (k + 4) * 2.0**-50)
