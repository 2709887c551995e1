"""Exact rational helpers and the scaled-integer array representation.

A matrix of rationals is stored as integer numerators over one common
denominator. Numerators live in an ``int64`` array when they are small
enough that sums of a few of them cannot overflow, and in an ``object``
array of Python ints otherwise. Either way every comparison done on them
is exact.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

# int64 storage is used only below this bound, so a+b and |a-b| are safe.
INT64_LIMIT = 2**61

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` (or a bare integer) into a Fraction.

    Floats are rejected: exactness is the point of the file formats.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"not a rational: {text!r}")
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(int(m.group(1)), den)


def format_rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def to_int_array(values: Iterable[int], shape=None) -> np.ndarray:
    """Build an int64 array when every value is below INT64_LIMIT, else object."""
    vals = list(values)
    big = any(v >= INT64_LIMIT or v <= -INT64_LIMIT for v in vals)
    arr = np.empty(len(vals), dtype=object if big else np.int64)
    arr[:] = vals
    if shape is not None:
        arr = arr.reshape(shape)
    return arr


def narrow(arr: np.ndarray) -> np.ndarray:
    """Return ``arr`` as int64 if all entries fit, otherwise as object ints."""
    if arr.dtype == np.int64:
        return arr
    if arr.size == 0:
        return arr.astype(np.int64)
    flat = arr.ravel()
    lo, hi = min(flat), max(flat)
    if -INT64_LIMIT < lo and hi < INT64_LIMIT:
        return arr.astype(np.int64)
    return arr.astype(object)


def widen(arr: np.ndarray) -> np.ndarray:
    """Object-int view of an integer array (never overflows)."""
    if arr.dtype == object:
        return arr
    out = np.empty(arr.shape, dtype=object)
    out.ravel()[:] = [int(v) for v in arr.ravel()]
    return out


def rescale(nums: np.ndarray, factor: int) -> np.ndarray:
    """Multiply numerators by a positive integer factor, widening if needed."""
    if factor == 1:
        return nums
    if nums.dtype == np.int64:
        peak = int(np.abs(nums).max()) if nums.size else 0
        if peak * factor < INT64_LIMIT:
            return nums * np.int64(factor)
    return narrow(widen(nums) * factor)


def scale_fractions(values: Sequence[Fraction], shape=None) -> tuple[np.ndarray, int]:
    """Common-denominator form of a sequence of rationals."""
    fracs = [Fraction(v) for v in values]
    den = 1
    for f in fracs:
        den = math.lcm(den, f.denominator)
    nums = to_int_array((f.numerator * (den // f.denominator) for f in fracs), shape)
    return nums, den


def reduce_scaled(nums: np.ndarray, den: int) -> tuple[np.ndarray, int]:
    """Divide numerators and denominator by their common gcd."""
    if nums.dtype == np.int64:
        g = math.gcd(den, int(np.gcd.reduce(nums.ravel()))) if nums.size else den
    else:
        g = den
        for v in nums.ravel():
            g = math.gcd(g, int(v))
            if g == 1:
                break
    if g <= 1:
        return nums, den
    if nums.dtype == np.int64:
        return nums // np.int64(g), den // g
    return narrow(nums // g), den // g


def common_scale(a_nums, a_den, b_nums, b_den):
    """Bring two scaled arrays onto their least common denominator."""
    den = math.lcm(a_den, b_den)
    return rescale(a_nums, den // a_den), rescale(b_nums, den // b_den), den


def to_float(nums: np.ndarray) -> np.ndarray | None:
    """Correctly rounded float64 image of integer numerators.

    Returns None when the dynamic range is too wide for a float filter to
    carry a relative error bound (some nonzero entry would fall out of the
    normal range).
    """
    if nums.dtype == np.int64:
        return nums.astype(np.float64)
    flat = nums.ravel()
    if flat.size == 0:
        return np.zeros(nums.shape)
    bits = max(int(v).bit_length() for v in flat)
    shift = max(0, bits - 1000)
    if not shift:
        return np.array([float(v) for v in flat], dtype=np.float64).reshape(nums.shape)
    scale = 1 << shift
    out = [int(v) / scale for v in flat]
    if any(v != 0 and abs(x) < 2.0**-1000 for v, x in zip(flat, out)):
        return None
    return np.array(out, dtype=np.float64).reshape(nums.shape)


def to_float_shared(*arrays):
    """Float images of several integer arrays under one common scale.

    Returns a tuple of arrays, or None if the combined range is too wide.
    """
    if all(a.dtype == np.int64 for a in arrays):
        return tuple(a.astype(np.float64) for a in arrays)
    flat = np.concatenate([widen(a).ravel() for a in arrays])
    img = to_float(flat)
    if img is None:
        return None
    out, start = [], 0
    for a in arrays:
        out.append(img[start : start + a.size].reshape(a.shape))
        start += a.size
    return tuple(out)
