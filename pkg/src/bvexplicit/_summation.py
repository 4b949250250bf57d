"""Compensated running sums."""

from __future__ import annotations

import numpy as np

_BLOCK = 256


def two_sum(a, b):
    """Error-free transformation: a + b == s + err exactly (elementwise)."""
    s = a + b
    bp = s - a
    err = (a - (s - bp)) + (b - bp)
    return s, err


def compensated_cumsum(values, block: int = _BLOCK) -> np.ndarray:
    """Prefix sums along axis 0 with error bounded independently of length.

    Each block of ``block`` rows is summed with a plain cumsum; the running
    offset between blocks is carried as an unevaluated (hi, lo) pair, so the
    absolute error is O(block * eps * max|partial sum|) rather than
    O(n * eps * ...).  Complex input is handled componentwise.
    """
    arr = np.asarray(values)
    if np.iscomplexobj(arr):
        return compensated_cumsum(arr.real, block) + 1j * compensated_cumsum(arr.imag, block)
    arr = arr.astype(np.float64, copy=False)
    n = arr.shape[0]
    if n == 0:
        return arr.copy()
    out = np.empty_like(arr)
    hi = np.zeros(arr.shape[1:])
    lo = np.zeros(arr.shape[1:])
    for start in range(0, n, block):
        chunk = np.cumsum(arr[start:start + block], axis=0)
        out[start:start + block] = chunk + (hi + lo)
        hi, err = two_sum(hi, chunk[-1])
        lo = lo + err
    return out
