"""Type-I cosine and sine transforms on uniform grids.

These are the unnormalized textbook sums; physical scale factors are applied
by the reconstruction code.

    dct1:  X_l = sum_k w_k x_k cos(pi l k / (N - 1)),  w_0 = w_{N-1} = 1/2
    dst1:  X_k = sum_j x_j sin(pi (j + 1)(k + 1) / (N + 1))

The FFT work goes through :mod:`scipy.fft` with a single worker.  pocketfft
falls back to an O(p) generic pass for a large prime factor p of the
underlying FFT length (e.g. N = 126 -> 2 * 127), which is several times
slower than a dense BLAS product at such sizes; for those lengths, and only
up to ``DENSE_MAX``, the transform is applied as a cached matrix instead.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.fft as sfft

DENSE_MAX = 1024
SMOOTH_PRIME = 13


def _largest_prime_factor(m: int) -> int:
    best, p = 1, 2
    while p * p <= m:
        while m % p == 0:
            best, m = p, m // p
        p += 1
    return max(best, m)


def _dense(fft_len: int, N: int) -> bool:
    return N <= DENSE_MAX and _largest_prime_factor(fft_len) > SMOOTH_PRIME


@lru_cache(maxsize=16)
def _dst1_matrix(N: int) -> np.ndarray:
    k = np.arange(1, N + 1)
    S = np.sin(np.pi * np.outer(k, k) / (N + 1))
    S.flags.writeable = False
    return S


@lru_cache(maxsize=16)
def _dct1_matrix(N: int) -> np.ndarray:
    k = np.arange(N)
    C = np.cos(np.pi * np.outer(k, k) / (N - 1))
    C[:, 0] *= 0.5
    C[:, -1] *= 0.5
    C.flags.writeable = False
    return C


def _apply_matrix(x: np.ndarray, M: np.ndarray, axis: int) -> np.ndarray:
    # y[..., l, ...] = sum_k M[l, k] x[..., k, ...]
    axis %= x.ndim
    if axis == x.ndim - 1:
        return x @ M.T
    if axis == 0:
        return np.tensordot(M, x, axes=(1, 0))
    return M @ x if axis == x.ndim - 2 else np.moveaxis(np.moveaxis(x, axis, -1) @ M.T, -1, axis)


def _as_real(x, min_len: int, axes) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    for ax in axes:
        if x.shape[ax] < min_len:
            raise ValueError(f"transform length must be >= {min_len}, got {x.shape[ax]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("transform input contains NaN or infinite values")
    return x


def _dct1_axis(x: np.ndarray, axis: int) -> np.ndarray:
    N = x.shape[axis]
    if N > 2 and _dense(2 * (N - 1), N):
        return _apply_matrix(x, _dct1_matrix(N), axis)
    # scipy's type-1 DCT is twice the trapezoid-weighted sum
    return 0.5 * sfft.dct(x, type=1, axis=axis, workers=1)


def _dst1_axis(x: np.ndarray, axis: int) -> np.ndarray:
    N = x.shape[axis]
    if _dense(2 * (N + 1), N):
        return _apply_matrix(x, _dst1_matrix(N), axis)
    return 0.5 * sfft.dst(x, type=1, axis=axis, workers=1)


def dct1(x, axis: int = -1) -> np.ndarray:
    """Trapezoid-weighted DCT-I along ``axis`` (length N >= 2)."""
    return _dct1_axis(_as_real(x, 2, (axis,)), axis)


def dst1(x, axis: int = -1) -> np.ndarray:
    """DST-I along ``axis``; applying it twice multiplies by (N + 1) / 2."""
    return _dst1_axis(_as_real(x, 1, (axis,)), axis)


def _dst1_axes(a, axes) -> np.ndarray:
    a = _as_real(a, 1, axes)
    # fixed axis order keeps the rounding pattern reproducible
    for ax in axes:
        a = _dst1_axis(a, ax)
    return a


def dst1_2d(a, axes=(-2, -1)) -> np.ndarray:
    """Separable DST-I over two axes (leading axes are treated as a batch)."""
    return _dst1_axes(a, axes)


def dst1_3d(a, axes=(-3, -2, -1)) -> np.ndarray:
    """Separable DST-I over three axes, applied first axis first."""
    return _dst1_axes(a, axes)
