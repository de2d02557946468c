"""Slow, transform-free series inversion used as the correctness oracle.

Every kernel integral is evaluated at the exact eigenvalue (no spectral
grid, no interpolation), every face integral is a plain weighted sum over
the detectors, and the series is summed with dense sine matrices.  The
quadrature rules are the same trapezoid rules the fast pipeline uses, so
the two paths differ only by the lambda interpolation.
"""
from __future__ import annotations

import math

import numpy as np

from .core import FilterSpec, GridSpec, eigen_norm, filter_eta
from .forward import FACES, ProjectionSet
from .recon_fast import VolumeImage

MAX_N = 65


def _radial_weights(grid: GridSpec) -> np.ndarray:
    """``dr * w_k / (4 pi r_k)`` with the k = 0 term dropped.

    ``w_k`` is the trapezoid weight of the zero-padded length-n2 grid, which
    only halves the last sample when ``n1 == n2``.
    """
    r = grid.radii()
    w = np.zeros(grid.n1)
    w[1:] = grid.dr / (4.0 * math.pi * r[1:])
    if grid.n1 == grid.n2:
        w[-1] *= 0.5
    return w


def radial_spectrum_at(proj_z, lam, grid: GridSpec):
    """``I(z, lam)`` for one detector's radial samples at arbitrary ``lam >= 0``."""
    proj_z = np.asarray(proj_z, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ValueError("lambda must be non-negative")
    w = _radial_weights(grid)
    kern = np.cos(np.multiply.outer(lam, grid.radii())) * w
    out = kern @ proj_z
    return out if out.ndim else float(out)


def _sine_matrix(grid: GridSpec, n_modes: int) -> np.ndarray:
    """``s[m - 1, i - 1] = sin(pi m x_i / R)`` at the interior nodes."""
    m = np.arange(1, n_modes + 1)
    i = np.arange(1, grid.n - 1)
    return np.sin(np.pi * np.outer(m, i) / (grid.n - 1))


def coefficients_direct(proj: ProjectionSet, ms, chunk: int = 2048) -> np.ndarray:
    """Unfiltered coefficients for a list of eigen triples ``ms`` (shape ``(K, 3)``)."""
    grid = proj.grid
    ms = np.atleast_2d(np.asarray(ms, dtype=np.int64))
    if ms.shape[1] != 3 or ms.min() < 1:
        raise ValueError("eigen indices must be triples of integers >= 1")
    N = grid.n_interior
    s = _sine_matrix(grid, int(ms.max()))
    w = _radial_weights(grid)
    r = grid.radii()
    g = proj.data.reshape(6 * N * N, grid.n1) * w
    sq = (ms**2).sum(axis=1)
    order = np.argsort(sq, kind="stable")
    out = np.zeros(len(ms))
    scale = eigen_norm(grid.R) * math.pi / grid.R * grid.dx**2
    for lo in range(0, len(ms), chunk):
        sel = order[lo : lo + chunk]
        uniq, inv = np.unique(sq[sel], return_inverse=True)
        lam = math.pi / grid.R * np.sqrt(uniq)
        # I(z, lam) for all detectors at this chunk's distinct eigenvalues
        I = (g @ np.cos(np.outer(r, lam))).reshape(6, N, N, len(uniq))
        m = ms[sel]
        acc = np.zeros(len(sel))
        for j, (normal, side) in enumerate(FACES):
            a, b = (ax for ax in range(3) if ax != normal)
            Ij = np.moveaxis(I[j], -1, 0)[inv]
            face = np.einsum("ka,kab,kb->k", s[m[:, a] - 1], Ij, s[m[:, b] - 1])
            mn = m[:, normal]
            sign = np.where(mn % 2, -1.0, 1.0) if side else -1.0
            acc += sign * mn * face
        out[sel] = scale * acc
    return out


def coefficient_direct(proj: ProjectionSet, m) -> float:
    """Coefficient from boundary data: ``sum_z I(z, lam_m) du_m/dn(z) dx^2``."""
    return float(coefficients_direct(proj, [m])[0])


def coefficients_oracle(f_vol, ms, grid: GridSpec | None = None) -> np.ndarray:
    """Interior Riemann sums ``dx^3 sum u_m f`` for a list of triples."""
    values, grid = _volume_values(f_vol, grid)
    ms = np.atleast_2d(np.asarray(ms, dtype=np.int64))
    if ms.shape[1] != 3 or ms.min() < 1:
        raise ValueError("eigen indices must be triples of integers >= 1")
    s = _sine_matrix(grid, int(ms.max()))
    inner = values[1:-1, 1:-1, 1:-1]
    sums = np.einsum("ki,ijl,kj,kl->k", s[ms[:, 0] - 1], inner, s[ms[:, 1] - 1], s[ms[:, 2] - 1], optimize=True)
    return eigen_norm(grid.R) * grid.dx**3 * sums


def coefficient_oracle(f_vol, m, grid: GridSpec | None = None) -> float:
    return float(coefficients_oracle(f_vol, [m], grid)[0])


def _volume_values(f_vol, grid):
    if isinstance(f_vol, VolumeImage):
        return f_vol.values, f_vol.grid
    values = np.asarray(f_vol, dtype=float)
    if grid is None:
        raise ValueError("a GridSpec is required for raw arrays")
    if values.shape != (grid.n,) * 3:
        raise ValueError(f"volume must have shape {(grid.n,) * 3}")
    return values, grid


def synthesize_direct(alpha: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Sum the sine series at the grid nodes with dense sine matrices."""
    s = _sine_matrix(grid, alpha.shape[0])
    vol = np.zeros((grid.n,) * 3)
    inner = np.einsum("abc,ai,bj,ck->ijk", alpha, s[: alpha.shape[0]], s[: alpha.shape[1]], s[: alpha.shape[2]], optimize=True)
    vol[1:-1, 1:-1, 1:-1] = eigen_norm(grid.R) * inner
    return vol


def reference_coefficients(proj: ProjectionSet, filt: FilterSpec | None = None, m_max: int | None = None) -> np.ndarray:
    """Filtered coefficients on the full ``(n-2)^3`` index box (zero beyond ``m_max``)."""
    grid = proj.grid
    N = grid.n_interior
    m_max = N if m_max is None else int(m_max)
    if not 1 <= m_max <= N:
        raise ValueError(f"m_max must lie in [1, {N}]")
    filt = filt or FilterSpec.for_grid(grid)
    k = np.arange(1, m_max + 1)
    ms = np.stack(np.meshgrid(k, k, k, indexing="ij"), axis=-1).reshape(-1, 3)
    lam = math.pi / grid.R * np.sqrt((ms**2).sum(axis=1))
    eta = filter_eta(lam, filt)
    live = eta != 0
    alpha = np.zeros(len(ms))
    alpha[live] = coefficients_direct(proj, ms[live]) * eta[live]
    full = np.zeros((N, N, N))
    full[:m_max, :m_max, :m_max] = alpha.reshape(m_max, m_max, m_max)
    return full


def reconstruct_reference(proj: ProjectionSet, filt: FilterSpec | None = None, m_max: int | None = None, force: bool = False) -> VolumeImage:
    """Series solution with per-eigenvalue kernel integrals; O(n^6), meant for n <= 33."""
    grid = proj.grid
    if grid.n > MAX_N and not force:
        raise ValueError(f"reference solver is O(n^6); refusing n = {grid.n} > {MAX_N} without force=True")
    alpha = reference_coefficients(proj, filt, m_max)
    return VolumeImage(grid, synthesize_direct(alpha, grid), proj.origin)
