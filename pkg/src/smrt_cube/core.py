"""Discretization parameters, eigen-index arithmetic and analytic kernels.

Everything here is a pure function of its arguments.  The cube is
``[0, R]^3`` in local coordinates; callers that place the cube elsewhere in
space translate points before calling :func:`eigenfunction_value`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class GridSpec:
    """Cartesian grid on the cube together with the radial/spectral grids.

    ``n`` counts nodes per axis including both boundary nodes.  The radial
    grid has ``n1`` samples ``r_k = k * dr`` covering ``[0, D]``; it is padded
    to ``n2`` (a power of two) for the cosine transform.
    """

    n: int
    R: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ValueError(f"need an integer n >= 3, got {self.n!r}")
        if not (self.R > 0 and math.isfinite(self.R)):
            raise ValueError(f"cube side R must be positive, got {self.R!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "R", float(self.R))

    @property
    def dx(self) -> float:
        return self.R / (self.n - 1)

    @property
    def D(self) -> float:
        return SQRT3 * self.R

    @property
    def n1(self) -> int:
        return math.ceil(SQRT3 * (self.n - 1)) + 1

    @property
    def n2(self) -> int:
        return 1 << (self.n1 - 1).bit_length()

    @property
    def dr(self) -> float:
        return self.D / (self.n1 - 1)

    @property
    def lambda_nyq(self) -> float:
        return math.pi / self.dr

    @property
    def dlambda(self) -> float:
        return self.lambda_nyq / (self.n2 - 1)

    @property
    def n_interior(self) -> int:
        return self.n - 2

    def nodes(self) -> np.ndarray:
        """Local node coordinates ``i * dx`` for ``i = 0..n-1``."""
        return np.arange(self.n) * self.dx

    def radii(self) -> np.ndarray:
        """Radial samples ``k * dr`` for ``k = 0..n1-1``."""
        return np.arange(self.n1) * self.dr

    def lambdas(self) -> np.ndarray:
        """Uniform spectral grid ``l * lambda_nyq / (n2 - 1)``."""
        return np.arange(self.n2) * self.dlambda


def make_grid(n: int, R: float = 1.0) -> GridSpec:
    return GridSpec(n, R)


def _check_index(m) -> tuple[int, int, int]:
    m = tuple(int(v) for v in m)
    if len(m) != 3 or min(m) < 1:
        raise ValueError(f"eigen index must be three integers >= 1, got {m!r}")
    return m


def lambda_of_index(m, R: float = 1.0) -> float:
    """Square root of the Dirichlet eigenvalue, ``(pi / R) * |m|``."""
    m1, m2, m3 = _check_index(m)
    return math.pi / R * math.sqrt(m1 * m1 + m2 * m2 + m3 * m3)


def eigen_norm(R: float) -> float:
    """Prefactor ``(2/R)^{3/2}`` making the sine product unit-norm on the cube."""
    return (2.0 / R) ** 1.5


def eigenfunction_value(m, x, R: float = 1.0) -> float:
    m = _check_index(m)
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise ValueError("x must be a 3-vector")
    if np.any(x < 0) or np.any(x > R):
        raise ValueError(f"point {x.tolist()} lies outside the cube [0, {R}]^3")
    val = eigen_norm(R)
    for mi, xi in zip(m, x):
        # exact zero on the faces instead of sin(pi * m) ~ 1e-16
        if xi == 0.0 or xi == R:
            return 0.0
        val *= math.sin(math.pi * mi * xi / R)
    return val


def eigen_lambdas(n_modes: int, R: float = 1.0) -> np.ndarray:
    """``lambda_m`` on the index box ``1..n_modes`` per axis, shape ``(n_modes,)*3``."""
    k = np.arange(1, n_modes + 1, dtype=float) ** 2
    sq = k[:, None, None] + k[None, :, None] + k[None, None, :]
    return math.pi / R * np.sqrt(sq)


def green_kernel(lam, t):
    """Real free-space Helmholtz kernel ``cos(lam t) / (4 pi t)``.

    ``t = 0`` is the pole of the kernel and is rejected.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("green_kernel is singular at t = 0 (t must be > 0)")
    out = np.cos(np.multiply(lam, t)) / (4.0 * math.pi * t)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class FilterSpec:
    """Spectral apodization: cosine window or a sharp cutoff (``none``)."""

    kind: Literal["cosine", "none"] = "cosine"
    cutoff: float = 1.0

    def __post_init__(self):
        kind = {"cosine-window": "cosine"}.get(self.kind, self.kind)
        if kind not in ("cosine", "none"):
            raise ValueError(f"unknown filter kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if not self.cutoff > 0:
            raise ValueError("filter cutoff must be positive")

    @classmethod
    def for_grid(cls, grid: GridSpec, kind: str = "cosine") -> "FilterSpec":
        return cls(kind, grid.lambda_nyq)


def filter_eta(lam, spec: FilterSpec):
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ValueError("filter is defined for lambda >= 0")
    inside = lam <= spec.cutoff
    if spec.kind == "cosine":
        w = np.where(inside, np.cos(np.pi * lam / (2.0 * spec.cutoff)), 0.0)
    else:
        w = inside.astype(float)
    return w if w.ndim else float(w)
