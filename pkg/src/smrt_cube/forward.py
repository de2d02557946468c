"""Analytic spherical-integral projections of ball phantoms.

A phantom is a sum of radial profiles ``amplitude * (1 - s^2/rho^2)^k`` on
balls of radius ``rho``; ``k = 0`` is the plain characteristic function used
in the published experiment and ``k >= 1`` gives C^(k-1) bumps used for the
convergence and oracle checks.  For any such profile the integral over a
sphere of radius ``r`` whose center is at distance ``d`` from the ball
center reduces to ``(2 pi r / d) * [P(s_hi) - P(s_lo)]`` with the closed-form
primitive ``P(s) = int_0^s phi(t) t dt``, so projections carry no quadrature
error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .core import GridSpec

# (normal axis, value at the face: 1 -> x_i = R, 0 -> x_i = 0), faces 1..6
FACES = ((0, 1), (0, 0), (1, 1), (1, 0), (2, 1), (2, 0))


def face_axes(j: int) -> tuple[int, int]:
    """In-face axes (natural order) of face ``j`` (0-based)."""
    normal = FACES[j][0]
    return tuple(a for a in range(3) if a != normal)


@dataclass(frozen=True)
class Ball:
    center: tuple[float, float, float]
    radius: float
    amplitude: float = 1.0
    order: int = 0

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if len(self.center) != 3:
            raise ValueError("ball center must have three coordinates")
        if not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")
        if int(self.order) != self.order or self.order < 0:
            raise ValueError("profile order must be a non-negative integer")
        object.__setattr__(self, "order", int(self.order))

    def profile(self, s):
        """Radial profile evaluated at distance ``s`` from the center."""
        s = np.asarray(s, dtype=float)
        inside = s <= self.radius
        if self.order == 0:
            return np.where(inside, self.amplitude, 0.0)
        q = np.clip(1.0 - (s / self.radius) ** 2, 0.0, None)
        return np.where(inside, self.amplitude * q**self.order, 0.0)

    def primitive(self, s):
        """``P(s) = int_0^s profile(t) t dt`` for ``0 <= s <= radius``."""
        k = self.order
        q = 1.0 - (np.asarray(s, dtype=float) / self.radius) ** 2
        return self.amplitude * self.radius**2 / (2 * (k + 1)) * (1.0 - q ** (k + 1))

    def integral(self) -> float:
        """Integral of the profile over space."""
        # 4 pi int_0^rho (1 - s^2/rho^2)^k s^2 ds via the Beta function
        k = self.order
        beta = math.gamma(1.5) * math.gamma(k + 1) / math.gamma(k + 2.5)
        return 2.0 * math.pi * self.amplitude * self.radius**3 * beta


@dataclass(frozen=True)
class Phantom:
    balls: tuple[Ball, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "balls", tuple(self.balls))

    def __add__(self, other: "Phantom") -> "Phantom":
        return Phantom(self.balls + other.balls)

    def shifted(self, offset) -> "Phantom":
        off = np.asarray(offset, dtype=float)
        return Phantom(tuple(replace(b, center=tuple(np.add(b.center, off))) for b in self.balls))

    def sample(self, grid: GridSpec, origin=(0.0, 0.0, 0.0)) -> np.ndarray:
        """Phantom values on the ``n^3`` grid of the cube placed at ``origin``."""
        ax = [o + grid.nodes() for o in origin]
        out = np.zeros((grid.n,) * 3)
        for b in self.balls:
            d2 = (
                (ax[0][:, None, None] - b.center[0]) ** 2
                + (ax[1][None, :, None] - b.center[1]) ** 2
                + (ax[2][None, None, :] - b.center[2]) ** 2
            )
            out += b.profile(np.sqrt(d2))
        return out


def eight_ball_phantom() -> Phantom:
    """Eight unit-amplitude balls, radii 0.06-0.13, centers in the plane x3 = 0.5.

    All balls lie within 0.41 of the cube center, so every sphere that meets
    the phantom from a detector on ``[0,1]^3`` or on ``[0.235, 0.765]^3`` has
    radius below the cube diameter of the detector surface.
    """
    spec = [
        (0.50, 0.50, 0.13),
        (0.22, 0.50, 0.10),
        (0.78, 0.55, 0.08),
        (0.50, 0.80, 0.09),
        (0.52, 0.22, 0.07),
        (0.28, 0.26, 0.06),
        (0.74, 0.27, 0.07),
        (0.27, 0.74, 0.08),
    ]
    return Phantom(tuple(Ball((x, y, 0.5), r, 1.0) for x, y, r in spec))


def bump_phantom(center=(0.52, 0.47, 0.5), radius=0.25, amplitude=1.0, order=4) -> Phantom:
    """Single smooth compactly supported bump (default C^3)."""
    return Phantom((Ball(center, radius, amplitude, order),))


def read_phantom(path) -> Phantom:
    """Parse ``cx cy cz radius amplitude [order]`` lines; ``#`` starts a comment line."""
    balls = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (5, 6):
            raise ValueError(f"{path}:{lineno}: expected 5 or 6 fields, got {len(parts)}")
        try:
            cx, cy, cz, rad, amp = (float(p) for p in parts[:5])
            order = int(parts[5]) if len(parts) == 6 else 0
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
        balls.append(Ball((cx, cy, cz), rad, amp, order))
    return Phantom(tuple(balls))


def write_phantom(path, phantom: Phantom) -> None:
    lines = ["# cx cy cz radius amplitude [order]"]
    for b in phantom.balls:
        fields = [*b.center, b.radius, b.amplitude]
        text = " ".join(repr(float(v)) for v in fields)
        if b.order:
            text += f" {b.order}"
        lines.append(text)
    Path(path).write_text("\n".join(lines) + "\n")


def cap_area(d, r, rho):
    """Area of the part of the sphere S(z, r) inside the ball B(c, rho), ``d = |z - c|``."""
    d, r, rho = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (d, r, rho)))
    sphere_inside = d + r <= rho
    disjoint = (r + rho <= d) | (d + rho <= r)
    safe_d = np.where(d > 0, d, 1.0)
    partial = np.pi * r * (rho**2 - (d - r) ** 2) / safe_d
    out = np.where(sphere_inside, 4.0 * np.pi * r**2, np.where(disjoint, 0.0, partial))
    return out if out.ndim else float(out)


def shell_integral(ball: Ball, d, r):
    """Integral of one ball profile over spheres of radius ``r`` at center distance ``d``."""
    d, r = np.broadcast_arrays(np.asarray(d, dtype=float), np.asarray(r, dtype=float))
    rho = ball.radius
    if ball.order == 0:
        return ball.amplitude * cap_area(d, r, rho)
    lo = np.abs(d - r)
    hi = np.minimum(d + r, rho)
    hit = lo < rho
    safe_d = np.where(d > 0, d, 1.0)
    pr = ball.primitive
    val = 2.0 * np.pi * r / safe_d * (pr(hi) - pr(np.minimum(lo, rho)))
    # d -> 0 limit: the sphere sees the constant value profile(r)
    val = np.where(d > 0, val, 4.0 * np.pi * r**2 * ball.profile(r))
    return np.where(hit, val, 0.0)


@dataclass
class ProjectionSet:
    """Spherical integrals ``g(z, r_k)`` for the interior nodes of the six faces.

    ``data`` has shape ``(6, n-2, n-2, n1)``: face ``j`` (order of ``FACES``), the two
    in-face node indices in natural axis order, then the radial index.
    """

    grid: GridSpec
    data: np.ndarray
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        N = self.grid.n_interior
        self.data = np.asarray(self.data, dtype=float)
        if self.data.shape != (6, N, N, self.grid.n1):
            raise ValueError(
                f"projection data must have shape {(6, N, N, self.grid.n1)}, got {self.data.shape}"
            )
        self.origin = tuple(float(o) for o in self.origin)

    def detectors(self, j: int) -> np.ndarray:
        """World coordinates of face ``j`` detectors, shape ``(n-2, n-2, 3)``."""
        return detector_positions(self.grid, j, self.origin)

    def with_data(self, data) -> "ProjectionSet":
        return ProjectionSet(self.grid, data, self.origin)


def detector_positions(grid: GridSpec, j: int, origin=(0.0, 0.0, 0.0)) -> np.ndarray:
    N = grid.n_interior
    inner = grid.nodes()[1:-1]
    normal, side = FACES[j]
    a, b = face_axes(j)
    pos = np.empty((N, N, 3))
    pos[..., normal] = origin[normal] + (grid.R if side else 0.0)
    pos[..., a] = origin[a] + inner[:, None]
    pos[..., b] = origin[b] + inner[None, :]
    return pos


def project_phantom(phantom: Phantom, grid: GridSpec, cube_origin=(0.0, 0.0, 0.0)) -> ProjectionSet:
    """Exact projections of ``phantom`` for detectors on the cube at ``cube_origin``.

    Balls may lie partly or wholly outside the cube; the full spheres are
    integrated either way.
    """
    N, n1 = grid.n_interior, grid.n1
    r = grid.radii()
    data = np.zeros((6, N, N, n1))
    for j in range(6):
        pos = detector_positions(grid, j, cube_origin)
        for b in phantom.balls:
            d2 = (pos[..., 0] - b.center[0]) ** 2 + (pos[..., 1] - b.center[1]) ** 2
            d2 = d2 + (pos[..., 2] - b.center[2]) ** 2
            d = np.sqrt(d2)
            # rows one at a time bound the temporaries at large n
            for a in range(N):
                data[j, a] += shell_integral(b, d[a, :, None], r[None, :])
    return ProjectionSet(grid, data, cube_origin)


def add_noise(proj: ProjectionSet, level: float, seed: int = 0) -> ProjectionSet:
    """Add white Gaussian noise whose global L2 norm is exactly ``level * ||g||``.

    The r = 0 samples stay zero; they carry no information and the
    reconstruction never reads them.
    """
    if level < 0:
        raise ValueError("noise level must be non-negative")
    g = proj.data
    out = g.copy()
    norm_g = np.linalg.norm(g)
    if level == 0 or norm_g == 0:
        return proj.with_data(out)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(g[..., 1:].shape)
    noise *= level * norm_g / np.linalg.norm(noise)
    out[..., 1:] += noise
    return proj.with_data(out)
