"""Image-quality metrics against a ground-truth volume."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .recon_fast import VolumeImage


@dataclass(frozen=True)
class Metrics:
    """Comparison of a reconstruction with the truth over an optional box.

    ``trough_depth`` is the deepest dip of the reconstruction below the truth
    where the truth vanishes (the background), as a fraction of the truth's
    maximum.  ``undershoot`` is the same quantity over every masked node, so
    it also picks up the smoothed inner side of each sharp edge.
    """

    rel_l2: float
    max_abs_err: float
    trough_depth: float
    undershoot: float
    mask: tuple[float, float] | None = None


def box_mask(vol: VolumeImage, box) -> np.ndarray:
    """Boolean mask of nodes whose world coordinates lie in ``[lo, hi]^3``."""
    lo, hi = box
    ax = [o + vol.grid.nodes() for o in vol.origin]
    inside = [(a >= lo) & (a <= hi) for a in ax]
    return inside[0][:, None, None] & inside[1][None, :, None] & inside[2][None, None, :]


def compute_metrics(recon: VolumeImage, truth: VolumeImage, mask=None) -> Metrics:
    if recon.grid != truth.grid or recon.origin != truth.origin:
        raise ValueError("recon and truth live on different grids")
    sel = np.ones(recon.values.shape, dtype=bool) if mask is None else box_mask(recon, mask)
    if not sel.any():
        raise ValueError(f"mask {mask} selects no grid nodes")
    r, t = recon.values[sel], truth.values[sel]
    diff = r - t
    norm_t = np.linalg.norm(t)
    rel = np.linalg.norm(diff) / norm_t if norm_t > 0 else float(np.linalg.norm(diff))
    peak = float(t.max())
    scale = peak if peak > 0 else 1.0
    background = t == 0
    dip = -diff[background].min() if background.any() else 0.0
    return Metrics(
        rel_l2=float(rel),
        max_abs_err=float(np.abs(diff).max()),
        trough_depth=float(max(0.0, dip) / scale),
        undershoot=float(max(0.0, -diff.min()) / scale),
        mask=None if mask is None else (float(mask[0]), float(mask[1])),
    )
