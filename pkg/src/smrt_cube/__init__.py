"""Series-expansion inversion of the spherical mean transform with detectors on a cube."""
from .core import FilterSpec, GridSpec, filter_eta, make_grid
from .forward import Ball, Phantom, ProjectionSet, add_noise, bump_phantom, eight_ball_phantom, project_phantom
from .formats import read_projections, read_volume, write_projections, write_volume
from .metrics import Metrics, compute_metrics
from .recon_fast import VolumeImage, reconstruct_fast
from .recon_reference import reconstruct_reference

__all__ = [
    "Ball",
    "FilterSpec",
    "GridSpec",
    "Metrics",
    "Phantom",
    "ProjectionSet",
    "VolumeImage",
    "add_noise",
    "bump_phantom",
    "compute_metrics",
    "eight_ball_phantom",
    "filter_eta",
    "make_grid",
    "project_phantom",
    "read_projections",
    "read_volume",
    "reconstruct_fast",
    "reconstruct_reference",
    "write_projections",
    "write_volume",
]
__version__ = "0.1.0"
