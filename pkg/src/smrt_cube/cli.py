"""Command-line driver: phantom -> projections -> noise -> reconstruction -> metrics/slices.

Every subcommand accepts ``--config FILE`` (``key = value`` lines, ``#``
comments); options given on the command line win over the file.
"""
from __future__ import annotations

import argparse
import statistics
import sys
from pathlib import Path

import numpy as np

from .core import FilterSpec, GridSpec
from .forward import Phantom, add_noise, bump_phantom, eight_ball_phantom, project_phantom, read_phantom, write_phantom
from .formats import VOL_MAGIC, export_slice, read_projections, read_volume, write_projections, write_volume
from .metrics import compute_metrics
from .recon_fast import VolumeImage, reconstruct_fast
from .recon_reference import reconstruct_reference

PHANTOMS = {"eight-ball": eight_ball_phantom, "bump": bump_phantom}
STAGES = ("radial_spectra", "face_spectra", "assemble_coefficients", "synthesize_image", "total")


def _floats(text: str, count: int):
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != count:
        raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number list: {text!r}") from None


def _point(text):
    return _floats(text, 3)


def _box(text):
    lo, hi = _floats(text, 2)
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"mask needs lo < hi, got {text!r}")
    return lo, hi


def _sizes(text):
    try:
        sizes = [int(p) for p in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer list: {text!r}") from None
    if not sizes or min(sizes) < 9:
        raise argparse.ArgumentTypeError("bench sizes must be integers >= 9")
    return sizes


def _bool(text) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def read_config(path) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value defaults file")

    p = argparse.ArgumentParser(prog="smrt-cube", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("phantom", parents=[common], help="write a phantom description file")
    s.add_argument("--kind", choices=sorted(PHANTOMS), default="eight-ball")
    s.add_argument("--out", type=Path, required=False)

    s = sub.add_parser("project", parents=[common], help="analytic spherical-mean projections of a phantom")
    s.add_argument("--phantom", type=Path, help="phantom file (default: built-in eight-ball phantom)")
    s.add_argument("--n", type=int, default=129)
    s.add_argument("--R", type=float, default=1.0)
    s.add_argument("--cube-origin", type=_point, default=(0.0, 0.0, 0.0))
    s.add_argument("--exterior", action="store_true", help="allow balls outside the detector cube")
    s.add_argument("--truth-out", type=Path, help="also write the phantom sampled on the grid")
    s.add_argument("--out", type=Path)

    s = sub.add_parser("noise", parents=[common], help="add calibrated Gaussian noise")
    s.add_argument("--in", dest="input", type=Path)
    s.add_argument("--level", type=float, default=0.15)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", type=Path)

    s = sub.add_parser("reconstruct", parents=[common], help="invert projections to a volume")
    s.add_argument("--in", dest="input", type=Path)
    s.add_argument("--method", choices=("fast", "reference"), default="fast")
    s.add_argument("--filter", choices=("cosine", "none"), default="cosine")
    s.add_argument("--m-max", type=int, help="reference method: highest mode per axis")
    s.add_argument("--force", action="store_true", help="reference method: allow large n")
    s.add_argument("--out", type=Path)

    s = sub.add_parser("metrics", parents=[common], help="compare a reconstruction with the truth")
    s.add_argument("--recon", type=Path)
    s.add_argument("--truth", type=Path, help="volume file or phantom file")
    s.add_argument("--mask", type=_box, help="lo,hi box in world coordinates")

    s = sub.add_parser("slice", parents=[common], help="export one axis-aligned slice")
    s.add_argument("--in", dest="input", type=Path)
    s.add_argument("--axis", type=int, choices=(0, 1, 2), default=2)
    s.add_argument("--index", type=int, help="default: middle slice")
    s.add_argument("--format", choices=("pgm", "csv"), default="pgm")
    s.add_argument("--out", type=Path)

    s = sub.add_parser("bench", parents=[common], help="per-stage timing of the fast reconstruction")
    s.add_argument("--sizes", type=_sizes, default=[33, 65, 129])
    s.add_argument("--repeats", type=int, default=3)
    return p


def _apply_config(parser: argparse.ArgumentParser, argv) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    conf = read_config(args.config)
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, value in conf.items():
        action = actions.get(key)
        if action is None or key in ("help", "config"):
            continue  # keys for other subcommands
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = _bool(value)
        else:
            # argparse runs string defaults through the option's type
            defaults[key] = value
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise SystemExit(f"error: missing required option(s): {', '.join('--' + m.replace('_', '-') for m in missing)}")


def _outside(phantom: Phantom, origin, R) -> list[int]:
    bad = []
    for i, b in enumerate(phantom.balls):
        c = np.asarray(b.center) - np.asarray(origin)
        if np.any(c - b.radius < 0) or np.any(c + b.radius > R):
            bad.append(i)
    return bad


def _load_truth(path: Path, like: VolumeImage) -> VolumeImage:
    with open(path, "rb") as fh:
        magic = fh.read(8)
    if magic == VOL_MAGIC:
        return read_volume(path)
    phantom = read_phantom(path)
    return VolumeImage(like.grid, phantom.sample(like.grid, like.origin), like.origin)


def run_bench(sizes, repeats: int = 3, R: float = 1.0, phantom: Phantom | None = None) -> dict[int, dict[str, float]]:
    """Median per-stage wall time of :func:`reconstruct_fast` for each grid size."""
    phantom = phantom or eight_ball_phantom()
    out = {}
    for n in sizes:
        proj = project_phantom(phantom, GridSpec(n, R))
        runs = []
        for _ in range(repeats):
            t = {}
            reconstruct_fast(proj, timings=t)
            runs.append(t)
        out[n] = {k: statistics.median(r[k] for r in runs) for k in STAGES}
    return out


def _cmd_phantom(args):
    phantom = PHANTOMS[args.kind]()
    if args.out is None:
        for b in phantom.balls:
            print(*b.center, b.radius, b.amplitude, b.order)
    else:
        write_phantom(args.out, phantom)


def _cmd_project(args):
    _require(args, "out")
    phantom = read_phantom(args.phantom) if args.phantom else eight_ball_phantom()
    grid = GridSpec(args.n, args.R)
    bad = _outside(phantom, args.cube_origin, args.R)
    if bad and not args.exterior:
        raise SystemExit(f"error: balls {bad} extend outside the detector cube; pass --exterior to allow this")
    proj = project_phantom(phantom, grid, args.cube_origin)
    write_projections(args.out, proj)
    if args.truth_out:
        write_volume(args.truth_out, VolumeImage(grid, phantom.sample(grid, args.cube_origin), args.cube_origin))
    print(f"wrote {args.out}: n={grid.n} n1={grid.n1} detectors={6 * grid.n_interior**2}")


def _cmd_noise(args):
    _require(args, "input", "out")
    write_projections(args.out, add_noise(read_projections(args.input), args.level, args.seed))


def _cmd_reconstruct(args):
    _require(args, "input", "out")
    proj = read_projections(args.input)
    filt = FilterSpec.for_grid(proj.grid, args.filter)
    if args.method == "fast":
        t = {}
        vol = reconstruct_fast(proj, filt, timings=t)
        print(" ".join(f"{k}={t[k]:.3f}s" for k in STAGES))
    else:
        vol = reconstruct_reference(proj, filt, args.m_max, force=args.force)
    write_volume(args.out, vol)


def _cmd_metrics(args):
    _require(args, "recon", "truth")
    recon = read_volume(args.recon)
    m = compute_metrics(recon, _load_truth(args.truth, recon), args.mask)
    print(f"rel_l2={m.rel_l2:.6g}")
    print(f"max_abs_err={m.max_abs_err:.6g}")
    print(f"trough_depth={m.trough_depth:.6g}")
    print(f"undershoot={m.undershoot:.6g}")
    if m.mask is not None:
        print(f"mask={m.mask[0]:g},{m.mask[1]:g}")


def _cmd_slice(args):
    _require(args, "input", "out")
    vol = read_volume(args.input)
    index = vol.grid.n // 2 if args.index is None else args.index
    export_slice(vol, args.axis, index, args.out, args.format)


def _cmd_bench(args):
    res = run_bench(args.sizes, args.repeats)
    print("n".rjust(5) + "".join(s.rjust(24) for s in STAGES))
    for n, t in res.items():
        print(str(n).rjust(5) + "".join(f"{t[s]:24.4f}" for s in STAGES))
    sizes = list(res)
    for a, b in zip(sizes, sizes[1:]):
        print(f"ratio total n={b}/n={a}: {res[b]['total'] / res[a]['total']:.2f}")


COMMANDS = {
    "phantom": _cmd_phantom,
    "project": _cmd_project,
    "noise": _cmd_noise,
    "reconstruct": _cmd_reconstruct,
    "metrics": _cmd_metrics,
    "slice": _cmd_slice,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = _apply_config(parser, argv)
    try:
        COMMANDS[args.command](args)
    except (ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
