"""Binary volume/projection files and slice export.

Both binary formats are little-endian throughout and store arrays with the
first index varying fastest.

Volume (``SMRTVOL1``)::

    magic[8] | n:u64 | R:f64 | flags:u64 | [origin:3*f64 if flags & 1] | n^3 * f64

Projections (``SMRTPRJ1``)::

    magic[8] | n:u64 | n1:u64 | R:f64 | origin:3*f64
    6 x ( face_tag:u64 | (n-2)^2 * n1 * f64 )

Face tags are 1..6 in the order of ``forward.FACES``; blocks are placed by tag on
read, so a reordered file still decodes to the right faces.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .core import GridSpec
from .forward import ProjectionSet
from .recon_fast import VolumeImage

VOL_MAGIC = b"SMRTVOL1"
PRJ_MAGIC = b"SMRTPRJ1"
_F8 = np.dtype("<f8")
MAX_N = 1 << 16
_ORIGIN_FLAG = 1


class FormatError(ValueError):
    """Malformed or truncated volume/projection file."""


def _check_n(n: int, offset: int) -> None:
    if not 3 <= n <= MAX_N:
        raise FormatError(f"grid size n={n} at offset {offset} is outside [3, {MAX_N}]")


def write_volume(path, vol: VolumeImage) -> None:
    has_origin = any(vol.origin)
    header = VOL_MAGIC + struct.pack("<QdQ", vol.grid.n, vol.grid.R, _ORIGIN_FLAG if has_origin else 0)
    if has_origin:
        header += struct.pack("<3d", *vol.origin)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.asarray(vol.values, dtype=_F8).tobytes(order="F"))


def read_volume(path) -> VolumeImage:
    buf = Path(path).read_bytes()
    if buf[:8] != VOL_MAGIC:
        raise FormatError(f"bad magic {buf[:8]!r} at offset 0 (expected {VOL_MAGIC!r})")
    if len(buf) < 32:
        raise FormatError(f"truncated header: file ends at offset {len(buf)}, header needs 32 bytes")
    n, R, flags = struct.unpack_from("<QdQ", buf, 8)
    _check_n(n, 8)
    pos = 32
    origin = (0.0, 0.0, 0.0)
    if flags & _ORIGIN_FLAG:
        if len(buf) < pos + 24:
            raise FormatError(f"truncated origin block at offset {pos}")
        origin = struct.unpack_from("<3d", buf, pos)
        pos += 24
    need = n**3 * 8
    if len(buf) - pos != need:
        raise FormatError(f"payload at offset {pos} has {len(buf) - pos} bytes, expected {need}")
    values = np.frombuffer(buf, dtype=_F8, count=n**3, offset=pos).reshape((n, n, n), order="F")
    return VolumeImage(GridSpec(n, R), values.astype(float), origin)


def write_projections(path, proj: ProjectionSet) -> None:
    g = proj.grid
    with open(path, "wb") as fh:
        fh.write(PRJ_MAGIC + struct.pack("<QQd3d", g.n, g.n1, g.R, *proj.origin))
        for j in range(6):
            fh.write(struct.pack("<Q", j + 1))
            fh.write(np.asarray(proj.data[j], dtype=_F8).tobytes(order="F"))


def read_projections(path) -> ProjectionSet:
    buf = Path(path).read_bytes()
    if buf[:8] != PRJ_MAGIC:
        raise FormatError(f"bad magic {buf[:8]!r} at offset 0 (expected {PRJ_MAGIC!r})")
    head = struct.calcsize("<QQd3d")
    if len(buf) < 8 + head:
        raise FormatError(f"truncated header: file ends at offset {len(buf)}")
    n, n1, R, *origin = struct.unpack_from("<QQd3d", buf, 8)
    _check_n(n, 8)
    grid = GridSpec(n, R)
    if n1 != grid.n1:
        raise FormatError(f"radial sample count n1={n1} at offset 16 does not match n={n} (expected {grid.n1})")
    N = n - 2
    count = N * N * n1
    pos = 8 + head
    block = 8 + count * 8
    if len(buf) - pos != 6 * block:
        raise FormatError(f"payload at offset {pos} has {len(buf) - pos} bytes, expected {6 * block}")
    data = np.empty((6, N, N, n1))
    seen = set()
    for _ in range(6):
        (tag,) = struct.unpack_from("<Q", buf, pos)
        if not 1 <= tag <= 6 or tag in seen:
            raise FormatError(f"invalid or repeated face tag {tag} at offset {pos}")
        seen.add(tag)
        arr = np.frombuffer(buf, dtype=_F8, count=count, offset=pos + 8)
        data[tag - 1] = arr.reshape((N, N, n1), order="F")
        pos += block
    return ProjectionSet(grid, data, tuple(origin))


def volume_slice(vol: VolumeImage, axis: int, index: int) -> np.ndarray:
    if axis not in (0, 1, 2):
        raise ValueError(f"axis must be 0, 1 or 2, got {axis}")
    n = vol.grid.n
    if not 0 <= index < n:
        raise IndexError(f"slice index {index} out of range [0, {n})")
    return np.take(vol.values, index, axis=axis)


def export_slice(vol: VolumeImage, axis: int, index: int, path, fmt: str = "pgm") -> Path:
    """Write one axis-aligned slice as 16-bit PGM (plus a scaling sidecar) or CSV.

    PGM rows follow the first remaining axis.  The sidecar ``<path>.txt``
    records the linear map: ``value = min + pixel / 65535 * (max - min)``.
    """
    sl = volume_slice(vol, axis, index)
    path = Path(path)
    if fmt == "csv":
        np.savetxt(path, sl, delimiter=",", fmt="%.17g")
        return path
    if fmt != "pgm":
        raise ValueError(f"unknown slice format {fmt!r}")
    lo, hi = float(sl.min()), float(sl.max())
    if hi > lo:
        pix = np.rint((sl - lo) / (hi - lo) * 65535.0)
    else:
        pix = np.full(sl.shape, 32768.0)
    rows, cols = sl.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n65535\n".encode("ascii"))
        fh.write(pix.astype(">u2").tobytes())
    Path(str(path) + ".txt").write_text(
        f"axis={axis}\nindex={index}\nmin={lo!r}\nmax={hi!r}\n"
    )
    return path


def read_pgm(path) -> np.ndarray:
    """Read a binary PGM (8- or 16-bit) such as the ones :func:`export_slice` writes."""
    buf = Path(path).read_bytes()
    fields, pos = [], 0
    while len(fields) < 4:
        while pos < len(buf) and buf[pos : pos + 1].isspace():
            pos += 1
        end = pos
        while end < len(buf) and not buf[end : end + 1].isspace():
            end += 1
        if end == pos:
            raise FormatError(f"truncated PGM header at offset {pos}")
        fields.append(buf[pos:end])
        pos = end
    if fields[0] != b"P5":
        raise FormatError(f"bad PGM magic {fields[0]!r} at offset 0")
    cols, rows, maxval = (int(f) for f in fields[1:])
    # exactly one whitespace byte separates the header from the pixels
    pos += 1
    dtype = np.dtype(">u2" if maxval > 255 else "u1")
    if len(buf) - pos != rows * cols * dtype.itemsize:
        raise FormatError(f"PGM pixel data at offset {pos} has the wrong length")
    return np.frombuffer(buf, dtype=dtype, offset=pos).reshape(rows, cols)
