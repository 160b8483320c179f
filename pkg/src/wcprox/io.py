"""File formats: raw WCT1 tensors, 8-bit binary PGM, plain-text kernels."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .tensor import ConvKernel

__all__ = [
    "read_tensor",
    "write_tensor",
    "read_pgm",
    "write_pgm",
    "read_kernel",
    "write_kernel",
    "read_image",
]

MAGIC = b"WCT1"
_HEADER = struct.Struct("<4sIII")


class FormatError(ValueError):
    pass


def write_tensor(path, x) -> None:
    """Write ``x`` (``(H, W)`` or ``(P, H, W)``) as a WCT1 file."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 2:
        x = x[None]
    if x.ndim != 3:
        raise FormatError(f"cannot store array of shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise FormatError("tensor contains non-finite values")
    p, h, w = x.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, p, h, w))
        fh.write(np.ascontiguousarray(x, dtype="<f8").tobytes())


def read_tensor(path) -> np.ndarray:
    """Read a WCT1 file into a ``(P, H, W)`` float64 array."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, p, h, w = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    n = p * h * w
    body = data[_HEADER.size:]
    if len(body) != 8 * n:
        raise FormatError(f"{path}: expected {8 * n} data bytes, found {len(body)}")
    return np.frombuffer(body, dtype="<f8").astype(np.float64).reshape(p, h, w)


def _pgm_tokens(data: bytes):
    """Return the four PGM header tokens and the raster offset."""
    pos = 0
    tokens = []
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("truncated PGM header")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def read_pgm(path) -> np.ndarray:
    """Read an 8-bit binary (P5) PGM into an ``(H, W)`` array scaled to [0, 1]."""
    data = Path(path).read_bytes()
    tokens, offset = _pgm_tokens(data)
    if tokens[0] != b"P5":
        raise FormatError(f"{path}: only binary P5 PGM is supported")
    try:
        w, h, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise FormatError(f"{path}: malformed PGM header") from exc
    if not 0 < maxval < 256:
        raise FormatError(f"{path}: only 8-bit PGM is supported (maxval={maxval})")
    raster = data[offset:offset + w * h]
    if len(raster) != w * h:
        raise FormatError(f"{path}: truncated raster")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w).astype(np.float64) / maxval


def write_pgm(path, x) -> None:
    """Write an ``(H, W)`` image in [0, 1] as 8-bit P5 PGM (values are clipped and rounded)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 3 and x.shape[0] == 1:
        x = x[0]
    if x.ndim != 2:
        raise FormatError("PGM export needs a single plane")
    h, w = x.shape
    raster = np.rint(np.clip(x, 0.0, 1.0) * 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(raster.tobytes())


def read_image(path) -> np.ndarray:
    """Load a PGM or WCT1 file; single-plane tensors come back as ``(H, W)``."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        x = read_tensor(path)
        return x[0] if x.shape[0] == 1 else x
    if head[:2] == b"P5":
        return read_pgm(path)
    raise FormatError(f"{path}: unrecognized image format")


def read_kernel(path, normalize: bool = True) -> ConvKernel:
    """Read a kernel file: a ``"H W"`` line followed by H rows of W taps."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise FormatError(f"{path}: empty kernel file")
    try:
        h, w = (int(t) for t in lines[0].split())
        rows = [[float(t) for t in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise FormatError(f"{path}: malformed kernel file") from exc
    if len(rows) != h or any(len(r) != w for r in rows):
        raise FormatError(f"{path}: expected {h} rows of {w} taps")
    taps = np.array(rows)
    return ConvKernel.normalized(taps) if normalize else ConvKernel(taps)


def write_kernel(path, k: ConvKernel) -> None:
    h, w = k.shape
    rows = [" ".join(repr(float(t)) for t in row) for row in k.taps]
    Path(path).write_text(f"{h} {w}\n" + "\n".join(rows) + "\n")
