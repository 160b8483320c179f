"""Dense tensor operators: circular convolution, s-fold sampling, power iteration.

Images are plain ``numpy.ndarray`` objects of float64.  A single plane is
``(H, W)``; multi-plane images are ``(P, H, W)`` and every operator acts on the
last two axes, plane by plane.  Abstract vectors (1-D arrays) are accepted
wherever an operator does not need spatial structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "ConvKernel",
    "DimensionError",
    "as_image",
    "circ_conv",
    "circ_conv_adjoint",
    "downsample",
    "upsample_adjoint",
    "upsample_replicate",
    "spectral_norm",
    "blur_decimation_norm",
    "adjoint_mismatch",
]


class DimensionError(ValueError):
    """Raised when operand shapes are incompatible."""


def as_image(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim < 2:
        raise DimensionError(f"expected an (H, W) or (P, H, W) array, got shape {x.shape}")
    if x.size == 0:
        raise DimensionError("empty image")
    return x


@dataclass(frozen=True)
class ConvKernel:
    """A 2-D convolution kernel with odd dimensions; its origin is the center tap.

    Use :meth:`normalized` for restoration kernels (taps summing to one).
    The raw constructor keeps the taps as given.
    """

    taps: np.ndarray

    def __post_init__(self):
        taps = np.array(self.taps, dtype=np.float64)
        if taps.ndim != 2:
            raise DimensionError("kernel taps must be a 2-D array")
        if taps.shape[0] % 2 == 0 or taps.shape[1] % 2 == 0:
            raise DimensionError(f"kernel dimensions must be odd, got {taps.shape}")
        if not np.all(np.isfinite(taps)):
            raise ValueError("kernel taps must be finite")
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)

    @classmethod
    def normalized(cls, taps) -> "ConvKernel":
        taps = np.asarray(taps, dtype=np.float64)
        total = taps.sum()
        if total == 0:
            raise ValueError("cannot normalize a kernel whose taps sum to zero")
        return cls(taps / total)

    @classmethod
    def identity(cls) -> "ConvKernel":
        return cls(np.ones((1, 1)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.taps.shape

    @property
    def center(self) -> tuple[int, int]:
        return self.taps.shape[0] // 2, self.taps.shape[1] // 2

    def flipped(self) -> "ConvKernel":
        return ConvKernel(self.taps[::-1, ::-1])

    def transfer_function(self, height: int, width: int) -> np.ndarray:
        """DFT of the kernel zero-padded to ``(height, width)`` with its center at index (0, 0)."""
        _check_fits(self, (height, width))
        pad = np.zeros((height, width))
        kh, kw = self.shape
        pad[:kh, :kw] = self.taps
        pad = np.roll(pad, (-(kh // 2), -(kw // 2)), axis=(0, 1))
        return np.fft.fft2(pad)


def _check_fits(k: ConvKernel, hw: Sequence[int]) -> None:
    if k.shape[0] > hw[0] or k.shape[1] > hw[1]:
        raise DimensionError(f"kernel {k.shape} is larger than image {tuple(hw)}")


def _conv(x: np.ndarray, k: ConvKernel, method: str, adjoint: bool) -> np.ndarray:
    x = as_image(x)
    _check_fits(k, x.shape[-2:])
    if method == "fft":
        otf = k.transfer_function(*x.shape[-2:])
        if adjoint:
            otf = np.conj(otf)
        return np.real(np.fft.ifft2(np.fft.fft2(x, axes=(-2, -1)) * otf, axes=(-2, -1)))
    if method != "spatial":
        raise ValueError(f"unknown convolution method {method!r}")
    ch, cw = k.center
    sign = -1 if adjoint else 1
    out = np.zeros_like(x)
    for a in range(k.shape[0]):
        for b in range(k.shape[1]):
            t = k.taps[a, b]
            if t != 0.0:
                out += t * np.roll(x, (sign * (a - ch), sign * (b - cw)), axis=(-2, -1))
    return out


def circ_conv(x, k: ConvKernel, method: str = "spatial") -> np.ndarray:
    """Circular convolution ``y[i, j] = sum_{u,v} k[u, v] x[(i-u) % H, (j-v) % W]``.

    ``u, v`` are offsets from the kernel center.  ``method="fft"`` gives the
    same result up to rounding and is much faster for large kernels.
    """
    return _conv(x, k, method, adjoint=False)


def circ_conv_adjoint(y, k: ConvKernel, method: str = "spatial") -> np.ndarray:
    """Circular correlation with ``k``; the exact adjoint of :func:`circ_conv`."""
    return _conv(y, k, method, adjoint=True)


def _check_divisible(shape, s: int) -> None:
    if s < 1:
        raise ValueError("sampling factor must be >= 1")
    if shape[-2] % s or shape[-1] % s:
        raise DimensionError(f"image dimensions {shape[-2:]} are not divisible by {s}")


def downsample(x, s: int) -> np.ndarray:
    """Keep the pixels whose row and column indices are multiples of ``s``."""
    x = as_image(x)
    _check_divisible(x.shape, s)
    return x[..., ::s, ::s].copy()


def upsample_adjoint(y, s: int) -> np.ndarray:
    """Adjoint of :func:`downsample`: scatter ``y`` onto the kept pixels, zeros elsewhere."""
    y = as_image(y)
    out = np.zeros(y.shape[:-2] + (y.shape[-2] * s, y.shape[-1] * s))
    out[..., ::s, ::s] = y
    return out


def upsample_replicate(y, s: int) -> np.ndarray:
    """Zero-order (pixel replication) upsampling."""
    y = as_image(y)
    return np.repeat(np.repeat(y, s, axis=-2), s, axis=-1)


Operator = Callable[[np.ndarray], np.ndarray]


def spectral_norm(
    apply: Operator,
    apply_adjoint: Operator,
    dims: Sequence[int],
    iters: int = 500,
    seed: int = 0,
) -> float:
    """Largest eigenvalue of ``A^T A`` by power iteration.

    The start vector is drawn from ``seed``; the returned value is the
    Rayleigh quotient ``<v, A^T A v>`` of the last normalized iterate, which
    is nondecreasing in ``iters`` for a PSD operator.

    Returns 0.0 for the zero operator.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(tuple(dims))
    v /= np.linalg.norm(v)
    rq = 0.0
    for _ in range(iters):
        w = apply_adjoint(apply(v))
        rq = float(np.vdot(v, w))
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
    return max(rq, 0.0)


def blur_decimation_norm(k: ConvKernel, shape: Sequence[int], s: int = 1) -> float:
    """Exact ``||A^T A||`` for ``A = S H`` on images of ``shape`` (last two axes).

    ``A A^T`` is circulant on the coarse grid; its symbol averages ``|K|^2``
    over the ``s * s`` aliases of each coarse frequency.
    """
    h, w = shape[-2:]
    _check_divisible((h, w), s)
    p = np.abs(k.transfer_function(h, w)) ** 2
    p = p.reshape(s, h // s, s, w // s).mean(axis=(0, 2))
    return float(p.max())


def adjoint_mismatch(apply: Operator, apply_adjoint: Operator, x, y) -> float:
    """Relative gap ``|<Ax, y> - <x, A^T y>| / (|Ax||y| + |x||A^T y|)`` of an operator pair."""
    ax = apply(x)
    aty = apply_adjoint(y)
    lhs = float(np.vdot(ax, y))
    rhs = float(np.vdot(x, aty))
    scale = np.linalg.norm(ax) * np.linalg.norm(y) + np.linalg.norm(x) * np.linalg.norm(aty)
    if scale == 0:
        return abs(lhs - rhs)
    return abs(lhs - rhs) / scale
