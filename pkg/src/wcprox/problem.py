"""Inverse-problem assembly: kernels, degradations, quadratic fidelities, metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .tensor import (
    ConvKernel,
    DimensionError,
    blur_decimation_norm,
    circ_conv,
    circ_conv_adjoint,
    downsample,
    spectral_norm,
    upsample_adjoint,
)

__all__ = [
    "gaussian_kernel",
    "uniform_kernel",
    "make_kernel",
    "parse_kernel_spec",
    "QuadraticFidelity",
    "ZeroRegularizer",
    "QuadraticRegularizer",
    "CompositeProblem",
    "degradation_operator",
    "degrade",
    "psnr",
    "synthetic_image",
    "SYNTHETIC_IMAGES",
    "SR_KERNEL_SIGMAS",
]

# isotropic anti-aliasing kernels used for super-resolution
SR_KERNEL_SIGMAS = (0.7, 1.2, 1.6, 2.0)


def gaussian_kernel(sigma: float, size: int = 25) -> ConvKernel:
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if size < 1 or size % 2 == 0:
        raise ValueError(f"kernel size must be odd and positive, got {size}")
    r = np.arange(size) - size // 2
    u, v = np.meshgrid(r, r, indexing="ij")
    return ConvKernel.normalized(np.exp(-(u ** 2 + v ** 2) / (2.0 * sigma ** 2)))


def uniform_kernel(size: int = 9) -> ConvKernel:
    if size < 1 or size % 2 == 0:
        raise ValueError(f"kernel size must be odd and positive, got {size}")
    return ConvKernel(np.full((size, size), 1.0 / size ** 2))


def make_kernel(kind: str, size: int, sigma: Optional[float] = None) -> ConvKernel:
    """Build a normalized ``"gaussian"`` (needs ``sigma``) or ``"uniform"`` kernel."""
    if kind == "gaussian":
        if sigma is None:
            raise ValueError("gaussian kernel needs sigma")
        return gaussian_kernel(sigma, size)
    if kind == "uniform":
        return uniform_kernel(size)
    raise ValueError(f"unknown kernel kind {kind!r}")


def parse_kernel_spec(spec: str) -> ConvKernel:
    """Parse ``"gaussian:1.6,25"``, ``"uniform:9"`` or ``"identity"``."""
    kind, _, args = spec.partition(":")
    kind = kind.strip().lower()
    vals = [a for a in args.split(",") if a.strip()]
    try:
        if kind == "gaussian":
            sigma = float(vals[0])
            size = int(vals[1]) if len(vals) > 1 else 25
            return gaussian_kernel(sigma, size)
        if kind == "uniform":
            return uniform_kernel(int(vals[0]) if vals else 9)
        if kind == "identity":
            return ConvKernel.identity()
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed kernel spec {spec!r}: {exc}") from exc
    raise ValueError(f"unknown kernel spec {spec!r}")


def degradation_operator(kernel: Optional[ConvKernel] = None, scale: int = 1,
                         method: str = "fft"):
    """Return ``(A, A^T)`` for ``A = S H`` (blur then ``scale``-fold decimation)."""
    if kernel is None:
        kernel = ConvKernel.identity()

    def forward(x):
        bx = circ_conv(x, kernel, method=method)
        return downsample(bx, scale) if scale > 1 else bx

    def adjoint(y):
        up = upsample_adjoint(y, scale) if scale > 1 else y
        return circ_conv_adjoint(up, kernel, method=method)

    return forward, adjoint


@dataclass
class QuadraticFidelity:
    """``f(x) = 0.5 * ||A x - y||^2`` with gradient ``A^T (A x - y)``.

    ``lipschitz`` is ``||A^T A||``.  When omitted it is estimated once by power
    iteration; a supplied value must not be below that estimate.
    :meth:`from_operator` supplies the exact value from the kernel's DFT.
    """

    forward: Callable[[np.ndarray], np.ndarray]
    adjoint: Callable[[np.ndarray], np.ndarray]
    y: np.ndarray
    x_shape: tuple
    lipschitz: Optional[float] = None
    power_iters: int = 500
    estimated_lipschitz: float = field(init=False, default=float("nan"))

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=np.float64)
        self.x_shape = tuple(self.x_shape)
        est = spectral_norm(self.forward, self.adjoint, self.x_shape, iters=self.power_iters)
        self.estimated_lipschitz = est
        if self.lipschitz is None:
            self.lipschitz = est
        elif self.lipschitz < est * (1 - 1e-9):
            raise ValueError(
                f"lipschitz override {self.lipschitz} is below the power-iteration "
                f"estimate {est}")

    @classmethod
    def from_operator(cls, y, kernel: Optional[ConvKernel] = None, scale: int = 1,
                      lipschitz: Optional[float] = None, method: str = "fft"):
        """Deblurring (``scale == 1``) or super-resolution fidelity on observation ``y``."""
        y = np.asarray(y, dtype=np.float64)
        fwd, adj = degradation_operator(kernel, scale, method)
        x_shape = y.shape[:-2] + (y.shape[-2] * scale, y.shape[-1] * scale)
        if lipschitz is None:
            # power iteration stalls on narrow kernels; the symbol gives the exact value
            k = kernel if kernel is not None else ConvKernel.identity()
            lipschitz = blur_decimation_norm(k, x_shape, scale)
        return cls(fwd, adj, y, x_shape, lipschitz)

    @classmethod
    def from_matrix(cls, A, y, lipschitz: Optional[float] = None):
        """Dense fidelity on 1-D vectors, mostly for small test instances."""
        A = np.atleast_2d(np.asarray(A, dtype=np.float64))
        y = np.asarray(y, dtype=np.float64).reshape(A.shape[0])
        return cls(lambda x: A @ x, lambda r: A.T @ r, y, (A.shape[1],), lipschitz)

    @classmethod
    def denoising(cls, y):
        y = np.asarray(y, dtype=np.float64)
        return cls(lambda x: x, lambda r: r, y, y.shape, None, power_iters=1)

    def _check(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != self.x_shape:
            raise DimensionError(f"expected shape {self.x_shape}, got {x.shape}")
        return x

    def residual(self, x) -> np.ndarray:
        return self.forward(self._check(x)) - self.y

    def value(self, x) -> float:
        r = self.residual(x)
        return 0.5 * float(np.vdot(r, r))

    def grad(self, x) -> np.ndarray:
        return self.adjoint(self.residual(x))

    def value_and_grad(self, x):
        r = self.residual(x)
        return 0.5 * float(np.vdot(r, r)), self.adjoint(r)


class ZeroRegularizer:
    weak_convexity = 0.0

    def value(self, x, guess=None) -> float:
        return 0.0

    def prox(self, z, tau: float = 1.0):
        return np.array(z, dtype=np.float64)

    def prox_eval(self, z, tau: float = 1.0):
        return self.prox(z, tau), 0.0


class QuadraticRegularizer:
    """``phi(x) = (c/2) ||x - center||^2``.

    A negative ``c`` gives the extreme ``|c|``-weakly convex function; its prox
    at stepsize ``tau`` exists only for ``tau * |c| < 1``.
    """

    def __init__(self, c: float, center=0.0):
        self.c = float(c)
        self.center = center
        self.weak_convexity = max(0.0, -self.c)

    def value(self, x, guess=None) -> float:
        d = np.asarray(x, dtype=np.float64) - self.center
        return 0.5 * self.c * float(np.vdot(d, d))

    def prox(self, z, tau: float = 1.0):
        denom = 1.0 + tau * self.c
        if denom <= 0:
            raise ValueError(f"prox of {self.c}/2 ||.||^2 undefined at stepsize {tau}")
        return (np.asarray(z, dtype=np.float64) + tau * self.c * self.center) / denom

    def prox_eval(self, z, tau: float = 1.0):
        x = self.prox(z, tau)
        return x, self.value(x)


@dataclass
class CompositeProblem:
    """``F(x) = lam * f(x) + phi(x)``."""

    fidelity: QuadraticFidelity
    regularizer: object
    lam: float

    def __post_init__(self):
        M = self.regularizer.weak_convexity
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError("lam must be positive and finite")
        if not 0 <= M < 1:
            raise ValueError(f"weak convexity constant must lie in [0, 1), got {M}")

    @property
    def L_f(self) -> float:
        return self.fidelity.lipschitz

    @property
    def M(self) -> float:
        return self.regularizer.weak_convexity

    def value(self, x, guess=None) -> float:
        return self.lam * self.fidelity.value(x) + self.regularizer.value(x, guess=guess)


def degrade(x_clean, kernel: Optional[ConvKernel] = None, scale: int = 1,
            noise_sigma: float = 0.0, seed: int = 0) -> np.ndarray:
    """``y = S H x + noise`` with i.i.d. Gaussian noise of std ``noise_sigma``."""
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    fwd, _ = degradation_operator(kernel, scale)
    y = fwd(np.asarray(x_clean, dtype=np.float64))
    if noise_sigma > 0:
        y = y + noise_sigma * np.random.default_rng(seed).standard_normal(y.shape)
    return y


def psnr(x, ref, peak: float = 1.0, clip: bool = False) -> float:
    """Peak signal-to-noise ratio in dB; ``math.inf`` when the images coincide."""
    x = np.asarray(x, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    if x.shape != ref.shape:
        raise DimensionError(f"shape mismatch {x.shape} vs {ref.shape}")
    if peak <= 0:
        raise ValueError("peak must be positive")
    if clip:
        x = np.clip(x, 0.0, peak)
    mse = float(np.mean((x - ref) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak ** 2 / mse)


def _checkerboard(n):
    i, j = np.indices((n, n))
    return np.where(((i // 8) + (j // 8)) % 2 == 0, 0.8, 0.2)


def _bump(n):
    i, j = np.indices((n, n)) - (n - 1) / 2.0
    return 0.1 + 0.8 * np.exp(-(i ** 2 + j ** 2) / (2 * (n / 6.0) ** 2))


def _cartoon(n):
    i, j = np.indices((n, n)) / n
    img = np.full((n, n), 0.3)
    img[(i - 0.35) ** 2 + (j - 0.35) ** 2 < 0.04] = 0.85
    img[(i > 0.55) & (i < 0.85) & (j > 0.2) & (j < 0.75)] = 0.6
    img[(j - i > 0.35) & (j > 0.6)] = 0.1
    return img


SYNTHETIC_IMAGES = {"checkerboard": _checkerboard, "bump": _bump, "cartoon": _cartoon}


def synthetic_image(name: str, size: int = 64) -> np.ndarray:
    """Deterministic grayscale test image in [0, 1]."""
    try:
        return SYNTHETIC_IMAGES[name](size).astype(np.float64)
    except KeyError:
        raise ValueError(f"unknown synthetic image {name!r}; "
                         f"choose from {sorted(SYNTHETIC_IMAGES)}") from None
