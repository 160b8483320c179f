"""Gradient-step denoisers ``D = Id - gamma * grad g`` built from analytic potentials.

For ``gamma * L_g < 1`` the denoiser is the (unit-step) proximal operator of
the induced potential

    phi_hat(x) = gamma * g(u) - 0.5 * ||u - x||^2,    u = D^{-1}(x),

which is ``gamma L_g / (gamma L_g + 1)``-weakly convex.  The additive
constant relating ``phi_hat`` to the exact prox potential is taken as zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

__all__ = [
    "QuadraticPotential",
    "CosinePotential",
    "GradientStepDenoiser",
    "InducedPotential",
    "InversionError",
    "RadiusTooSmallError",
    "builtin_potential",
    "parse_denoiser_spec",
    "weak_convexity_constant",
    "prox_oracle_1d",
]


class InversionError(RuntimeError):
    """Fixed-point inversion of the denoiser did not reach its tolerance."""


class RadiusTooSmallError(RuntimeError):
    """The brute-force prox search found its minimizer on the grid boundary."""


def _sum(a: np.ndarray, batch: bool):
    if batch:
        return a.reshape(a.shape[0], -1).sum(axis=1)
    return float(a.sum())


def _norm(a: np.ndarray, batch: bool):
    if batch:
        return np.sqrt((a.reshape(a.shape[0], -1) ** 2).sum(axis=1))
    return float(np.linalg.norm(a))


@dataclass(frozen=True)
class QuadraticPotential:
    """``g(x) = (L_g / 2) ||x - c||^2``; Lipschitz constant of the gradient is exactly ``L_g``."""

    lg: float
    center: float = 0.0

    def __post_init__(self):
        if not 0 < self.lg < 1:
            raise ValueError(f"quadratic potential needs 0 < Lg < 1, got {self.lg}")

    @property
    def lipschitz(self) -> float:
        return self.lg

    def value(self, x, batch: bool = False):
        d = np.asarray(x, dtype=np.float64) - self.center
        return _sum(0.5 * self.lg * d * d, batch)

    def grad(self, x):
        return self.lg * (np.asarray(x, dtype=np.float64) - self.center)

    def curvature_bounds(self):
        return self.lg, self.lg


@dataclass(frozen=True)
class CosinePotential:
    """``g(x) = a * sum(1 - cos x_i) + (eps / 2) ||x||^2``.

    Nonconvex when ``a > eps``, coercive and bounded below by 0.  The second
    derivative ``a cos x + eps`` ranges over ``[eps - a, eps + a]``, so the
    gradient is exactly ``(a + eps)``-Lipschitz.
    """

    a: float
    eps: float

    def __post_init__(self):
        if not (self.a > 0 and self.eps > 0 and self.a + self.eps < 1):
            raise ValueError(f"cosine potential needs a > 0, eps > 0, a + eps < 1; "
                             f"got a={self.a}, eps={self.eps}")

    @property
    def lipschitz(self) -> float:
        return self.a + self.eps

    def value(self, x, batch: bool = False):
        x = np.asarray(x, dtype=np.float64)
        return _sum(self.a * (1.0 - np.cos(x)) + 0.5 * self.eps * x * x, batch)

    def grad(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.a * np.sin(x) + self.eps * x

    def curvature_bounds(self):
        return self.eps - self.a, self.eps + self.a


def builtin_potential(kind: str, **params) -> "GradientStepDenoiser":
    """Denoiser from a builtin potential: ``quadratic(lg, center)`` or ``cosine(a, eps)``.

    ``gamma`` (default 1) and ``sigma`` (a label only) may be passed too.
    """
    gamma = float(params.pop("gamma", 1.0))
    sigma = params.pop("sigma", None)
    if kind == "quadratic":
        pot = QuadraticPotential(float(params.pop("lg")), float(params.pop("center", 0.0)))
    elif kind == "cosine":
        pot = CosinePotential(float(params.pop("a")), float(params.pop("eps")))
    else:
        raise ValueError(f"unknown potential {kind!r}")
    if params:
        raise ValueError(f"unexpected parameters for {kind}: {sorted(params)}")
    return GradientStepDenoiser(pot, gamma=gamma, sigma=sigma)


_ALIASES = {"lg": "lg", "c": "center", "center": "center", "a": "a", "eps": "eps",
            "gamma": "gamma", "sigma": "sigma"}


def parse_denoiser_spec(spec: str) -> "GradientStepDenoiser":
    """Parse ``"quadratic:Lg=0.5,c=0"`` or ``"cosine:a=0.6,eps=0.1,gamma=0.5"``."""
    kind, _, args = spec.partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in args.split(","))):
        key, eq, val = item.partition("=")
        key = key.strip().lower()
        if not eq or key not in _ALIASES:
            raise ValueError(f"malformed denoiser parameter {item!r} in {spec!r}")
        params[_ALIASES[key]] = val.strip() if key == "sigma" else float(val)
    try:
        return builtin_potential(kind.strip().lower(), **params)
    except KeyError as exc:
        raise ValueError(f"denoiser spec {spec!r} is missing {exc}") from None


def weak_convexity_constant(lg: float, gamma: float = 1.0) -> float:
    """``gamma L_g / (gamma L_g + 1)``."""
    t = gamma * lg
    return t / (t + 1.0)


@dataclass(frozen=True)
class GradientStepDenoiser:
    potential: object
    gamma: float = 1.0
    sigma: object = None  # label for trace metadata only

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.gamma * self.lg >= 1.0:
            raise ValueError("gamma * L_g must be < 1")

    @property
    def lg(self) -> float:
        return self.potential.lipschitz

    @property
    def lg_eff(self) -> float:
        return self.gamma * self.lg

    def relaxed(self, gamma: float) -> "GradientStepDenoiser":
        return replace(self, gamma=gamma)

    def weak_convexity_constant(self) -> float:
        return weak_convexity_constant(self.lg, self.gamma)

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if self.gamma == 0.0:
            return x.copy()
        return x - self.gamma * self.potential.grad(x)

    __call__ = apply

    def invert(self, z, tol: float = 1e-12, guess=None, batch: bool = False) -> np.ndarray:
        """Solve ``x - gamma grad g(x) = z`` by the contraction ``x <- z + gamma grad g(x)``.

        Stops once the update norm drops below ``tol * (1 + ||z||)`` (per sample
        when ``batch``), which bounds the residual ``||D(x) - z||`` by
        ``gamma L_g`` times that threshold.
        """
        z = np.asarray(z, dtype=np.float64)
        if tol <= 0:
            raise ValueError("tol must be positive")
        if self.gamma == 0.0:
            return z.copy()
        q = self.lg_eff
        cap = math.ceil(math.log(tol) / math.log(q)) + 50
        thresh = tol * (1.0 + _norm(z, batch))
        x = z if guess is None else np.asarray(guess, dtype=np.float64)
        for _ in range(cap):
            x_new = z + self.gamma * self.potential.grad(x)
            step = _norm(x_new - x, batch)
            x = x_new
            if np.all(step <= thresh):
                return x
        raise InversionError(f"fixed-point inversion did not converge in {cap} iterations "
                             f"(last update {np.max(step):.3e})")

    def induced(self) -> "InducedPotential":
        return InducedPotential(self)


@dataclass(frozen=True)
class InducedPotential:
    """The weakly convex potential whose unit-step prox is ``source.apply``.

    Also usable as a regularizer in the solvers (prox at stepsize 1 only).
    """

    source: GradientStepDenoiser
    tol: float = 1e-12

    @property
    def weak_convexity(self) -> float:
        return self.source.weak_convexity_constant()

    M = weak_convexity

    def value(self, x, preimage=None, guess=None, batch: bool = False):
        """``phi_hat(x)``.

        A known ``preimage`` (with ``apply(preimage) == x``) skips the inversion.
        """
        x = np.asarray(x, dtype=np.float64)
        d = self.source
        if d.gamma == 0.0:
            return np.zeros(x.shape[0]) if batch else 0.0
        u = d.invert(x, self.tol, guess=guess, batch=batch) if preimage is None else preimage
        r = u - x
        return d.gamma * d.potential.value(u, batch=batch) - 0.5 * _sum(r * r, batch)

    def value_from_preimage(self, u, batch: bool = False):
        u = np.asarray(u, dtype=np.float64)
        return self.value(self.source.apply(u), preimage=u, batch=batch)

    def grad(self, x, guess=None, batch: bool = False) -> np.ndarray:
        """Gradient ``D^{-1}(x) - x`` (the prox optimality condition)."""
        x = np.asarray(x, dtype=np.float64)
        return self.source.invert(x, self.tol, guess=guess, batch=batch) - x

    def prox(self, z, tau: float = 1.0) -> np.ndarray:
        if tau != 1.0:
            raise ValueError("the induced potential only has a tractable prox at stepsize 1")
        return self.source.apply(z)

    def prox_eval(self, z, tau: float = 1.0):
        x = self.prox(z, tau)
        return x, self.value(x, preimage=np.asarray(z, dtype=np.float64))


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def prox_oracle_1d(phi: Callable[[np.ndarray], np.ndarray], x: float, radius: float = 10.0,
                   grid: int = 100_000, tol: float = 1e-10) -> float:
    """Brute-force ``argmin_z phi(z) + (z - x)^2 / 2`` on ``[x - radius, x + radius]``.

    ``phi`` must accept a 1-D array and return elementwise values.  The grid
    minimizer is refined by golden-section search over its two neighbouring
    cells down to an interval of width ``tol``.
    """
    if grid < 1000:
        raise ValueError("grid must have at least 1000 points")

    def obj(z):
        z = np.asarray(z, dtype=np.float64)
        return np.asarray(phi(z), dtype=np.float64) + 0.5 * (z - x) ** 2

    zs = np.linspace(x - radius, x + radius, grid + 1)
    vals = obj(zs)
    i = int(np.argmin(vals))
    if i == 0 or i == grid:
        raise RadiusTooSmallError(f"minimizer on the boundary of [{zs[0]}, {zs[-1]}]")
    lo, hi = zs[i - 1], zs[i + 1]
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = obj(np.array([c]))[0], obj(np.array([d]))[0]
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = obj(np.array([c]))[0]
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = obj(np.array([d]))[0]
    return 0.5 * (lo + hi)
