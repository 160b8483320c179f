"""Randomized checks of the inequalities behind the convergence proofs.

Each check samples inputs from a seeded generator, evaluates the margin of one
inequality ``lhs <= rhs`` per trial, normalizes it by ``1 + |rhs|`` and
reports the worst value.  A check passes when ``worst_slack >= -tolerance``.

Functions passed to the checks are *batched*: they receive an array of shape
``(trials, *shape)`` and return one value (or one gradient) per trial.  Wrap a
per-sample callable with :func:`batched`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "PropertyReport",
    "batched",
    "batched_grad",
    "finite_difference_grad",
    "check_weak_convexity_combination",
    "check_subgradient_lower_bound",
    "check_three_points",
    "check_descent_lemma",
    "check_sequence_lemma",
    "write_witnesses",
]


@dataclass
class PropertyReport:
    name: str
    trials: int
    worst_slack: float
    tolerance: float
    passed: bool
    witnesses: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}  {self.name:<28s} trials={self.trials:<6d} "
                f"worst_slack={self.worst_slack:+.3e} (tol {self.tolerance:.0e})")

    def __str__(self):
        return self.line()


def batched(fn: Callable) -> Callable:
    """Turn a per-sample scalar function into a batched one."""
    return lambda X: np.array([fn(x) for x in X], dtype=np.float64)


def batched_grad(fn: Callable) -> Callable:
    return lambda X: np.stack([np.asarray(fn(x), dtype=np.float64) for x in X])


def finite_difference_grad(phi: Callable, h: float = 1e-5) -> Callable:
    """Central-difference gradient of a batched scalar function."""
    def grad(X):
        X = np.asarray(X, dtype=np.float64)
        G = np.empty_like(X)
        flat = X.reshape(X.shape[0], -1)
        Gf = G.reshape(X.shape[0], -1)
        for j in range(flat.shape[1]):
            E = np.zeros_like(flat)
            E[:, j] = h
            up, down = (flat + E).reshape(X.shape), (flat - E).reshape(X.shape)
            Gf[:, j] = (phi(up) - phi(down)) / (2 * h)
        return G
    return grad


def _report(name, lhs, rhs, tol, inputs, max_witnesses=5):
    lhs = np.asarray(lhs, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    slack = (rhs - lhs) / (1.0 + np.abs(rhs))
    worst = float(np.min(slack)) if slack.size else 0.0
    if not np.isfinite(worst):
        worst = -np.inf
    passed = worst >= -tol
    witnesses = []
    bad = np.flatnonzero(~(slack >= -tol))
    for i in bad[np.argsort(slack[bad])][:max_witnesses]:
        w = {key: np.asarray(val[i]).tolist() for key, val in inputs.items()}
        w.update(trial=int(i), lhs=float(lhs[i]), rhs=float(rhs[i]), slack=float(slack[i]))
        witnesses.append(w)
    return PropertyReport(name, int(lhs.size), worst, tol, bool(passed), witnesses)


def _sqnorm(D):
    return (D.reshape(D.shape[0], -1) ** 2).sum(axis=1)


def _inner(A, B):
    return (A.reshape(A.shape[0], -1) * B.reshape(B.shape[0], -1)).sum(axis=1)


def _shape(shape):
    return (shape,) if np.isscalar(shape) else tuple(shape)


def check_weak_convexity_combination(phi: Callable, M: float, shape=1, trials: int = 10_000,
                                     seed: int = 0, low: float = -5.0, high: float = 5.0,
                                     tol: float = 1e-9) -> PropertyReport:
    """``phi(t x + (1-t) y) <= t phi(x) + (1-t) phi(y) + (M/2) t (1-t) ||x - y||^2``."""
    rng = np.random.default_rng(seed)
    shape = _shape(shape)
    X = rng.uniform(low, high, (trials,) + shape)
    Y = rng.uniform(low, high, (trials,) + shape)
    t = rng.uniform(0.0, 1.0, trials)
    tb = t.reshape((trials,) + (1,) * len(shape))
    lhs = phi(tb * X + (1 - tb) * Y)
    rhs = t * phi(X) + (1 - t) * phi(Y) + 0.5 * M * t * (1 - t) * _sqnorm(X - Y)
    return _report("weak-convexity", lhs, rhs, tol, {"x": X, "y": Y, "t": t})


def check_subgradient_lower_bound(phi: Callable, subgrad_at: Optional[Callable], M: float,
                                  shape=1, trials: int = 10_000, seed: int = 0,
                                  low: float = -5.0, high: float = 5.0,
                                  tol: float = 1e-7, h: float = 1e-5) -> PropertyReport:
    """``phi(x) >= phi(y) + <g, x - y> - (M/2) ||x - y||^2`` with ``g`` the gradient at ``y``.

    ``subgrad_at=None`` falls back to central finite differences with step ``h``.
    """
    rng = np.random.default_rng(seed)
    shape = _shape(shape)
    X = rng.uniform(low, high, (trials,) + shape)
    Y = rng.uniform(low, high, (trials,) + shape)
    grad = subgrad_at if subgrad_at is not None else finite_difference_grad(phi, h)
    G = grad(Y)
    # written as lhs <= rhs
    lhs = phi(Y) + _inner(G, X - Y) - 0.5 * M * _sqnorm(X - Y)
    rhs = phi(X)
    return _report("subgradient-lower-bound", lhs, rhs, tol, {"x": X, "y": Y})


def check_three_points(phi: Callable, prox_of_phi: Callable, M: float, shape=1,
                       trials: int = 10_000, seed: int = 0, low: float = -5.0,
                       high: float = 5.0, tol: float = 1e-9) -> PropertyReport:
    """With ``z+ = prox(z)``:
    ``phi(x) + ||x-z||^2/2 >= phi(z+) + ||z+ - z||^2/2 + (1-M)/2 ||x - z+||^2``.
    """
    rng = np.random.default_rng(seed)
    shape = _shape(shape)
    X = rng.uniform(low, high, (trials,) + shape)
    Z = rng.uniform(low, high, (trials,) + shape)
    Zp = prox_of_phi(Z)
    lhs = phi(Zp) + 0.5 * _sqnorm(Zp - Z) + 0.5 * (1 - M) * _sqnorm(X - Zp)
    rhs = phi(X) + 0.5 * _sqnorm(X - Z)
    return _report("three-points", lhs, rhs, tol, {"x": X, "z": Z})


def _smooth_directions(rng, trials, shape):
    """Random constant-plus-low-frequency fields; these excite the top of a blur's spectrum."""
    D = np.empty((trials,) + shape)
    D[:] = rng.standard_normal((trials,) + (1,) * len(shape))
    if len(shape) >= 2:
        h, w = shape[-2:]
        i = np.arange(h).reshape(h, 1)
        j = np.arange(w).reshape(1, w)
        phase = rng.uniform(0, 2 * np.pi, (trials, 2))
        amp = rng.standard_normal((trials, 2)) * 0.3
        low_freq = (amp[:, :1, None] * np.cos(2 * np.pi * i / h + phase[:, :1, None])
                    + amp[:, 1:, None] * np.cos(2 * np.pi * j / w + phase[:, 1:, None]))
        D += low_freq.reshape((trials,) + (1,) * (len(shape) - 2) + (h, w))
    return D


def check_descent_lemma(f: Callable, grad_f: Callable, L_f: float, shape,
                        trials: int = 10_000, seed: int = 0, scale: float = 1.0,
                        tol: float = 1e-9) -> PropertyReport:
    """``f(x) <= f(y) + <grad f(y), x - y> + (L_f/2) ||x - y||^2``.

    Half of the differences ``x - y`` are white noise, half are smooth
    fields, so both ends of an operator's spectrum are probed.
    """
    rng = np.random.default_rng(seed)
    shape = _shape(shape)
    Y = scale * rng.standard_normal((trials,) + shape)
    half = trials // 2
    D = np.concatenate([rng.standard_normal((half,) + shape),
                        _smooth_directions(rng, trials - half, shape)])
    D *= scale * rng.uniform(0.01, 1.0, (trials,) + (1,) * len(shape))
    X = Y + D
    lhs = f(X)
    rhs = f(Y) + _inner(grad_f(Y), D) + 0.5 * L_f * _sqnorm(D)
    return _report("descent-lemma", lhs, rhs, tol, {"x": X, "y": Y})


def check_sequence_lemma(a: Sequence[float], b: Sequence[float],
                         tol: float = 1e-9) -> PropertyReport:
    """Telescoping lemma: given ``b_n >= 0`` and ``a_{n+1} + b_n <= a_n``, the
    sequence ``a`` is nonincreasing and ``sum_{n<N} b_n <= a_0 - min(a)``.

    Every hypothesis and conclusion is checked; ``len(b)`` may be ``len(a) - 1``.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)[: max(len(a) - 1, 0)]
    n = len(b)
    lhs, rhs, idx, kind = [], [], [], []

    def add(l, r, label):
        lhs.extend(l)
        rhs.extend(r)
        idx.extend(range(len(l)))
        kind.extend([label] * len(l))

    add(-b, np.zeros(n), "b_nonnegative")
    add(a[1:n + 1] + b, a[:n], "recurrence")
    add(a[1:], a[:-1], "monotone")
    add(np.cumsum(b), np.full(n, a[0] - a.min()) if len(a) else [], "partial_sums")
    if not lhs:
        return PropertyReport("sequence-lemma", 0, 0.0, tol, True, [])
    return _report("sequence-lemma", lhs, rhs, tol,
                   {"n": np.array(idx), "condition": np.array(kind)})


def write_witnesses(path, reports: Sequence[PropertyReport]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["property", "trial", "lhs", "rhs", "slack", "inputs"])
        for r in reports:
            for wit in r.witnesses:
                inputs = {k: v for k, v in wit.items()
                          if k not in ("trial", "lhs", "rhs", "slack")}
                w.writerow([r.name, wit["trial"], repr(wit["lhs"]), repr(wit["rhs"]),
                            repr(wit["slack"]), repr(inputs)])
