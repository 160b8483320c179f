"""Proximal gradient descent (PGD), relaxed PGD (alpha-PGD) and their plug-and-play forms.

PGD::

    x_{k+1} = prox_{tau phi}(x_k - tau lam grad f(x_k))

alpha-PGD (``alpha = 1`` recovers PGD)::

    q_{k+1} = (1 - alpha) y_k + alpha x_k
    x_{k+1} = prox_{tau phi}(x_k - tau lam grad f(q_{k+1}))
    y_{k+1} = (1 - alpha) y_k + alpha x_{k+1}

The plug-and-play variants use a gradient-step denoiser as the unit-step prox
of its induced potential, so ``tau`` is fixed to 1.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .denoiser import GradientStepDenoiser, InducedPotential
from .problem import CompositeProblem, QuadraticFidelity, psnr

__all__ = [
    "SolverConfig",
    "IterTrace",
    "BoundCheck",
    "BoundViolationError",
    "NumericalInstabilityError",
    "validate_pgd",
    "validate_pnp_pgd",
    "validate_alpha_pgd",
    "alpha_pgd_constants",
    "pnp_alpha_interval",
    "run_pgd",
    "run_alpha_pgd",
    "run_pnp_pgd",
    "run_pnp_alpha_pgd",
    "residual_rate_check",
    "RateCheck",
]

ALGORITHMS = ("pgd", "alpha_pgd", "pnp_pgd", "pnp_alpha_pgd")
BOUND_POLICIES = ("strict", "refined", "override")

# absorbs rounding when a parameter sits exactly on its safety-scaled limit
_ROUND = 1e-12


class BoundViolationError(ValueError):
    def __init__(self, check: "BoundCheck"):
        super().__init__(check.detail)
        self.check = check


class NumericalInstabilityError(FloatingPointError):
    pass


@dataclass
class SolverConfig:
    algorithm: str = "pgd"
    lam: float = 1.0
    tau: float = 1.0
    alpha: float = 1.0
    gamma: Optional[float] = None
    max_iters: int = 400
    residual_tol: float = 1e-12
    bound_policy: str = "strict"
    safety: float = 0.99
    seed: int = 0
    timing: bool = False

    def __post_init__(self):
        self.algorithm = self.algorithm.replace("-", "_")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.bound_policy not in BOUND_POLICIES:
            raise ValueError(f"unknown bound policy {self.bound_policy!r}")
        if not 0 < self.safety <= 1:
            raise ValueError("safety must lie in (0, 1]")
        if self.lam <= 0 or self.tau <= 0:
            raise ValueError("lam and tau must be positive")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.gamma is not None and not 0 <= self.gamma <= 1:
            raise ValueError("gamma must lie in [0, 1]")
        if self.algorithm.startswith("pnp"):
            # a proximal denoiser is only a prox at unit stepsize
            self.tau = 1.0


@dataclass
class BoundCheck:
    ok: bool
    limit: float
    detail: str

    def __bool__(self):
        return self.ok


def _inv(x: float) -> float:
    return math.inf if x == 0 else 1.0 / x


def validate_pgd(lam: float, L_f: float, M: float, tau: float, safety: float = 0.99) -> BoundCheck:
    """Stepsize condition ``tau < 2 / (lam L_f + M)``; ``limit`` is the unscaled bound."""
    tau_max = 2.0 * _inv(lam * L_f + M)
    ok = tau <= safety * tau_max * (1 + _ROUND)
    detail = (f"PGD stepsize bound tau < 2/(lam*L_f + M) = {tau_max:.6g}; "
              f"tau={tau:.6g} {'satisfies' if ok else 'violates'} it at safety {safety}")
    return BoundCheck(ok, tau_max, detail)


def validate_pnp_pgd(lam: float, L_f: float, lg_eff: float, safety: float = 0.99) -> BoundCheck:
    """``lam L_f < (L_g + 2) / (L_g + 1)`` with ``L_g`` the relaxed constant ``gamma L_g``."""
    if not 0 <= lg_eff < 1:
        raise ValueError("gamma * L_g must lie in [0, 1)")
    lam_max = _inv(L_f) * (lg_eff + 2.0) / (lg_eff + 1.0)
    ok = lam <= safety * lam_max * (1 + _ROUND)
    detail = (f"PnP-PGD requires lam*L_f < (L_g+2)/(L_g+1), i.e. lam < {lam_max:.6g}; "
              f"lam={lam:.6g} {'satisfies' if ok else 'violates'} it at safety {safety}")
    return BoundCheck(ok, lam_max, detail)


def alpha_pgd_tau_max(lam: float, L_f: float, M: float, alpha: float,
                      policy: str = "strict") -> float:
    first = _inv(alpha * lam * L_f)
    if policy == "refined":
        second = 2.0 * alpha * _inv(alpha ** 3 * lam * L_f + (2.0 - alpha) * M)
    else:
        second = alpha * _inv(M)
    return min(first, second)


def validate_alpha_pgd(lam: float, L_f: float, M: float, alpha: float, tau: float,
                       policy: str = "strict", safety: float = 0.99) -> BoundCheck:
    """Stepsize condition for alpha-PGD.

    strict:  ``tau < min(1 / (alpha lam L_f), alpha / M)``
    refined: ``tau < min(1 / (alpha lam L_f), 2 alpha / (alpha^3 lam L_f + (2 - alpha) M))``
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if policy not in ("strict", "refined"):
        raise ValueError(f"no stepsize bound for policy {policy!r}")
    tau_max = alpha_pgd_tau_max(lam, L_f, M, alpha, policy)
    ok = tau <= safety * tau_max * (1 + _ROUND)
    detail = (f"alpha-PGD ({policy}) stepsize bound tau < {tau_max:.6g} "
              f"(alpha={alpha:.6g}, lam*L_f={lam * L_f:.6g}, M={M:.6g}); "
              f"tau={tau:.6g} {'satisfies' if ok else 'violates'} it at safety {safety}")
    return BoundCheck(ok, tau_max, detail)


def pnp_alpha_interval(lam: float, L_f: float, M: float, safety: float = 1.0):
    """Admissible relaxation interval ``(M, 1 / (lam L_f))`` shrunk by ``safety``.

    Empty (``lo > hi``) when ``lam L_f M`` is too large.
    """
    return M / safety, min(1.0, safety * _inv(lam * L_f))


def alpha_pgd_constants(lam: float, L_f: float, M: float, alpha: float, tau: float,
                        policy: str = "strict"):
    """``(delta, gamma_bar)`` of the per-step alpha-PGD decrease.

    ``F(y_k) - F(y_{k+1}) >= -delta ||y_k - y_{k-1}||^2 + gamma_bar ||y_{k+1} - y_k||^2``,
    so ``F(y_k) + delta ||y_k - y_{k-1}||^2`` is a Lyapunov sequence when
    ``gamma_bar > delta``.
    """
    if policy == "refined":
        s = 1.0 - alpha ** 2 * tau * lam * L_f
        delta = (1.0 - alpha) / (2.0 * alpha * tau) * s
        gbar = (s + alpha - tau * M * (2.0 - alpha)) / (2.0 * alpha * tau)
    else:
        delta = alpha / (2.0 * tau) * (1.0 - 1.0 / alpha) ** 2
        gbar = (1.0 / (2.0 * tau) - M * (2.0 - alpha) / 2.0) / alpha
    return delta, gbar


@dataclass
class IterTrace:
    """Per-iteration record of a run.

    Row ``k`` holds the objective at the current estimate (``x_k`` for PGD,
    ``y_k`` for alpha-PGD) and ``residual_sq = ||est_k - est_{k-1}||^2``
    (NaN at ``k = 0``).
    """

    algorithm: str = ""
    k: list = field(default_factory=list)
    F: list = field(default_factory=list)
    lyapunov: list = field(default_factory=list)
    residual_sq: list = field(default_factory=list)
    psnr: list = field(default_factory=list)
    elapsed: list = field(default_factory=list)
    status: str = "running"
    params: dict = field(default_factory=dict)

    COLUMNS = ("k", "F", "lyapunov", "residual_sq", "psnr", "elapsed_s")

    def __len__(self):
        return len(self.k)

    def append(self, k, F, lyapunov=math.nan, residual_sq=math.nan, psnr=math.nan,
               elapsed=math.nan):
        if self.k and k <= self.k[-1]:
            raise ValueError("trace rows must be strictly increasing in k")
        if not math.isfinite(F):
            raise NumericalInstabilityError(f"non-finite objective at iteration {k}")
        self.k.append(k)
        self.F.append(F)
        self.lyapunov.append(lyapunov)
        self.residual_sq.append(residual_sq)
        self.psnr.append(psnr)
        self.elapsed.append(elapsed)

    @property
    def monotone_series(self) -> np.ndarray:
        """The sequence the theory says is nonincreasing: Lyapunov if recorded, else F."""
        lyap = np.asarray(self.lyapunov, dtype=float)
        if len(lyap) and not np.all(np.isnan(lyap)):
            return lyap
        return np.asarray(self.F, dtype=float)

    def is_monotone(self, rtol: float = 1e-9) -> bool:
        s = self.monotone_series
        return bool(np.all(np.diff(s) <= rtol * (1.0 + np.abs(s[:-1]))))

    def to_csv(self, path=None) -> str:
        """Serialize as CSV (floats in round-trip ``repr`` form, NaN as an empty field)."""
        def fmt(v):
            if isinstance(v, int):
                return str(v)
            return "" if math.isnan(v) else repr(float(v))

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for row in zip(self.k, self.F, self.lyapunov, self.residual_sq, self.psnr,
                       self.elapsed):
            w.writerow([fmt(v) for v in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path) -> "IterTrace":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(h.strip() for h in header) != cls.COLUMNS:
                raise ValueError(f"{path}: expected header {','.join(cls.COLUMNS)}")
            tr = cls()
            for lineno, row in enumerate(reader, start=2):
                if len(row) != len(cls.COLUMNS):
                    raise ValueError(f"{path}:{lineno}: expected {len(cls.COLUMNS)} fields")
                try:
                    k = int(row[0])
                    vals = [float(v) if v.strip() else math.nan for v in row[1:]]
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: {exc}") from None
                tr.append(k, *vals)
        return tr


def _finite(x: np.ndarray, k: int) -> None:
    if not np.all(np.isfinite(x)):
        raise NumericalInstabilityError(f"non-finite iterate at iteration {k}")


def _enforce(check: BoundCheck, cfg: SolverConfig) -> None:
    if cfg.bound_policy != "override" and not check.ok:
        raise BoundViolationError(check)


def _prox_eval(reg, z, tau):
    if hasattr(reg, "prox_eval"):
        return reg.prox_eval(z, tau)
    x = reg.prox(z, tau)
    return x, reg.value(x)


def _psnr(x, reference):
    return math.nan if reference is None else psnr(x, reference, clip=True)


def _pgd_loop(problem: CompositeProblem, tau: float, cfg: SolverConfig, x0, reference,
              callback, name):
    f, reg, lam = problem.fidelity, problem.regularizer, problem.lam
    x = np.array(x0, dtype=np.float64)
    t0 = time.perf_counter()
    clock = (lambda: time.perf_counter() - t0) if cfg.timing else (lambda: math.nan)
    trace = IterTrace(algorithm=name)
    F = problem.value(x)
    trace.append(0, F, psnr=_psnr(x, reference), elapsed=clock())
    if callback is not None:
        callback(0, x)
    for k in range(1, cfg.max_iters + 1):
        z = x - (tau * lam) * f.grad(x)
        x_new, phi = _prox_eval(reg, z, tau)
        _finite(x_new, k)
        res = float(np.vdot(x_new - x, x_new - x))
        x = x_new
        F = lam * f.value(x) + phi
        trace.append(k, F, residual_sq=res, psnr=_psnr(x, reference), elapsed=clock())
        if callback is not None:
            callback(k, x)
        if res < cfg.residual_tol:
            trace.status = "converged"
            break
    else:
        trace.status = "budget_exhausted"
    return x, trace


def _alpha_loop(problem: CompositeProblem, tau: float, alpha: float, cfg: SolverConfig, x0,
                reference, callback, name, delta):
    f, reg, lam = problem.fidelity, problem.regularizer, problem.lam
    x = np.array(x0, dtype=np.float64)
    y = x.copy()
    guess = None
    t0 = time.perf_counter()
    clock = (lambda: time.perf_counter() - t0) if cfg.timing else (lambda: math.nan)
    trace = IterTrace(algorithm=name)
    F = problem.value(y)
    trace.append(0, F, lyapunov=F, psnr=_psnr(y, reference), elapsed=clock())
    if callback is not None:
        callback(0, y)
    for k in range(1, cfg.max_iters + 1):
        q = (1.0 - alpha) * y + alpha * x
        z = x - (tau * lam) * f.grad(q)
        x, phi_x = _prox_eval(reg, z, tau)
        y_new = (1.0 - alpha) * y + alpha * x
        _finite(y_new, k)
        res = float(np.vdot(y_new - y, y_new - y))
        y = y_new
        if alpha == 1.0:
            phi_y = phi_x
        else:
            # y is an average, not a prox output: warm-start the inversion from
            # the matching average of known pre-images
            guess = z if guess is None else (1.0 - alpha) * guess + alpha * z
            phi_y = reg.value(y, guess=guess)
        F = lam * f.value(y) + phi_y
        trace.append(k, F, lyapunov=F + delta * res, residual_sq=res,
                     psnr=_psnr(y, reference), elapsed=clock())
        if callback is not None:
            callback(k, y)
        if res < cfg.residual_tol:
            trace.status = "converged"
            break
    else:
        trace.status = "budget_exhausted"
    return y, trace


def _default_x0(problem: CompositeProblem, x0):
    if x0 is not None:
        return x0
    return np.zeros(problem.fidelity.x_shape)


def run_pgd(problem: CompositeProblem, cfg: SolverConfig, x0=None, reference=None,
            callback: Optional[Callable] = None):
    """Run PGD at stepsize ``cfg.tau``; returns ``(x_final, trace)``.

    ``reference`` (a clean image) adds a PSNR column; ``callback(k, x_k)`` sees
    every iterate.
    """
    tau = cfg.tau
    check = validate_pgd(problem.lam, problem.L_f, problem.M, tau, cfg.safety)
    _enforce(check, cfg)
    trace_params = dict(lam=problem.lam, tau=tau, L_f=problem.L_f, M=problem.M, alpha=1.0,
                        policy=cfg.bound_policy)
    x, trace = _pgd_loop(problem, tau, cfg, _default_x0(problem, x0), reference, callback,
                         "pgd")
    trace.params = trace_params
    return x, trace


def run_alpha_pgd(problem: CompositeProblem, cfg: SolverConfig, x0=None, reference=None,
                  callback: Optional[Callable] = None):
    """Run alpha-PGD; ``y_0 = x_0``.  Returns ``(y_final, trace)``.

    The ``lyapunov`` column is ``F(y_k) + delta ||y_k - y_{k-1}||^2`` with
    ``delta`` from :func:`alpha_pgd_constants` for the active bound policy
    (strict: ``(alpha / 2 tau)(1 - 1/alpha)^2``).  ``f`` must be convex.
    """
    tau, alpha = cfg.tau, cfg.alpha
    policy = "strict" if cfg.bound_policy == "override" else cfg.bound_policy
    if cfg.bound_policy != "override":
        _enforce(validate_alpha_pgd(problem.lam, problem.L_f, problem.M, alpha, tau,
                                    policy, cfg.safety), cfg)
    delta, _ = alpha_pgd_constants(problem.lam, problem.L_f, problem.M, alpha, tau, policy)
    x, trace = _alpha_loop(problem, tau, alpha, cfg, _default_x0(problem, x0), reference,
                           callback, "alpha_pgd", delta)
    trace.params = dict(lam=problem.lam, tau=tau, L_f=problem.L_f, M=problem.M, alpha=alpha,
                        policy=policy)
    return x, trace


def _pnp_problem(fidelity: QuadraticFidelity, denoiser: GradientStepDenoiser, lam: float,
                 cfg: SolverConfig) -> CompositeProblem:
    if cfg.gamma is not None:
        denoiser = denoiser.relaxed(cfg.gamma)
    return CompositeProblem(fidelity, InducedPotential(denoiser), lam)


def run_pnp_pgd(fidelity: QuadraticFidelity, denoiser: GradientStepDenoiser, lam: float,
                cfg: SolverConfig, x0=None, reference=None, callback=None):
    """``x_{k+1} = D(x_k - lam grad f(x_k))``, objective ``lam f + phi_hat``."""
    problem = _pnp_problem(fidelity, denoiser, lam, cfg)
    d = problem.regularizer.source
    _enforce(validate_pnp_pgd(lam, fidelity.lipschitz, d.lg_eff, cfg.safety), cfg)
    x, trace = _pgd_loop(problem, 1.0, cfg, _default_x0(problem, x0), reference, callback,
                         "pnp_pgd")
    trace.params = dict(lam=lam, tau=1.0, L_f=fidelity.lipschitz, M=problem.M, alpha=1.0,
                        gamma=d.gamma, policy=cfg.bound_policy)
    return x, trace


def run_pnp_alpha_pgd(fidelity: QuadraticFidelity, denoiser: GradientStepDenoiser, lam: float,
                      alpha: Optional[float], cfg: SolverConfig, x0=None, reference=None,
                      callback=None):
    """alpha-PGD with the denoiser as unit-step prox.

    Convergence needs ``M < alpha < 1 / (lam L_f)`` with ``M`` the weak
    convexity constant of the (relaxed) denoiser, hence ``lam L_f M < 1``.
    ``alpha=None`` picks ``min(1, safety / (lam L_f))``.
    """
    problem = _pnp_problem(fidelity, denoiser, lam, cfg)
    L_f, M = fidelity.lipschitz, problem.M
    if alpha is None:
        alpha = min(1.0, cfg.safety * _inv(lam * L_f))
    if cfg.bound_policy != "override":
        if lam * L_f * M >= 1.0:
            raise BoundViolationError(BoundCheck(
                False, _inv(L_f * M),
                f"infeasible: lam*L_f*M = {lam * L_f * M:.6g} but lam*L_f*M < 1 is required "
                f"(lam < {_inv(L_f * M):.6g})"))
        check = validate_alpha_pgd(lam, L_f, M, alpha, 1.0, cfg.bound_policy, cfg.safety)
        if not check.ok:
            lo, hi = pnp_alpha_interval(lam, L_f, M, cfg.safety)
            check.detail += f"; admissible alpha interval [{lo:.6g}, {hi:.6g}]"
        _enforce(check, cfg)
    policy = "strict" if cfg.bound_policy == "override" else cfg.bound_policy
    delta, _ = alpha_pgd_constants(lam, L_f, M, alpha, 1.0, policy)
    x, trace = _alpha_loop(problem, 1.0, alpha, cfg, _default_x0(problem, x0), reference,
                           callback, "pnp_alpha_pgd", delta)
    trace.params = dict(lam=lam, tau=1.0, L_f=L_f, M=M, alpha=alpha,
                        gamma=problem.regularizer.source.gamma, policy=policy)
    return x, trace


@dataclass
class RateCheck:
    bound: float
    ok: bool
    worst_margin: float


def residual_rate_check(trace: IterTrace, F_star: Optional[float] = None,
                        lam=None, L_f=None, M=None, tau=None, alpha=None,
                        policy=None, rtol: float = 1e-9) -> RateCheck:
    """Check ``min_{k<=K} ||Delta_k||^2 <= (1/K) (F(x_0) - F*) / c`` for every K.

    ``c = 1/tau - (M + lam L_f)/2`` for PGD; for alpha-PGD ``c = gamma_bar - delta``
    and the Lyapunov sequence replaces ``F``.  Parameters default to those
    stored in ``trace.params``.  ``F*`` defaults to the trace minimum.
    ``bound`` is the right-hand side at the last K.
    """
    if len(trace) < 10:
        raise ValueError("rate check needs a trace with at least 10 rows")
    p = trace.params
    lam = p["lam"] if lam is None else lam
    L_f = p["L_f"] if L_f is None else L_f
    M = p["M"] if M is None else M
    tau = p["tau"] if tau is None else tau
    alpha = p.get("alpha", 1.0) if alpha is None else alpha
    policy = p.get("policy", "strict") if policy is None else policy
    if policy == "override":
        policy = "strict"
    seq = trace.monotone_series
    if alpha == 1.0:
        c = 1.0 / tau - (M + lam * L_f) / 2.0
    else:
        delta, gbar = alpha_pgd_constants(lam, L_f, M, alpha, tau, policy)
        c = gbar - delta
    if c <= 0:
        raise ValueError(f"decrease constant {c} is not positive: invalid configuration")
    if F_star is None:
        F_star = float(np.min(seq))
    gap = seq[0] - F_star
    res = np.asarray(trace.residual_sq[1:], dtype=float)
    K = np.arange(1, len(res) + 1)
    running_min = np.minimum.accumulate(res)
    bounds = gap / (c * K)
    margins = bounds - running_min
    slack = rtol * (1.0 + abs(seq[0]) + abs(F_star)) / (c * K)
    return RateCheck(float(bounds[-1]), bool(np.all(margins >= -slack)), float(np.min(margins)))
