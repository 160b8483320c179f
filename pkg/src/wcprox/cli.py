"""Command-line front end: ``wcprox {solve,check,bounds,curves}``.

Exit codes
----------
0  success (solve: converged, or budget exhausted with a monotone trace)
1  bad input: unreadable/malformed files, unknown names, invalid parameters
2  solve: parameters rejected by a convergence bound (limits are printed)
3  solve: numerical failure (non-finite iterate or non-monotone trace);
   check: at least one property failed
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import datetime as _dt
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .denoiser import InducedPotential, parse_denoiser_spec, prox_oracle_1d
from .io import FormatError, read_image, read_kernel, write_pgm, write_tensor
from .problem import (
    CompositeProblem,
    QuadraticFidelity,
    QuadraticRegularizer,
    ZeroRegularizer,
    degrade,
    gaussian_kernel,
    parse_kernel_spec,
    psnr,
    synthetic_image,
)
from .properties import (
    batched,
    batched_grad,
    check_descent_lemma,
    check_sequence_lemma,
    check_subgradient_lower_bound,
    check_three_points,
    check_weak_convexity_combination,
    write_witnesses,
)
from .solvers import (
    BoundViolationError,
    IterTrace,
    NumericalInstabilityError,
    SolverConfig,
    alpha_pgd_constants,
    alpha_pgd_tau_max,
    pnp_alpha_interval,
    run_alpha_pgd,
    run_pgd,
    run_pnp_alpha_pgd,
    run_pnp_pgd,
)
from .tensor import upsample_replicate

EXIT_OK, EXIT_INPUT, EXIT_BOUND, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration files

SOLVE_DEFAULTS = {
    "problem": "deblur",
    "image": "",
    "synthetic": "cartoon",
    "size": "64",
    "observation": "",
    "kernel": "gaussian:1.6,25",
    "scale": "1",
    "noise": "0.01",
    "algo": "pnp-alpha-pgd",
    "denoiser": "cosine:a=0.6,eps=0.1,gamma=0.2",
    "regularizer": "zero",
    "lambda": "auto",
    "alpha": "auto",
    "tau": "1",
    "gamma": "",
    "max_iters": "400",
    "residual_tol": "1e-12",
    "bound_policy": "strict",
    "safety": "0.99",
    "seed": "0",
    "timing": "false",
}


def read_config(path) -> dict:
    """Parse a ``key=value`` file; blank lines and ``#`` comments are skipped."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read config {path}: {exc}") from None
    cfg = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, eq, val = line.partition("=")
        if not eq:
            raise FormatError(f"{path}:{lineno}: expected key=value")
        cfg[key.strip().replace("-", "_")] = val.strip()
    return cfg


def _float(settings, key):
    try:
        return float(settings[key])
    except ValueError:
        raise UsageError(f"{key} must be a number, got {settings[key]!r}") from None


def _int(settings, key):
    try:
        return int(settings[key])
    except ValueError:
        raise UsageError(f"{key} must be an integer, got {settings[key]!r}") from None


# ---------------------------------------------------------------------------
# solve

def _load_kernel(spec: str):
    if spec and Path(spec).is_file():
        return read_kernel(spec)
    return parse_kernel_spec(spec)


def _regularizer(spec: str, denoiser):
    kind, _, args = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "zero":
        return ZeroRegularizer()
    if kind == "induced":
        return InducedPotential(denoiser)
    if kind == "quadratic":
        params = dict(item.split("=") for item in args.split(",") if item)
        return QuadraticRegularizer(float(params.get("c", 1.0)), float(params.get("center", 0.0)))
    raise UsageError(f"unknown regularizer {spec!r} (zero, quadratic:c=..,center=.., induced)")


def _resolve(settings: dict):
    """Build the problem pieces from resolved settings."""
    problem = settings["problem"]
    if problem not in ("deblur", "sr", "denoise"):
        raise UsageError(f"unknown problem {problem!r}")
    scale = _int(settings, "scale") if problem == "sr" else 1
    kernel = None if problem == "denoise" else _load_kernel(settings["kernel"])
    if settings["image"]:
        clean = read_image(settings["image"])
    else:
        clean = synthetic_image(settings["synthetic"], _int(settings, "size"))
    if settings["observation"]:
        y = read_image(settings["observation"])
    else:
        y = degrade(clean, kernel, scale, _float(settings, "noise"), _int(settings, "seed"))
    if clean.shape[-2:] != (y.shape[-2] * scale, y.shape[-1] * scale):
        clean = None  # no usable reference
    fidelity = QuadraticFidelity.from_operator(y, kernel, scale)
    x0 = upsample_replicate(y, scale) if scale > 1 else y.copy()
    return clean, y, fidelity, x0


def _auto_or_float(settings, key):
    val = settings[key].strip().lower()
    return None if val in ("", "auto") else _float(settings, key)


def cmd_solve(args) -> int:
    settings = dict(SOLVE_DEFAULTS)
    if args.config:
        try:
            settings.update(read_config(args.config))
        except FormatError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    for key in SOLVE_DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = str(val)
    out = Path(args.out or settings.get("out") or "wcprox-out")
    started = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")

    try:
        clean, y, fidelity, x0 = _resolve(settings)
        algo = settings["algo"].replace("-", "_")
        safety = _float(settings, "safety")
        L_f = fidelity.lipschitz
        lam = _auto_or_float(settings, "lambda")
        alpha = _auto_or_float(settings, "alpha")
        tau = _float(settings, "tau")
        gamma = None if not settings["gamma"] else _float(settings, "gamma")
        denoiser = parse_denoiser_spec(settings["denoiser"])
        if gamma is not None:
            denoiser = denoiser.relaxed(gamma)
        reg = _regularizer(settings["regularizer"], denoiser)
        if algo.startswith("pnp"):
            reg = InducedPotential(denoiser)
        M = reg.weak_convexity
        if algo.startswith("pnp"):
            tau = 1.0
        auto_alpha = alpha is None
        if auto_alpha:
            alpha = 1.0
        if lam is None:
            lam = _auto_lambda(algo, L_f, M, tau, alpha, safety, denoiser)
        if auto_alpha and algo == "pnp_alpha_pgd":
            # largest admissible relaxation
            alpha = min(1.0, safety / (lam * L_f))
        cfg = SolverConfig(algorithm=algo, lam=lam, tau=tau, alpha=alpha,
                           max_iters=_int(settings, "max_iters"),
                           residual_tol=_float(settings, "residual_tol"),
                           bound_policy=settings["bound_policy"], safety=safety,
                           seed=_int(settings, "seed"),
                           timing=settings["timing"].lower() in ("1", "true", "yes"))
    except (OSError, FormatError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        with np.errstate(over="raise", invalid="raise"):
            x, trace = _run(algo, fidelity, denoiser, reg, lam, alpha, cfg, x0, clean)
    except BoundViolationError as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        print(_limits_text(L_f, M, lam, tau, alpha, safety, denoiser), file=sys.stderr)
        return EXIT_BOUND
    except (NumericalInstabilityError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    resolved = dict(settings, algo=algo.replace("_", "-"), **{"lambda": repr(lam)},
                    alpha=repr(alpha), tau=repr(tau))
    try:
        out.mkdir(parents=True, exist_ok=True)
        trace.to_csv(out / "trace.csv")
        write_tensor(out / "restored.wct", x)
        write_tensor(out / "observation.wct", y)
        if x.ndim == 2:
            write_pgm(out / "restored.pgm", x)
        lines = [f"# wcprox {__version__} solve manifest", f"# started={started}",
                 f"# status={trace.status}", f"# output={out}"]
        lines += [f"{k}={v}" for k, v in resolved.items()]
        (out / "manifest.txt").write_text("\n".join(lines) + "\n")
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_INPUT

    print(f"{algo}: lam={lam:.6g} alpha={alpha:.6g} tau={tau:.6g} L_f={L_f:.6g} M={M:.6g}")
    print(f"status={trace.status} iterations={trace.k[-1]} F={trace.F[-1]:.10g}")
    if clean is not None:
        base = upsample_replicate(y, _int(settings, "scale")) if settings["problem"] == "sr" else y
        print(f"psnr degraded={psnr(base, clean):.3f} dB "
              f"restored={psnr(x, clean, clip=True):.3f} dB")
    if trace.status == "budget_exhausted" and not trace.is_monotone():
        print("trace is not monotone", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _run(algo, fidelity, denoiser, reg, lam, alpha, cfg, x0, clean):
    if algo == "pnp_pgd":
        return run_pnp_pgd(fidelity, denoiser, lam, cfg, x0, reference=clean)
    if algo == "pnp_alpha_pgd":
        return run_pnp_alpha_pgd(fidelity, denoiser, lam, alpha, cfg, x0, reference=clean)
    problem = CompositeProblem(fidelity, reg, lam)
    runner = run_pgd if algo == "pgd" else run_alpha_pgd
    return runner(problem, cfg, x0, reference=clean)


def _auto_lambda(algo, L_f, M, tau, alpha, safety, denoiser):
    """Largest regularization weight allowed by the active convergence bound, times safety."""
    if algo == "pnp_pgd":
        return safety * (denoiser.lg_eff + 2) / (denoiser.lg_eff + 1) / L_f
    if algo == "pnp_alpha_pgd":
        if M == 0:
            raise UsageError("lambda=auto is unbounded for a convex potential (gamma=0); "
                             "give --lambda explicitly")
        # safety^2 leaves the alpha interval [M/safety, safety/(lam L_f)] non-empty
        return safety ** 2 / (L_f * M)
    if algo == "pgd":
        lam = (2 * safety / tau - M) / L_f
    else:
        lam = safety / (alpha * tau * L_f)
    if lam <= 0:
        raise UsageError("no positive lambda satisfies the bound for this tau")
    return lam


def _limits_text(L_f, M, lam, tau, alpha, safety, denoiser) -> str:
    lg = denoiser.lg_eff
    lo, hi = pnp_alpha_interval(lam, L_f, M, safety)
    rows = [
        ("tau_max PGD, 2/(lam L_f + M)", 2 / (lam * L_f + M)),
        ("lambda_max PnP-PGD, (L_g+2)/(L_g+1)/L_f", (lg + 2) / (lg + 1) / L_f),
        ("lambda_max PnP-alphaPGD, 1/(L_f M)", math.inf if M == 0 else 1 / (L_f * M)),
    ]
    lines = [f"  {name:<40s} = {val:.6g}" for name, val in rows]
    lines.append(f"  {'alpha interval at safety ' + str(safety):<40s} = [{lo:.6g}, {hi:.6g}]")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# check

PROPERTIES = ("weak-convexity", "subgradient", "three-points", "descent-lemma",
              "prox-identity", "sequence-lemma")


def _property_jobs(args):
    den = parse_denoiser_spec(args.denoiser)
    ip = den.induced()
    M = den.weak_convexity_constant() * args.m_scale
    phi = lambda X: ip.value(X, batch=True)
    dims = [int(d) for d in args.dims.split(",")]
    seed, trials = args.seed, args.trials
    jobs = {}
    for n in dims:
        jobs[f"weak-convexity/n={n}"] = lambda n=n: check_weak_convexity_combination(
            phi, M, n, trials, seed)
        jobs[f"subgradient/n={n}"] = lambda n=n: check_subgradient_lower_bound(
            phi, lambda X: ip.grad(X, batch=True), M, n, trials, seed)
        jobs[f"three-points/n={n}"] = lambda n=n: check_three_points(
            phi, den.apply, M, n, trials, seed)

    def descent():
        rng = np.random.default_rng(seed)
        y = rng.random((16, 16))
        fid = QuadraticFidelity.from_operator(y, gaussian_kernel(1.6, 9))
        return check_descent_lemma(batched(fid.value), batched_grad(fid.grad),
                                   fid.lipschitz * args.lf_scale, (16, 16), trials, seed)
    jobs["descent-lemma"] = descent

    def prox_identity():
        from .properties import _report
        pts = np.linspace(-5, 5, 20)
        oracle = [prox_oracle_1d(lambda z: ip.value(z[:, None], batch=True), p) for p in pts]
        return _report("prox-identity", np.abs(den.apply(pts) - np.array(oracle)),
                       np.zeros(len(pts)), 1e-4, {"x": pts})
    jobs["prox-identity"] = prox_identity

    def sequence():
        rng = np.random.default_rng(seed)
        y = rng.random((16, 16))
        fid = QuadraticFidelity.from_operator(y, gaussian_kernel(1.6, 9))
        relaxed = den.relaxed(min(den.gamma, 0.5))
        Mr = relaxed.weak_convexity_constant()
        lam = 0.9 / (fid.lipschitz * Mr) if Mr > 0 else 1.0
        alpha = 0.99 / (lam * fid.lipschitz) if lam * fid.lipschitz > 1 else 0.9
        cfg = SolverConfig("pnp_alpha_pgd", max_iters=100, residual_tol=0.0)
        _, tr = run_pnp_alpha_pgd(fid, relaxed, lam, alpha, cfg, y)
        delta, gbar = alpha_pgd_constants(lam, fid.lipschitz, Mr, alpha, 1.0)
        return check_sequence_lemma(tr.lyapunov, (gbar - delta) * np.asarray(tr.residual_sq[1:]))
    jobs["sequence-lemma"] = sequence
    return jobs


def cmd_check(args) -> int:
    selected = set(PROPERTIES) if args.all or not args.properties else set(args.properties)
    unknown = selected - set(PROPERTIES)
    if unknown:
        print(f"error: unknown properties {sorted(unknown)}; choose from {PROPERTIES}",
              file=sys.stderr)
        return EXIT_INPUT
    try:
        jobs = {k: v for k, v in _property_jobs(args).items() if k.split("/")[0] in selected}
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    workers = max(1, int(os.environ.get("WCPROX_THREADS", "1") or 1))
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {name: pool.submit(fn) for name, fn in jobs.items()}
        reports = {name: fut.result() for name, fut in futures.items()}
    print(f"{'property':<28s} {'trials':>7s} {'worst_slack':>12s}  result")
    for name, rep in reports.items():
        print(f"{name:<28s} {rep.trials:>7d} {rep.worst_slack:>+12.3e}  "
              f"{'PASS' if rep.passed else 'FAIL'}")
        for w in rep.witnesses[: 3 if not rep.passed else 0]:
            print(f"    witness trial={w['trial']} lhs={w['lhs']:.6g} rhs={w['rhs']:.6g}")
    failed = [r for r in reports.values() if not r.passed]
    if args.witness_csv:
        write_witnesses(args.witness_csv, list(reports.values()))
    return EXIT_NUMERIC if failed else EXIT_OK


# ---------------------------------------------------------------------------
# bounds

def _bounds_row(lf, lg, gamma, lam, alpha, tau, m):
    M = m if m is not None else (gamma * lg / (gamma * lg + 1) if lg is not None else 0.0)
    row = {"L_f": lf, "L_g": lg, "gamma": gamma, "M": M}
    if lg is not None:
        g = gamma * lg
        row["lambda_max_pgd"] = (g + 2) / (g + 1) / lf
    row["lambda_max_alpha_pgd"] = math.inf if M == 0 else 1 / (lf * M)
    if lam is not None:
        row["tau_max_pgd"] = 2 / (lam * lf + M)
        row["alpha_lo"], row["alpha_hi"] = M, min(1.0, 1 / (lam * lf))
        if alpha is not None:
            row["tau_max_alpha_strict"] = alpha_pgd_tau_max(lam, lf, M, alpha, "strict")
            row["tau_max_alpha_refined"] = alpha_pgd_tau_max(lam, lf, M, alpha, "refined")
    return row


def cmd_bounds(args) -> int:
    if args.lf <= 0:
        print("error: --lf must be positive", file=sys.stderr)
        return EXIT_INPUT
    if args.lg is not None and args.gamma * args.lg >= 1:
        print(f"note: gamma*L_g = {args.gamma * args.lg:g} >= 1; "
              f"formulas shown as limits", file=sys.stderr)
    row = _bounds_row(args.lf, args.lg, args.gamma, args.lam, args.alpha, args.tau, args.m)
    for key, val in row.items():
        if val is not None:
            print(f"{key:<24s} = {val:.6g}")
    if args.alpha is not None and args.tau is not None:
        # strict alpha-PGD bound read as a condition on lam*L_f
        M = row["M"]
        msg = (f"alpha-PGD strict bound at alpha={args.alpha:g}, tau={args.tau:g}: "
               f"requires lam*L_f < {1 / (args.alpha * args.tau):.6g}")
        if M > 0:
            msg += f" and M < alpha/tau = {args.alpha / args.tau:.6g}"
        print(msg)
    if args.sweep:
        name, _, rng = args.sweep.partition("=")
        try:
            start, stop, num = rng.split(":")
            values = np.linspace(float(start), float(stop), int(num))
        except ValueError:
            print(f"error: --sweep expects NAME=start:stop:num, got {args.sweep!r}",
                  file=sys.stderr)
            return EXIT_INPUT
        if name not in ("lf", "lg", "gamma", "lam", "alpha", "tau", "m"):
            print(f"error: cannot sweep {name!r}", file=sys.stderr)
            return EXIT_INPUT
        base = dict(lf=args.lf, lg=args.lg, gamma=args.gamma, lam=args.lam,
                    alpha=args.alpha, tau=args.tau, m=args.m)
        rows = [_bounds_row(**dict(base, **{name: float(v)})) for v in values]
        target = open(args.csv, "w", newline="") if args.csv else sys.stdout
        try:
            w = csv.writer(target, lineterminator="\n")
            cols = list(rows[0])
            w.writerow(cols)
            for r in rows:
                w.writerow(["" if r.get(c) is None else repr(float(r[c])) for c in cols])
        finally:
            if args.csv:
                target.close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# curves

GNUPLOT_TEMPLATE = """\
# gnuplot script generated by wcprox curves
set terminal pngcairo size 1000,400
set output '{png}'
set multiplot layout 1,2
set xlabel 'k'
set logscale y
set title 'objective F - min F + 1e-16'
plot {f_plots}
set title 'squared residual'
plot {r_plots}
unset multiplot
"""


def cmd_curves(args) -> int:
    traces = []
    for path in args.traces:
        try:
            tr = IterTrace.from_csv(path)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        if len(tr) == 0:
            print(f"error: {path}: empty trace", file=sys.stderr)
            return EXIT_INPUT
        if not tr.is_monotone():
            print(f"warning: {path}: monotone series increases", file=sys.stderr)
        traces.append((Path(path), tr))
    stems = [p.stem for p, _ in traces]
    traces = [((p.stem if stems.count(p.stem) == 1 else f"{p.parent.name}_{p.stem}"), tr)
              for p, tr in traces]
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    kmax = max(tr.k[-1] for _, tr in traces)
    header = ["k"]
    for name, _ in traces:
        header += [f"F_{name}", f"residual_{name}"]
    lines = ["# " + " ".join(header)]
    lookup = [dict(zip(tr.k, zip(tr.F, tr.residual_sq))) for _, tr in traces]
    for k in range(kmax + 1):
        fields = [str(k)]
        for table in lookup:
            F, r = table.get(k, (math.nan, math.nan))
            fields += ["NaN" if math.isnan(F) else repr(F), "NaN" if math.isnan(r) else repr(r)]
        lines.append(" ".join(fields))
    (out / "curves.dat").write_text("\n".join(lines) + "\n")
    fmins = [min(tr.F) for _, tr in traces]
    f_plots = ", ".join(
        f"'curves.dat' using 1:(${2 + 2 * i} - ({fmins[i]!r}) + 1e-16) with lines title '{n}'"
        for i, (n, _) in enumerate(traces))
    r_plots = ", ".join(f"'curves.dat' using 1:{3 + 2 * i} with lines title '{n}'"
                        for i, (n, _) in enumerate(traces))
    (out / "curves.gp").write_text(GNUPLOT_TEMPLATE.format(png="curves.png", f_plots=f_plots,
                                                           r_plots=r_plots))
    print(f"wrote {out / 'curves.dat'} and {out / 'curves.gp'}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value configuration file")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", help="output directory")
    common.add_argument("--safety", type=float, default=None)

    parser = argparse.ArgumentParser(prog="wcprox", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"wcprox {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="restore an image")
    s.add_argument("--problem", choices=["deblur", "sr", "denoise"])
    s.add_argument("--image", help="clean image (PGM or WCT1); default: synthetic")
    s.add_argument("--synthetic", help="checkerboard, bump or cartoon")
    s.add_argument("--size", type=int)
    s.add_argument("--observation", help="degraded observation; default: synthesized")
    s.add_argument("--kernel", help="gaussian:SIGMA,SIZE | uniform:N | kernel file")
    s.add_argument("--scale", type=int)
    s.add_argument("--noise", type=float)
    s.add_argument("--algo", choices=["pgd", "alpha-pgd", "pnp-pgd", "pnp-alpha-pgd"])
    s.add_argument("--denoiser", help="e.g. cosine:a=0.6,eps=0.1,gamma=0.5")
    s.add_argument("--regularizer", help="zero | quadratic:c=..,center=.. | induced")
    s.add_argument("--lambda", dest="lambda_", metavar="LAMBDA", help="number or auto")
    s.add_argument("--alpha", help="number or auto")
    s.add_argument("--tau", type=float)
    s.add_argument("--gamma", type=float)
    s.add_argument("--max-iters", type=int)
    s.add_argument("--residual-tol", type=float)
    s.add_argument("--bound-policy", choices=["strict", "refined", "override"])
    s.add_argument("--timing", action="store_const", const="true", default=None,
                   help="record wall time (makes traces non-reproducible)")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check", parents=[common], help="run the property suite")
    c.add_argument("properties", nargs="*", metavar="PROPERTY",
                   help=f"any of {', '.join(PROPERTIES)}")
    c.add_argument("--all", action="store_true")
    c.add_argument("--trials", type=int, default=10_000)
    c.add_argument("--denoiser", default="cosine:a=0.6,eps=0.1")
    c.add_argument("--dims", default="1,2,8")
    c.add_argument("--lf-scale", type=float, default=1.0,
                   help="multiply L_f in the descent lemma (probe with < 1)")
    c.add_argument("--m-scale", type=float, default=1.0,
                   help="multiply the weak convexity constant (probe with < 1)")
    c.add_argument("--witness-csv")
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("bounds", parents=[common], help="print convergence limits")
    b.add_argument("--lf", type=float, default=1.0)
    b.add_argument("--lg", type=float)
    b.add_argument("--gamma", type=float, default=1.0)
    b.add_argument("--lam", type=float)
    b.add_argument("--alpha", type=float)
    b.add_argument("--tau", type=float)
    b.add_argument("--m", type=float, help="weak convexity constant (overrides L_g, gamma)")
    b.add_argument("--sweep", help="NAME=start:stop:num")
    b.add_argument("--csv", help="write the sweep here instead of stdout")
    b.set_defaults(func=cmd_bounds)

    v = sub.add_parser("curves", parents=[common], help="gnuplot data from trace CSVs")
    v.add_argument("traces", nargs="+")
    v.set_defaults(func=cmd_curves)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "lambda_", None) is not None:
        args.__dict__["lambda"] = args.lambda_
    if args.command == "check" and args.seed is None:
        args.seed = 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
