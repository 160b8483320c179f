"""The command-line tool end to end, driven from Python.

Prints convergence limits, runs two solvers into a scratch directory,
reruns one from its manifest to show the trace is reproduced byte for byte,
and writes a gnuplot script comparing both traces.  Equivalent shell
commands are echoed before each step.
"""

import shlex
import tempfile
from pathlib import Path

from wcprox.cli import main


def run(*argv):
    print("$ wcprox", " ".join(shlex.quote(a) for a in argv), flush=True)
    code = main(list(argv))
    print(f"(exit {code})\n", flush=True)
    return code


out = Path(tempfile.mkdtemp(prefix="wcprox-demo-"))
run("bounds", "--lf", "1", "--lg", "0.99", "--gamma", "0.5", "--lam", "1.8")
run("solve", "--out", str(out / "apgd"), "--size", "32", "--kernel", "gaussian:1.6,9",
    "--max-iters", "100")
run("solve", "--out", str(out / "pgd"), "--size", "32", "--kernel", "gaussian:1.6,9",
    "--algo", "pnp-pgd", "--denoiser", "cosine:a=0.6,eps=0.1,gamma=0.2", "--lambda", "1.5",
    "--max-iters", "100")
run("solve", "--config", str(out / "apgd" / "manifest.txt"), "--out", str(out / "again"))
same = (out / "apgd" / "trace.csv").read_bytes() == (out / "again" / "trace.csv").read_bytes()
print(f"rerun from manifest reproduces trace.csv byte for byte: {same}\n")
run("solve", "--out", str(out / "bad"), "--size", "32", "--kernel", "gaussian:1.6,9",
    "--algo", "pnp-pgd", "--lambda", "5")
run("curves", str(out / "apgd" / "trace.csv"), str(out / "pgd" / "trace.csv"),
    "--out", str(out / "curves"))
print("gnuplot script:", out / "curves" / "curves.gp")
