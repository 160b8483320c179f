"""Sampling the inequalities behind the convergence guarantees.

Each check draws 10^4 random inputs and reports the worst normalized slack.
The induced potential of the cosine denoiser passes with its certified weak
convexity constant.  The same checks with a deliberately wrong constant
(M / 4, or L_f / 2 for a blur fidelity) fail and return witnesses.
"""

import numpy as np

from wcprox import QuadraticFidelity, gaussian_kernel, parse_denoiser_spec
from wcprox.properties import (check_descent_lemma, check_subgradient_lower_bound,
                               check_three_points, check_weak_convexity_combination)

den = parse_denoiser_spec("cosine:a=0.6,eps=0.1,gamma=1")
phi = den.induced()
M = phi.weak_convexity
value = lambda X: phi.value(X, batch=True)
grad = lambda X: phi.grad(X, batch=True)
prox_value = lambda Z: phi.value_from_preimage(Z, batch=True)

print(f"cosine denoiser, gamma = 1, certified M = {M:.4f}")
for m, tag in ((M, "certified"), (M / 4, "M / 4")):
    print(f"-- {tag}")
    print(" ", check_weak_convexity_combination(value, m, shape=2, seed=0))
    print(" ", check_subgradient_lower_bound(value, grad, m, shape=2, seed=0))
    print(" ", check_three_points(value, den.apply, m, shape=2, seed=0))

kernel = gaussian_kernel(1.6, 9)
fid = QuadraticFidelity.from_operator(np.zeros((16, 16)), kernel)
f = lambda X: np.array([fid.value(x) for x in X])
g = lambda X: np.stack([fid.grad(x) for x in X])
print("-- blur fidelity on 16x16")
for L, tag in ((fid.lipschitz, "L_f"), (fid.lipschitz / 2, "L_f / 2")):
    r = check_descent_lemma(f, g, L, (16, 16), trials=2000, seed=0)
    print(f"  {tag:8s}", r)
    if r.witnesses:
        w = r.witnesses[0]
        print(f"           witness trial {w['trial']}: lhs {w['lhs']:.4f} > rhs {w['rhs']:.4f}")
