"""Proximal gradient methods for weakly convex composite objectives.

Plain and inertial (alpha-relaxed) proximal gradient descent, gradient-step
denoisers read as proximal operators, image degradation operators and a
randomized checker for the inequalities the convergence guarantees rest on.
"""

__version__ = "0.1.0"

from .tensor import (  # noqa: E402
    ConvKernel,
    DimensionError,
    blur_decimation_norm,
    circ_conv,
    circ_conv_adjoint,
    downsample,
    spectral_norm,
    upsample_adjoint,
    upsample_replicate,
)
from .io import (  # noqa: E402
    FormatError,
    read_image,
    read_kernel,
    read_tensor,
    write_pgm,
    write_tensor,
)
from .problem import (  # noqa: E402
    CompositeProblem,
    QuadraticFidelity,
    QuadraticRegularizer,
    ZeroRegularizer,
    degrade,
    gaussian_kernel,
    psnr,
    synthetic_image,
    uniform_kernel,
)
from .denoiser import (  # noqa: E402
    CosinePotential,
    GradientStepDenoiser,
    InducedPotential,
    QuadraticPotential,
    parse_denoiser_spec,
    prox_oracle_1d,
    weak_convexity_constant,
)
from .solvers import (  # noqa: E402
    BoundViolationError,
    IterTrace,
    NumericalInstabilityError,
    SolverConfig,
    run_alpha_pgd,
    run_pgd,
    run_pnp_alpha_pgd,
    run_pnp_pgd,
)
