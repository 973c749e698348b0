"""Standing waves of the complex Ginzburg-Landau equation on radial grids.

The package computes the positive elliptic ground state, verifies the
spectral structure of the operators obtained by linearizing at it,
continues the standing-wave branch in the nonlinearity phase, and
validates the computed waves by direct time evolution.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND_NAME
from .continuation import (
    ContinuationPath,
    ContinuationPoint,
    continue_path,
    domega_dgamma,
    evaluate_F,
    jacobian,
    mu_projection,
    newton_correct,
)
from .errors import (
    BadParameter,
    CGLWavesError,
    FieldGridMismatch,
    GridTooCoarse,
    NegativeSolution,
    NonConvergence,
    NumericalBlowup,
    SingularBorderedSystem,
    StepUnderflow,
    TargetOutsideRange,
    WrongDomain,
    WrongNormalization,
)
from .evolve import TrajectorySummary, evolve, step
from .grid import (
    Domain,
    ProblemParams,
    RadialField,
    RadialGrid,
    assemble_laplacian,
    build_grid,
    dirichlet_lambda1,
    inner_product,
    weighted_inner_product_sigma,
)
from .ground import GroundState, energy, rescale_rho, solve_constrained_min, solve_ground_state
from .linearized import (
    KernelReport,
    Spectrum,
    apply_l,
    assemble_l_minus,
    assemble_l_plus,
    eigs_l_minus,
    eigs_l_plus,
    eta_identity_residual,
    kernel_diagnostics,
    pohozaev_identity_residual,
    spectrum_k,
)

__all__ = [
    "__version__",
    "BACKEND_NAME",
    "Domain",
    "ProblemParams",
    "RadialGrid",
    "RadialField",
    "build_grid",
    "assemble_laplacian",
    "inner_product",
    "weighted_inner_product_sigma",
    "dirichlet_lambda1",
    "GroundState",
    "solve_ground_state",
    "solve_constrained_min",
    "rescale_rho",
    "energy",
    "Spectrum",
    "KernelReport",
    "assemble_l_plus",
    "assemble_l_minus",
    "apply_l",
    "spectrum_k",
    "eigs_l_plus",
    "eigs_l_minus",
    "kernel_diagnostics",
    "eta_identity_residual",
    "pohozaev_identity_residual",
    "ContinuationPoint",
    "ContinuationPath",
    "evaluate_F",
    "jacobian",
    "mu_projection",
    "newton_correct",
    "continue_path",
    "domega_dgamma",
    "TrajectorySummary",
    "step",
    "evolve",
    "CGLWavesError",
    "BadParameter",
    "GridTooCoarse",
    "WrongDomain",
    "WrongNormalization",
    "FieldGridMismatch",
    "NonConvergence",
    "NegativeSolution",
    "SingularBorderedSystem",
    "TargetOutsideRange",
    "StepUnderflow",
    "NumericalBlowup",
]
