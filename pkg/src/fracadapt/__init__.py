"""fracadapt: multiterm fractional subdiffusion solvers with adaptive meshes.

The package couples an L1 time discretisation on arbitrary meshes with exact
residual sampling, barrier-calibrated step acceptance and companion-problem
error estimation; a Mittag-Leffler special-function core provides independent
reference solutions for constant-coefficient problems.
"""

from .adaptive import AdaptiveConfig, AdaptiveTrace, run_adaptive
from .barriers import (BarrierKind, BarrierSpec, barrier_value, calibration,
                       check_interval, error_bound_curve)
from .errors import (EvaluationError, ExponentUndefinedError, FracadaptError,
                     NonterminationError, RootNotFoundError, SingularStepError,
                     StepCollapseError)
from .estimator import EstimatorResult, estimate_on_mesh
from .experiments import (ErrorReport, RunConfig, build_example,
                          fit_initial_exponent, reference_solution,
                          run_example, run_sweep)
from .l1 import (Laplace1D, ProblemSpec, SolutionHistory, SpatialGrid1D,
                 apply_dt_bar, l1_coeffs, solve_pde_1d, solve_scalar)
from .mesh import TemporalMesh, graded, refine, uniform
from .residual import (NormKind, ResidualSamples, residual_at, residual_norm,
                       sample_norms)
from .specfun import (FKernelParams, MLParams, SignedPowerSum,
                      constant_coeff_inverse, f_kernel, gauss_2f1,
                      homogeneous_solution, ml_lower_bound, ml_two_param,
                      mml_contour, mml_series, rho, sign_change_root)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # specfun
    "MLParams", "FKernelParams", "SignedPowerSum", "ml_two_param", "mml_series",
    "f_kernel", "gauss_2f1", "rho", "mml_contour", "sign_change_root",
    "homogeneous_solution", "constant_coeff_inverse", "ml_lower_bound",
    # mesh
    "TemporalMesh", "uniform", "graded", "refine",
    # l1
    "Laplace1D", "SpatialGrid1D", "ProblemSpec", "SolutionHistory",
    "l1_coeffs", "apply_dt_bar", "solve_scalar", "solve_pde_1d",
    # residual
    "NormKind", "ResidualSamples", "residual_at", "residual_norm", "sample_norms",
    # barriers
    "BarrierKind", "BarrierSpec", "calibration", "barrier_value",
    "check_interval", "error_bound_curve",
    # adaptive
    "AdaptiveConfig", "AdaptiveTrace", "run_adaptive",
    # estimator
    "EstimatorResult", "estimate_on_mesh",
    # experiments
    "RunConfig", "ErrorReport", "build_example", "reference_solution",
    "run_example", "run_sweep", "fit_initial_exponent",
    # errors
    "FracadaptError", "EvaluationError", "RootNotFoundError",
    "SingularStepError", "StepCollapseError", "NonterminationError",
    "ExponentUndefinedError",
]
