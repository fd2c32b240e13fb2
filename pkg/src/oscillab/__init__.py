"""oscillab: finite-difference time stepping for 1-D parabolic PDEs with
eigenvalue-based prediction and detection of spurious numerical oscillations.
"""

from .conditions import (
    Classification,
    ConditionReport,
    InfeasibleShiftError,
    balanced_condition,
    classify,
    max_r_balanced,
    max_r_nonneg,
    max_r_stable,
    nonneg_condition,
)
from .diagnostics import OscillationReport, decay_rate, mode_energies, oscillation_score
from .kernels import BACKEND
from .lattice import (
    SineBasis,
    Spectrum,
    ToeplitzSecondDiff,
    analytic_eigenvalues,
    dst,
    inverse_dst,
    sine_basis,
    toeplitz_second_diff,
)
from .nonlinear import (
    EigenDecomposition,
    Linearization,
    cubic_guarantee_interval,
    frozen_jacobian,
    is_positive_definite,
    linearize,
    localization_metrics,
    nonlinear_nn_guarantee,
    pairing_symmetry,
    tridiag_eigen,
)
from .schemes import (
    AmplificationPoleError,
    BoundaryData,
    Discretization,
    RationalScheme,
    SingularSchemeError,
    amplification,
    backward_euler,
    boundary_vector,
    builtin_scheme,
    crank_nicolson,
    forward_euler,
    modal_coefficients,
    parse_scheme,
    scheme_spectrum,
    taylor,
    time_step_matrix,
)
from .simulate import (
    ConvergenceError,
    Kind,
    Problem,
    Trajectory,
    modal_solution,
    run,
    steady_state,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "AmplificationPoleError",
    "BACKEND",
    "BoundaryData",
    "Classification",
    "ConditionReport",
    "ConvergenceError",
    "Discretization",
    "EigenDecomposition",
    "InfeasibleShiftError",
    "Kind",
    "Linearization",
    "OscillationReport",
    "Problem",
    "RationalScheme",
    "SineBasis",
    "SingularSchemeError",
    "Spectrum",
    "ToeplitzSecondDiff",
    "Trajectory",
    "amplification",
    "analytic_eigenvalues",
    "backward_euler",
    "balanced_condition",
    "boundary_vector",
    "builtin_scheme",
    "classify",
    "crank_nicolson",
    "cubic_guarantee_interval",
    "decay_rate",
    "dst",
    "forward_euler",
    "frozen_jacobian",
    "inverse_dst",
    "is_positive_definite",
    "linearize",
    "localization_metrics",
    "max_r_balanced",
    "max_r_nonneg",
    "max_r_stable",
    "modal_coefficients",
    "modal_solution",
    "mode_energies",
    "nonlinear_nn_guarantee",
    "nonneg_condition",
    "oscillation_score",
    "pairing_symmetry",
    "parse_scheme",
    "run",
    "scheme_spectrum",
    "sine_basis",
    "steady_state",
    "step",
    "taylor",
    "time_step_matrix",
    "toeplitz_second_diff",
    "tridiag_eigen",
]
