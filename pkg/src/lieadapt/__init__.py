"""Lie-algebra adaptive tracking control for a rigid body on SE(3)."""
from ._jit import USE_NUMBA
from .adaptive import (AdaptiveConfig, AdaptiveRun, DivergenceError, TrackingMetrics,
                       evaluate_tracking, run_algorithm1)
from .error_dynamics import (ErrorState, LinearModel, error_state, gamma_matrix, linearize,
                             nonlinear_error_rhs)
from .experiments import SweepResult, aggregate, monte_carlo_sweep
from .lqr import RiccatiError, RiccatiSolution, solve_dare
from .rigid_body import (BodyState, InertialParams, PerturbationConfig, feasible_reference_input,
                         generalized_inertia, perturb_params, reference_trajectory, step,
                         twist_dynamics)
from .se3 import (BranchError, ad6, coad6, compose, exp_se3, hat3, hat6, inverse, log_se3, vee3,
                  vee6)
from .sysid import (ExcitationError, IdDataset, IdentifiedModel, assemble_dataset,
                    fit_linear_model, reconstruct_params, reconstruction_errors)

__version__ = "0.1.0"
