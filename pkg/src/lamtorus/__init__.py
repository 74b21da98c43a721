"""Numerical construction of compact rotational lambda-hypersurfaces."""
from .errors import (BracketError, ConfigError, DomainError, IndeterminateError,
                     JointError, NoConvergence, SimplicityError)
from .geometry import (ClosedProfile, ProfilePolyline, build_closed_profile, cylinder_radius,
                       lambda_residual, mean_curvature, simplicity_check, sphere_radius,
                       support_function, weighted_area, weighted_volume)
from .kernels import BACKEND
from .limit import LimitState, compare_with_full_system, integrate_limit
from .ode import (ModelParams, OutcomeKind, ProfileCurve, ProfileState, ShotOutcome,
                  SolverConfig, curvature, integrate_profile)
from .shooting import ShotClass, TorusSolution, classify_shot, find_delta_star, verify_bounds

__version__ = "0.1.0"
