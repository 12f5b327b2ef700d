"""Self-similar profiles of u_t + gamma |u_t| = Laplacian(u) and their anomalous exponents.

Closed-form piecewise profiles built from Kummer and Tricomi functions, an
independent ODE oracle, exponent search with certificates, and a CLI.
"""
from ._kernels import BACKEND
from .errors import (AnomalError, BracketError, BreakpointCapError, ConvergenceError,
                     DomainError, IntegrationError, NumericalFailure, PoleError,
                     ScanExhaustedError)
from .exponents import (BehaviorReport, Certificate, ExponentEntry, ExponentTable, classify,
                        count_zeros, exponent_table, find_exponent, gauss_rate_fit,
                        gaussian_window_end, tail_coefficient, tail_slope)
from .oracle import OracleTrajectory, integrate_barenblatt, integrate_pucci
from .profile import (AsymptoticDescriptor, BuildOptions, PiecewiseProfile, ProblemParams,
                      Segment, TailKind, build_profile, classify_asymptotics, evaluate,
                      first_root, reduced_root_equation)
from .special import (BasisPair, HypParams, gamma, kummer_m, kummer_m_deriv,
                      reciprocal_gamma, tricomi_u, v_solution, v_solution_deriv)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "AnomalError", "BracketError", "BreakpointCapError", "ConvergenceError",
    "DomainError", "IntegrationError", "NumericalFailure", "PoleError", "ScanExhaustedError",
    "BehaviorReport", "Certificate", "ExponentEntry", "ExponentTable", "classify",
    "count_zeros", "exponent_table", "find_exponent", "gauss_rate_fit", "gaussian_window_end",
    "tail_coefficient", "tail_slope",
    "OracleTrajectory", "integrate_barenblatt", "integrate_pucci",
    "AsymptoticDescriptor", "BuildOptions", "PiecewiseProfile", "ProblemParams", "Segment",
    "TailKind", "build_profile", "classify_asymptotics", "evaluate", "first_root",
    "reduced_root_equation", "BasisPair", "HypParams", "gamma", "kummer_m",
    "kummer_m_deriv", "reciprocal_gamma", "tricomi_u", "v_solution", "v_solution_deriv",
]
