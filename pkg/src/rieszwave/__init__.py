"""Solutions of the wave-like equation u_tt + kappa (1/pi) d/dx p.v. int u(y)/(x-y) dy = 0.

Series representations live in :mod:`rieszwave.analytic`, independent
reference evaluators in :mod:`rieszwave.oracle`, zero tracking in
:mod:`rieszwave.nodes` and cross-checks in :mod:`rieszwave.compare`.
"""

__version__ = "0.1.0"

from .analytic import (EvalPoint, PhysicalParams, Representation, SeriesControls, big_lambda,
                       gaussian_ic, lambda_nk, scaled_argument, theta_k_series, u_approx_leading,
                       u_approx_next, u_delta, u_delta_profile, u_doublesum, u_hseries, u_lambda,
                       u_lambda_grid)
from .errors import (BracketError, ConvergenceError, DomainError, GridResolutionWarning,
                     RieszWaveError, ValidityWarning)
from .evaluators import evaluate, evaluate_grid
from .oracle import (convolution_u, fresnel_delta_u, profile_G, profile_G_fresnel, spectral_u)
from .quadrature import QuadratureControls, quadrature
from .specfun import SignedLogValue, gamma_ratio, log_gamma, recip_gamma

__all__ = [
    "EvalPoint", "PhysicalParams", "Representation", "SeriesControls", "QuadratureControls",
    "SignedLogValue", "big_lambda", "gaussian_ic", "lambda_nk", "scaled_argument",
    "theta_k_series", "u_approx_leading", "u_approx_next", "u_delta", "u_delta_profile",
    "u_doublesum", "u_hseries", "u_lambda", "u_lambda_grid", "evaluate", "evaluate_grid",
    "convolution_u", "fresnel_delta_u", "profile_G", "profile_G_fresnel", "spectral_u",
    "quadrature", "gamma_ratio", "log_gamma", "recip_gamma", "BracketError",
    "ConvergenceError", "DomainError", "GridResolutionWarning", "RieszWaveError",
    "ValidityWarning",
]
