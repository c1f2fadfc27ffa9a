"""Yang-Mills calculus for matrix-valued complex forms on C^2.

The submodules layer as ``algebra`` (matrices, traces) -> ``coefficients``
(exact and sampled matrix functions) -> ``forms`` (wedge, d, Wirtinger
pieces) -> ``hodge`` (metrics, star, inner products) -> ``yang_mills``
(curvature, currents, gauge) -> ``instantons`` and ``variational``.
``checks`` and ``cli`` drive scenario files.
"""
from .algebra import TraceKind, adjoint, commutator, trace
from .coefficients import ExactCoefficient, constant, monomial, variable
from .forms import FormField, FormValue, basis, exterior_d, wedge
from .hodge import EUCLIDEAN, MINKOWSKI, DualityClass, QuadratureSpec, classify_duality, global_inner, star
from .yang_mills import Connection, covariant_costar, covariant_d, current, curvature, ym_residuals
from .instantons import build_bpst, build_dirac_monopole, build_eta_potential
from .variational import directional_derivative, extract_eb, functional, optimize_profile

__version__ = "0.1.0"

__all__ = [
    "TraceKind", "adjoint", "commutator", "trace",
    "ExactCoefficient", "constant", "monomial", "variable",
    "FormField", "FormValue", "basis", "exterior_d", "wedge",
    "EUCLIDEAN", "MINKOWSKI", "DualityClass", "QuadratureSpec", "classify_duality", "global_inner", "star",
    "Connection", "covariant_costar", "covariant_d", "current", "curvature", "ym_residuals",
    "build_bpst", "build_dirac_monopole", "build_eta_potential",
    "directional_derivative", "extract_eb", "functional", "optimize_profile",
]
