"""Casimir interaction energies from single-layer boundary operators.

``Xi(i kappa) = log det(S S_diag^{-1})`` is assembled from Nystrom
discretizations of the single-layer operators of disjoint obstacles in one
or two dimensions, and fed into the spectral integrals giving Casimir
energies and von Neumann traces for configurations extended by ``r``
translation-invariant dimensions.
"""
from .boundary_ops import BoundaryMesh, LayerSystem, assemble, build_mesh
from .errors import (AssemblyError, BesselRangeError, CasimirError, ConvergenceError,
                     FactorizationError, InvalidArgumentError, InvalidGeometryError,
                     NumericalBreakdownError, SingularEvaluationError, UnsupportedParameterError)
from .geometry import (Curve2D, Obstacle, ObstacleSet, Point1D, make_circle, make_fourier_curve,
                       make_points_1d, make_set, min_separation, rotate_set, scale_set,
                       translate_set)
from .reduction import (QuadratureControls, ReductionResult, ReductionSpec, casimir_energy,
                        prefactor, spectral_integral, von_neumann_trace)
from .xi_det import XiFunction, XiSamples, xi_grid, xi_schur, xi_value

__version__ = "0.1.0"

__all__ = [
    "AssemblyError", "BesselRangeError", "BoundaryMesh", "CasimirError", "ConvergenceError",
    "Curve2D", "FactorizationError", "InvalidArgumentError", "InvalidGeometryError", "LayerSystem",
    "NumericalBreakdownError", "Obstacle", "ObstacleSet", "Point1D", "QuadratureControls",
    "ReductionResult", "ReductionSpec", "SingularEvaluationError", "UnsupportedParameterError",
    "XiFunction", "XiSamples", "assemble", "build_mesh", "casimir_energy", "make_circle",
    "make_fourier_curve", "make_points_1d", "make_set", "min_separation", "prefactor",
    "rotate_set", "scale_set", "spectral_integral", "translate_set", "von_neumann_trace",
    "xi_grid", "xi_schur", "xi_value",
]
