"""Maslov and Hörmander indices of Lagrangian loops, and Maslov-class checks
for discretized Lagrangian tori in C^n."""

from .errors import (DegenerateForm, DimensionMismatch, InconsistentOverlap,
                     MaslovKitError, NotClosed, NotLagrangian, NotTransversal,
                     NumericalError, RankDeficient, RetryExhausted, Undersampled,
                     ValidationError)
from .hormander import (CechCocycle, GoodCoverOnLoop, LagrangianQuadruple,
                        SectionOverLoop, build_cocycle, hormander_index,
                        hormander_pairing, pair_with_fundamental_cycle,
                        pullback_pairing, q_form, signature)
from .kernels import BACKEND
from .maslov import LagrangianLoop, is_liftable, maslov_index, winding
from .surface import (ImmersedLagrangianGrid, MeanCurvatureData, curvature_data,
                      fomenko_check, gauss_indices, in_lh, maslov_class_hormander,
                      maslov_via_beta, mean_curvature)
from .symplectic import (LagrangianFrame, SymplecticSpace, det_squared,
                         lagrangian_residual, principal_angles, projection_across,
                         standard_space, to_unitary, transversal)
from .tolerances import Tolerances, scaled

__version__ = "0.1.0"

__all__ = [
    "DegenerateForm",
    "DimensionMismatch",
    "InconsistentOverlap",
    "MaslovKitError",
    "NotClosed",
    "NotLagrangian",
    "NotTransversal",
    "NumericalError",
    "RankDeficient",
    "RetryExhausted",
    "Undersampled",
    "ValidationError",
    "CechCocycle",
    "GoodCoverOnLoop",
    "LagrangianQuadruple",
    "SectionOverLoop",
    "build_cocycle",
    "hormander_index",
    "hormander_pairing",
    "pair_with_fundamental_cycle",
    "pullback_pairing",
    "q_form",
    "signature",
    "BACKEND",
    "LagrangianLoop",
    "is_liftable",
    "maslov_index",
    "winding",
    "ImmersedLagrangianGrid",
    "MeanCurvatureData",
    "curvature_data",
    "fomenko_check",
    "gauss_indices",
    "in_lh",
    "maslov_class_hormander",
    "maslov_via_beta",
    "mean_curvature",
    "LagrangianFrame",
    "SymplecticSpace",
    "det_squared",
    "lagrangian_residual",
    "principal_angles",
    "projection_across",
    "standard_space",
    "to_unitary",
    "transversal",
    "Tolerances",
    "scaled",
]
