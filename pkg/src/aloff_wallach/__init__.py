"""Invariant G2-instantons on Aloff-Wallach spaces X_{k,l} = SU(3)/U(1)_{k,l}."""
from .connections import (CurvatureModel, InvariantConnection, NonBasicCurvature, ansatz,
                          classify_abelian, classify_so3, deformation_det, gamma_delta,
                          instanton_residual, sigmas, sweep)
from .g2_family import G2Params, canonicalize, phi, psi, tau0
from .np_solver import NoConvergence, NpSolution, np_residual, solve_np, squash_np, x11_np_solutions
from .su3_frame import FrameSpec, build_frame, structure_constants
from .topology import CharClasses, char_classes, weight_bundle_classes
from .yang_mills import (DeltaZero, landscape_grid, ym_criticality_residual, ym_energy,
                         ym_gradient, ym_hessian)

__all__ = [
    "CharClasses", "CurvatureModel", "DeltaZero", "FrameSpec", "G2Params", "InvariantConnection",
    "NoConvergence", "NonBasicCurvature", "NpSolution", "ansatz", "build_frame", "canonicalize",
    "char_classes", "classify_abelian", "classify_so3", "deformation_det", "gamma_delta",
    "instanton_residual", "landscape_grid", "np_residual", "phi", "psi", "sigmas", "solve_np",
    "squash_np", "structure_constants", "sweep", "tau0", "weight_bundle_classes", "x11_np_solutions",
    "ym_criticality_residual", "ym_energy", "ym_gradient", "ym_hessian",
]
