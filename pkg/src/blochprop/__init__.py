"""Closed-form propagator, steady state, eigenframe and regime map for the
Bloch equation dM/dt + Gamma M = M0 R3 z with constant field and rates."""
from .atlas import (
    EQUAL_RATES,
    ScaledPoint,
    atlas_grid,
    classify_regime,
    degeneracy_boundaries,
    regime_of_system,
    root_isoline,
)
from .core import (
    CouplingSet,
    FieldVector,
    GammaMatrix,
    PartitionedSystem,
    RelaxationRates,
    build_gamma,
    gamma_from_params,
    gamma_squared_couplings,
    partition,
)
from .cubic import CanonicalCoeffs, CubicSolution, RootClass, analyse, canonical_coeffs, classify, solve_roots
from .eigenframe import EigenFrame, adjugate_eigenvector, frame_inverse, obliquity, real_basis, transformed_evolution
from .errors import BlochError
from .oracle import OracleConfig, expm_reference, integrate_reference
from .propagator import Propagator, ch_coefficients, propagator
from .solution import Magnetization, evolve, steady_state, trajectory

__all__ = [
    "BlochError", "CanonicalCoeffs", "CouplingSet", "CubicSolution", "EQUAL_RATES", "EigenFrame",
    "FieldVector", "GammaMatrix", "Magnetization", "OracleConfig", "PartitionedSystem", "Propagator",
    "RelaxationRates", "RootClass", "ScaledPoint", "adjugate_eigenvector", "analyse", "atlas_grid",
    "build_gamma", "canonical_coeffs", "ch_coefficients", "classify", "classify_regime",
    "degeneracy_boundaries", "evolve", "expm_reference", "frame_inverse", "gamma_from_params",
    "gamma_squared_couplings", "integrate_reference", "obliquity", "partition", "propagator",
    "real_basis", "regime_of_system", "root_isoline", "solve_roots", "steady_state",
    "trajectory", "transformed_evolution",
]
