"""Finite Blaschke products, their multiplication operators on the Dirichlet,
Hardy and Bergman spaces, and a classifier for the reducing subspaces."""

from .errors import (
    BlaschkeError, DomainError, InternalConsistencyError, NumericalFailure,
    UsageError,
)
from .series import Polynomial, PowerSeries, poly_roots
from .blaschke import (
    BlaschkeProduct, CriticalSet, Moebius, compose, critical_points, evaluate,
    moebius_post_compose, preimages, taylor,
)
from .spaces import BERGMAN, DIRICHLET, HARDY, CoeffVector, SpaceKind, inner
from .operators import (
    CommutantProbeResult, ResidualReport, SubspaceBasis, TruncatedOperator,
    adjoint_apply, commutant_probe, mult_matrix, orbit_subspace,
    reducing_residual, u_pushforward, wandering_dim,
)
from .classify import (
    ClassificationResult, Decomposition, EquivalenceWitness,
    check_eq41_infeasible, classify, decompose_order4, enumerate_zn_lattice,
    is_equiv_z_phi_gamma_sq, is_equivalent_to_zn,
)

__version__ = "0.1.0"

__all__ = [
    "Polynomial", "PowerSeries", "poly_roots",
    "BERGMAN", "DIRICHLET", "HARDY", "CoeffVector", "SpaceKind", "inner",
    "BlaschkeError",
    "DomainError",
    "InternalConsistencyError",
    "NumericalFailure",
    "UsageError",
    "BlaschkeProduct",
    "CriticalSet",
    "Moebius",
    "compose",
    "critical_points",
    "evaluate",
    "moebius_post_compose",
    "preimages",
    "taylor",
    "CommutantProbeResult",
    "ResidualReport",
    "SubspaceBasis",
    "TruncatedOperator",
    "adjoint_apply",
    "commutant_probe",
    "mult_matrix",
    "orbit_subspace",
    "reducing_residual",
    "u_pushforward",
    "wandering_dim",
    "ClassificationResult",
    "Decomposition",
    "EquivalenceWitness",
    "check_eq41_infeasible",
    "classify",
    "decompose_order4",
    "enumerate_zn_lattice",
    "is_equiv_z_phi_gamma_sq",
    "is_equivalent_to_zn",
]
