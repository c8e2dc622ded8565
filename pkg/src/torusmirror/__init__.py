"""Numerical mirror symmetry on the elliptic curve.

Theta functions, stable bundles and their Dolbeault cohomology, the mapping
cone of the bump morphism, Lagrangian branes with their structure constants,
and the unimodular transport relating general slopes to the basic case.
"""

from .bundles import (BundleDescriptor, IsoWitness, cocycle_check, connection_data, degree,
                      hom_dims, iso_class_equal, iso_witness, make_bundle, transition_data)
from .cone import (ConeReport, MorphismConfig, c_tau, det_spectrum, eta_class, identity_id_sum,
                   make_bump, make_cone, phi, phi_tilde, verify_cone)
from .dolbeault import KernelEstimate, solve_cone_h0, solve_h0
from .errors import (ConfigError, DomainError, NonTransversalError, QuadratureError,
                     StabilityError, TorusMirrorError, TruncationError)
from .fukaya import (BraneDescriptor, intersections, m2_constant, m3_nontransversal_constant,
                     make_brane, triangles)
from .sl2z import LatticeMatrix, act_on_brane, reduction_matrix, transport_cone_class, transported_cone
from .theta import ModuliParams, ThetaChar, jacobi_null_product, lattice_factor, theta, theta_dz

__version__ = "0.1.0"

__all__ = [
    "BraneDescriptor", "BundleDescriptor", "ConeReport", "ConfigError", "DomainError", "IsoWitness",
    "KernelEstimate", "LatticeMatrix", "ModuliParams", "MorphismConfig", "NonTransversalError",
    "QuadratureError", "StabilityError", "ThetaChar", "TorusMirrorError", "TruncationError",
    "act_on_brane", "c_tau", "cocycle_check", "connection_data", "degree", "det_spectrum",
    "eta_class", "hom_dims", "identity_id_sum", "intersections", "iso_class_equal", "iso_witness",
    "jacobi_null_product", "lattice_factor", "m2_constant", "m3_nontransversal_constant",
    "make_brane", "make_bump", "make_bundle", "make_cone", "phi", "phi_tilde", "reduction_matrix",
    "solve_cone_h0", "solve_h0", "theta", "theta_dz", "transition_data", "transport_cone_class",
    "transported_cone", "triangles", "verify_cone",
]
