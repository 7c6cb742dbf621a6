"""Cocycles of the affine metaplectic algebra, with a truncated Fock-space
numeric oracle, noncommutative torus and rotation-orbifold specializations.
"""

from .clifford import (
    CliffordElement,
    SpinorOperator,
    c_clifford,
    c_vector,
    fermion_heat,
    fermion_number,
    multiplicative_extension,
    pullback_operator,
    supertrace,
    symbol,
)
from .cocycle import (
    NCForm,
    ProjectionMatrix,
    differential,
    form_pullback,
    pair_with_projection,
    phi_cocycle,
    psi,
    psi_1d_closed_form,
    tau_localized,
    torus_psi,
)
from .errors import DimensionMismatchError, SizingError, ValidationError
from .fock import (
    FockOperator,
    FockSpace,
    cocycle_oracle,
    fit_asymptotics,
    getzler_vanishing_check,
    mehler_closed_form,
    mehler_closed_form_multi,
    oscillator_zeta,
    residue_from_heat,
    spectral_residue_estimate,
)
from .group import (
    AlgebraElement,
    FixedPointData,
    Monomial,
    affine_has_fixed_point,
    compose,
    epsilon_phase,
    fixed_point_data,
    inverse,
    same_conjugacy_class,
    w_transform,
)
from .multivector import (
    GrassmannElement,
    berezin,
    exp_neg_omega,
    restrict,
    sigma_one_form,
    wedge,
)
from .orbifold import (
    ConjugacyClass,
    LatticeMonomial,
    OrbifoldSpec,
    class_table_rows,
    compose_lattice,
    enumerate_classes,
    lattice_inverse,
    orbifold_trace,
)

__version__ = "0.1.0"
