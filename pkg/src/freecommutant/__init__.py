"""Exact free-cumulant calculus for commutators of a semicircular element
with a free partner, with the verification commands built on top of it."""

from .commutator import (
    AdditivityReport,
    DistributionPair,
    I_S_X,
    I_X_S,
    cancellation_sum,
    closed_form_cumulant,
    commutator_polynomial,
    cumulant_sequence_of,
    expansion_cumulant,
    freeness_witness,
    perturbed_partner,
    sum_with_commutator,
    verify_additivity,
)
from .cumulants import (
    CumulantSequence,
    GaussianRational,
    GR_I,
    GR_ONE,
    GR_ZERO,
    MomentSequence,
    Polynomial,
    S,
    X,
    cumulant_of_polynomials,
    cumulant_of_word_products,
    cumulants_from_moments,
    kappa_block,
    kappa_pi,
    moments_from_cumulants,
)
from .errors import (
    DomainError,
    EngineConsistencyError,
    FreeCommutantError,
    GroundSetError,
    KindError,
    SizeLimitError,
    SpecSyntaxError,
    TruncationError,
)
from .fid import FidVerdict, boxplus, compound_poisson_from_rho, hankel_fid_check
from .fock import (
    ADJOINT_PAIRS,
    FockVector,
    OperatorName,
    RhoMoments,
    apply,
    composition_formula_cumulant,
    inner_product,
    model_cumulant,
    model_cumulant_parts,
    verify_adjointness,
)
from .partitions import (
    ExpansionMaps,
    Partition,
    PartitionKind,
    assign_by_blocks,
    compose_interval,
    enumerate_partitions,
    expansion_maps,
    is_noncrossing,
    iter_partitions,
    join,
    joins_to_full,
)

__version__ = "0.1.0"

__all__ = [
    "AdditivityReport",
    "ADJOINT_PAIRS",
    "CumulantSequence",
    "DistributionPair",
    "DomainError",
    "EngineConsistencyError",
    "ExpansionMaps",
    "FidVerdict",
    "FockVector",
    "FreeCommutantError",
    "GR_I",
    "GR_ONE",
    "GR_ZERO",
    "GaussianRational",
    "GroundSetError",
    "I_S_X",
    "I_X_S",
    "KindError",
    "MomentSequence",
    "OperatorName",
    "Partition",
    "PartitionKind",
    "Polynomial",
    "RhoMoments",
    "S",
    "SizeLimitError",
    "SpecSyntaxError",
    "TruncationError",
    "X",
    "apply",
    "assign_by_blocks",
    "boxplus",
    "cancellation_sum",
    "closed_form_cumulant",
    "commutator_polynomial",
    "compose_interval",
    "composition_formula_cumulant",
    "compound_poisson_from_rho",
    "cumulant_of_polynomials",
    "cumulant_of_word_products",
    "cumulant_sequence_of",
    "cumulants_from_moments",
    "enumerate_partitions",
    "expansion_cumulant",
    "expansion_maps",
    "freeness_witness",
    "hankel_fid_check",
    "inner_product",
    "is_noncrossing",
    "iter_partitions",
    "join",
    "joins_to_full",
    "kappa_block",
    "kappa_pi",
    "model_cumulant",
    "model_cumulant_parts",
    "moments_from_cumulants",
    "perturbed_partner",
    "sum_with_commutator",
    "verify_additivity",
    "verify_adjointness",
]
