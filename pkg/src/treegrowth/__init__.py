"""Exact experiments with group actions on trees and product-set growth."""
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .displacement import (
    ProductAction,
    conjugate_reduce,
    displacement,
    factor_transfer,
    min_displacement,
    min_displacement_exhaustive,
    quasi_center,
)
from .errors import InconclusiveError, InvariantViolation, PreconditionError
from .groups import (
    BallLimitError,
    DirectProduct,
    FreeGroup,
    FreeProduct,
    GroupError,
    MarkedSubset,
    PermutationGroup,
    group_from_spec,
    semigroup_ball,
    symmetrize,
)
from .growth import (
    GrowthSeries,
    commutator_set,
    free_rank_verify,
    growth_rate,
    product_set_counts,
    psg_check,
    write_growth_csv,
)
from .loxodromic import (
    build_free_base,
    classify_action,
    joint_loxodromic,
    pingpong_pair,
    short_loxodromic,
)
from .rng import SplitMix64
from .schreier import (
    FiniteQuotient,
    Subgroup,
    chain_psg_bound,
    coset_structure,
    schreier_generators,
    schreier_generators_normal,
)
from .trees import (
    BassSerreTree,
    CayleyTree,
    StarTree,
    SubdividedTree,
    gromov_product,
    loxodromic_criterion,
    make_tree,
    same_endpoint_pair,
    translation_length,
)

__version__ = "0.1.0"

__all__ = [
    "BallLimitError", "BassSerreTree", "CayleyTree", "ConfigError", "DirectProduct", "ExperimentConfig",
    "FiniteQuotient", "FreeGroup", "FreeProduct", "GroupError", "GrowthSeries", "InconclusiveError",
    "InvariantViolation", "MarkedSubset", "PermutationGroup", "PreconditionError", "ProductAction",
    "SplitMix64", "StarTree", "SubdividedTree", "Subgroup", "build_free_base", "chain_psg_bound",
    "classify_action", "commutator_set", "conjugate_reduce", "coset_structure", "displacement",
    "factor_transfer", "free_rank_verify", "gromov_product", "group_from_spec", "growth_rate",
    "joint_loxodromic", "load_config", "loxodromic_criterion", "make_tree", "min_displacement",
    "min_displacement_exhaustive", "parse_config", "pingpong_pair", "product_set_counts", "psg_check",
    "quasi_center", "same_endpoint_pair", "schreier_generators", "schreier_generators_normal",
    "semigroup_ball", "short_loxodromic", "symmetrize", "translation_length", "write_growth_csv",
]
