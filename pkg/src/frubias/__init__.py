"""Model-free bias auditing with fuzzy-rough uncertainty."""

from .dataset import (DataTable, FeatureKind, FeatureMask, FeatureSpec, SchemaHint, TableView, apply_mask,
                      binarize_age, german_credit_adapter, load_german, load_table, read_schema)
from .distance import DistanceCache, hetero_distance, pairwise_distances
from .errors import ConfigurationError, DomainError, FrubiasError, ParseError, ValidationError
from .fru import (FruResult, Level1Report, Level2Report, SweepGrid, fru_for_feature, fru_for_mask,
                  fuzzy_rough_uncertainty, level1, level2, sweep)
from .granulation import RegionMembership, compute_regions, lower_approximation, upper_approximation
from .operators import DistanceKind, FuzzyConfig, ImplicatorKind, TNormKind, implicate, similarity, tnorm

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "DataTable", "DistanceCache", "DistanceKind", "DomainError", "FeatureKind",
    "FeatureMask", "FeatureSpec", "FrubiasError", "FruResult", "FuzzyConfig", "ImplicatorKind",
    "Level1Report", "Level2Report", "ParseError", "RegionMembership", "SchemaHint", "SweepGrid",
    "TNormKind", "TableView", "ValidationError", "apply_mask", "binarize_age", "compute_regions",
    "fru_for_feature", "fru_for_mask", "fuzzy_rough_uncertainty", "german_credit_adapter",
    "hetero_distance", "implicate", "level1", "level2", "load_german", "load_table",
    "lower_approximation", "pairwise_distances", "read_schema", "similarity", "sweep", "tnorm",
    "upper_approximation",
]
