"""Model-agnostic explanation engine built on stratified causal-effect estimates.

The package discovers the direct causes of a prediction column, enriches
them with combined causes and interactions mined as closed frequent
conjunctions, and ranks everything by stratified effect size for both
model-level and per-instance explanations.
"""

from .dataset import (
    Attribute,
    AttributeSchema,
    BinaryDataset,
    Column,
    Literal,
    binarize_numeric_median,
    cond_prob_y,
    load_csv,
    load_schema,
    marginal_count,
    save,
)
from .ece import (
    EceEstimate,
    EceParams,
    EpaMember,
    ExtendedParentSet,
    avg_ece,
    avg_ece_combined_cause,
    avg_eece,
    build_epa,
    classify_explanatory_causes,
    classify_interaction,
    dedupe_members,
    eece_local,
    feature_effect,
    select_conditioning_subset,
    stratum_ece,
)
from .errors import (
    CapacityError,
    EceLensError,
    ParseError,
    SchemaError,
    ValidationError,
)
from .independence import CiTestResult, association_strength, g2_test, is_associated
from .patterns import (
    CombinedVariable,
    MiningParams,
    enumerate_literals,
    materialize,
    mine_closed_patterns,
)
from .report import ExplanationReport, RunConfig, render, run_global, run_local
from .structure import ParentSet, discover_parents

__version__ = "0.1.0"
