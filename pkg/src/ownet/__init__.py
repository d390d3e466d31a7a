"""Reasoning engine for company ownership networks."""

from .analytics import (
    AnalyticsReport,
    Partition,
    analytics_report,
    impact_by_region,
    strongly_connected_components,
    weakly_connected_components,
)
from .conglomerates import (
    ConglomerateIndicators,
    ConglomeratePartition,
    conglomerate_indicators,
    conglomerates,
    undirected_ownership,
    vicinity_pairs,
)
from .control import ControlResult, controls, joint_controls
from .errors import (
    ConfigError,
    DivergentCycleError,
    GraphLoadError,
    InsufficientShareError,
    OwnetError,
    SubgraphError,
    UnknownEntityError,
)
from .generator import GeneratorConfig, generate
from .goldenpower import (
    Acquisition,
    GpVerdict,
    LimitResult,
    ProtectionPlan,
    Scenario,
    Witness,
    cautious_gp_check,
    collusion_gp_check,
    gp_check,
    gp_limit,
    gp_protection,
)
from .model import (
    DecreeConfig,
    Entity,
    OwnershipGraph,
    Transaction,
    ValidationReport,
    apply_transaction,
    apply_transactions,
    filter_by_activity,
    filter_by_decree,
    load_graph,
    load_graph_from_paths,
    save_graph,
    save_graph_to_paths,
    validate,
)
from .ownership import (
    BaldonePath,
    ConvergenceReport,
    OwnershipVector,
    check_convergence,
    enumerate_baldone_paths,
    epsilon_baldone_ownership,
    integrated_ownership,
)

__version__ = "0.1.0"
