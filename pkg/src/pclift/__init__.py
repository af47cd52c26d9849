"""Variability-aware fact extraction and lifted Datalog analysis."""

from .analysis import (
    AnalysisBundle,
    ComponentGraph,
    behaviour_alteration_program,
    build_component_graph,
    export_graph_json,
)
from .datalog import AnnotatedDatabase, Program, load_facts, parse_program
from .engine import (
    EvalOptions,
    RunStats,
    apply_feature_model,
    evaluate_lifted,
    ground_eval,
    project,
    strip_pcs,
    verify_lifting,
)
from .extractor import (
    ExtractionConfig,
    extract,
    extract_dir,
    extract_sources,
    load_extraction_config,
    recognize_features,
)
from .factgraph import FactGraph
from .featexpr import (
    Feature,
    FeatureModel,
    FeatureRegistry,
    PcStore,
    PresenceCondition,
    abstract_comparison,
    all_configurations,
    config_from_present,
    count_unique_pcs,
    enum_group_constraints,
    evaluate,
    implies,
    is_sat,
    parse_feature_expr,
    pc_and,
    pc_not,
    pc_or,
    render_pc,
)
from .minic import link, parse_mini_c, to_source
from .tamodel import TaDocument, emit_ta, parse_ta, ta2tsv

__all__ = [name for name in dir() if not name.startswith("_")]
