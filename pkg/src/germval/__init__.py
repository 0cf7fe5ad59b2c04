"""Exact thresholds and discrepancies of divisorial valuations over
smooth and du Val surface germs, modeled as clusters of infinitely near
points."""

from .errors import (
    GermvalError,
    InvalidStep,
    MldMinusInfinity,
    NotAnLctComputer,
    NotAntinef,
    NotFound,
    SingularMatrix,
)
from .exact import format_rational, is_negative_definite, parse_rational, solve_symmetric
from .germ import (
    SMOOTH,
    BaseGerm,
    BlowupStep,
    Cluster,
    CurveInfo,
    DualGraph,
    Free,
    Satellite,
    ancestor_curves,
    build,
    canonical_vector,
    cluster_from_file,
    cluster_from_json,
    cluster_to_json,
    curve_table,
    du_val,
    dual_graph,
    extend,
    intersection_matrix,
    legal_steps,
    prune_to_ancestors,
    to_dot,
)
from .valuation import (
    ValuationProfile,
    asymptotic_multiplicities,
    fingen_degree,
    profile,
    rees_valuations,
    unload,
    valuation_ideal,
)
from .thresholds import (
    MINUS_INFINITY,
    PLUS_INFINITY,
    Classification,
    CompleteIdeal,
    LctReport,
    PairSpec,
    asymptotic_lct,
    classify,
    complete_ideal,
    computes_lct,
    computes_mld,
    lct_gap,
    lct_ideal,
    lct_witness_ideal,
    log_discrepancy,
    mld_at_origin,
    mld_obstruction,
    pair_spec,
    plt_check,
    unique_lc_place,
)
from .explorer import (
    AtlasRow,
    EnumBudget,
    VerificationReport,
    atlas_rows,
    enumerate_clusters,
    enumerate_pairs,
    extremal_gaps,
    verify_theorems,
    write_atlas_csv,
)

__version__ = "0.1.0"
