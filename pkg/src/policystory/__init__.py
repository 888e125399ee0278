"""Compile annotated privacy policies into verifiable narrative bundles."""

from .compiler import (
    CompileError,
    InputsRejectedError,
    NarrativeBundle,
    Rect,
    Row,
    Step,
    actor_rows,
    build_bundle,
    build_steps,
    expand_category_edges,
    merge_practices,
    parse_bundle,
    search_plan,
    serialize_bundle,
    stats,
)
from .policy import (
    AnchorSpan,
    EmptyPolicyError,
    PolicyDocument,
    PolicyEncodingError,
    PolicyError,
    Section,
    normalize,
    parse_policy,
    resolve_quote,
    word_count,
)
from .schema import (
    Actor,
    Category,
    DataItem,
    DataRef,
    Diagnostic,
    NarrativeConfig,
    Practice,
    PracticeGraph,
    SourceFacet,
    ValidationReport,
    lint_certainty,
    parse_config,
    parse_graph,
    serialize_config,
    serialize_graph,
    validate,
)

__version__ = "0.1.0"
