"""Recognition and derivation tools for stack-carrying grammars.

The pipeline: parse a grammar, intersect its context-free backbone with
an input to get a shared forest, reattach the stack schemas, close the
stack-flow relations, and read off a context-free derivation grammar
whose sentences are exactly the derivations of the input.
"""

from .derive import (
    DerivationCount,
    EnumeratedSentence,
    ParseTree,
    count_sentences,
    derivations_of_length,
    enumerate_sentences,
    map_to_source,
    replay,
    sentence_to_tree,
)
from .errors import (
    GrammarSyntaxError,
    InvalidDerivationError,
    LigforgeError,
    NormalFormError,
    UnknownTokenError,
)
from .forest import (
    ForestNonterminal,
    LigedForest,
    SharedForest,
    build_fsa,
    build_liged_forest,
    build_shared_forest,
    reduce_cfg,
)
from .grammar import (
    CfGrammar,
    CfProduction,
    Flank,
    LigGrammar,
    LigProduction,
    StackSchema,
    Violation,
    assemble_grammar,
    cf_backbone,
    normalize,
    parse_grammar,
    render_grammar,
    validate_normal_form,
)
from .ldg import (
    Ldg,
    LdgProduction,
    Pair,
    PipelineResult,
    Plain,
    build_ldg,
    is_language_empty,
    ldg_signature,
    recognize,
    reduce_ldg,
    static_filter,
    static_ldg,
)
from .oracle import OracleConfig, OracleResult, linearize, oracle_language, search_trees
from .relations import (
    EQ1,
    EQP,
    SPINE,
    RelationKind,
    RelationSet,
    check_fixpoint,
    closure,
    level1,
    pop1,
    popp,
    push1,
)
from .report import RunReport, bench_rows, fit_degree6, render_figure, write_csv

__version__ = "0.1.0"

__all__ = [
    "CfGrammar",
    "CfProduction",
    "DerivationCount",
    "EQ1",
    "EQP",
    "EnumeratedSentence",
    "Flank",
    "ForestNonterminal",
    "GrammarSyntaxError",
    "InvalidDerivationError",
    "Ldg",
    "LdgProduction",
    "LigGrammar",
    "LigProduction",
    "LigedForest",
    "LigforgeError",
    "NormalFormError",
    "OracleConfig",
    "OracleResult",
    "Pair",
    "ParseTree",
    "PipelineResult",
    "Plain",
    "RelationKind",
    "RelationSet",
    "RunReport",
    "SPINE",
    "SharedForest",
    "StackSchema",
    "UnknownTokenError",
    "Violation",
    "assemble_grammar",
    "bench_rows",
    "build_fsa",
    "build_ldg",
    "build_liged_forest",
    "build_shared_forest",
    "cf_backbone",
    "check_fixpoint",
    "closure",
    "count_sentences",
    "derivations_of_length",
    "enumerate_sentences",
    "fit_degree6",
    "is_language_empty",
    "ldg_signature",
    "level1",
    "linearize",
    "map_to_source",
    "normalize",
    "oracle_language",
    "parse_grammar",
    "pop1",
    "popp",
    "push1",
    "recognize",
    "reduce_cfg",
    "reduce_ldg",
    "render_figure",
    "render_grammar",
    "replay",
    "search_trees",
    "sentence_to_tree",
    "static_filter",
    "static_ldg",
    "validate_normal_form",
    "write_csv",
]
