"""Counterfactual explanations and x-Resp responsibility scores.

Given a naive-Bayes classifier over categorical features and a classified
entity, this package enumerates the entity's counterfactual versions
(reachable single-feature interventions whose label flips), scores each
feature's responsibility for the outcome, answers brave/cautious queries
over the counterfactual models, and emits the equivalent solver program.
A small stable-model kernel for ground disjunctive programs is included.
"""

from .asp import (
    ATOM_CAP_ENV,
    DEFAULT_ATOM_CAP,
    EnumerationCapError,
    GroundProgram,
    ProgramSyntaxError,
    Rule,
    WeakConstraint,
    answer_query_ground,
    minimal_models,
    parse_program,
    reduct,
    stable_models,
)
from .constraints import (
    ConstraintError,
    ConstraintSet,
    Dependency,
    admits,
    empty_constraints,
    load_constraints,
    parse_constraints,
    propagate,
)
from .dlv_emit import (
    DEFAULT_EMIT_MAXINT,
    EmitError,
    EmitterOptions,
    FactParseError,
    emit_cip,
    normalize_tokens,
    parse_facts,
    split_statements,
)
from .engine import (
    CounterfactualVersion,
    Explanation,
    Intervention,
    ResponsibilityReport,
    enumerate_counterfactuals,
    explanations_of,
    min_change_versions,
    strict_actual_cause,
    xresp,
)
from .naive_bayes import (
    DEFAULT_MAXINT,
    ModelFormatError,
    NaiveBayesModel,
    PercentModel,
    StagedOverflowError,
    classify_exact,
    classify_staged,
    load_model,
    parse_model,
    save_model,
    serialize_model,
    to_percent,
    train,
)
from .queries import (
    ModelAtomSet,
    Query,
    QueryError,
    answer,
    atoms_of,
    load_queries,
    model_atom_sets,
    parse_query,
    render_row,
    render_value,
)
from .schema import (
    DataError,
    Dataset,
    Entity,
    FeatureSchema,
    SchemaError,
    load_dataset,
    parse_entity,
    serialize_dataset,
    validate_values,
)

__version__ = "0.1.0"

__all__ = [
    "ATOM_CAP_ENV",
    "ConstraintError",
    "ConstraintSet",
    "CounterfactualVersion",
    "DEFAULT_ATOM_CAP",
    "DEFAULT_EMIT_MAXINT",
    "DEFAULT_MAXINT",
    "DataError",
    "Dataset",
    "Dependency",
    "EmitError",
    "EmitterOptions",
    "Entity",
    "EnumerationCapError",
    "Explanation",
    "FactParseError",
    "FeatureSchema",
    "GroundProgram",
    "Intervention",
    "ModelAtomSet",
    "ModelFormatError",
    "NaiveBayesModel",
    "PercentModel",
    "ProgramSyntaxError",
    "Query",
    "QueryError",
    "ResponsibilityReport",
    "Rule",
    "SchemaError",
    "StagedOverflowError",
    "WeakConstraint",
    "admits",
    "answer",
    "answer_query_ground",
    "atoms_of",
    "classify_exact",
    "classify_staged",
    "emit_cip",
    "empty_constraints",
    "enumerate_counterfactuals",
    "explanations_of",
    "load_constraints",
    "load_dataset",
    "load_model",
    "load_queries",
    "min_change_versions",
    "minimal_models",
    "model_atom_sets",
    "normalize_tokens",
    "parse_constraints",
    "parse_entity",
    "parse_facts",
    "parse_model",
    "parse_program",
    "parse_query",
    "propagate",
    "reduct",
    "render_row",
    "render_value",
    "save_model",
    "serialize_dataset",
    "serialize_model",
    "split_statements",
    "stable_models",
    "strict_actual_cause",
    "to_percent",
    "train",
    "xresp",
]
