"""Command-line frontend.

Subcommands tie the library together end to end: train and persist a
classifier, classify single entities, enumerate counterfactual versions,
report responsibility scores, answer brave/cautious queries over the
counterfactual models, emit the solver program for an instance, and run the
bundled stable-model kernel on a ground program file.

Every run is deterministic: identical invocations produce byte-identical
output.  Errors surface as one-line ``xresp: <Kind>: <detail>`` diagnostics
on stderr with a non-zero exit status.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .asp import parse_program, stable_models
from .constraints import ConstraintSet, load_constraints
from .dlv_emit import DEFAULT_EMIT_MAXINT, EmitterOptions, emit_cip
from .engine import (
    Model,
    enumerate_counterfactuals,
    explanations_of,
    min_change_versions,
    xresp,
)
from .naive_bayes import (
    DEFAULT_MAXINT,
    NaiveBayesModel,
    classify_exact,
    classify_staged,
    load_model,
    serialize_model,
    to_percent,
    train,
)
from .queries import answer, load_queries, model_atom_sets, render_row
from .schema import Entity, load_dataset, parse_entity


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"xresp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xresp",
        description=(
            "Counterfactual explanations and responsibility scores for "
            "naive-Bayes classifications."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a classifier and persist it")
    p_train.add_argument("--data", required=True, help="training CSV")
    p_train.add_argument(
        "--positive-label",
        help="label treated as positive (default: the majority label)",
    )
    p_train.add_argument("--out", help="model file (default: stdout)")
    p_train.set_defaults(handler=_cmd_train)

    p_classify = sub.add_parser("classify", help="classify one entity")
    _add_model_source(p_classify)
    _add_entity(p_classify)
    _add_classifier_mode(p_classify)
    p_classify.set_defaults(handler=_cmd_classify)

    p_cf = sub.add_parser(
        "counterfactuals", help="enumerate label-flipping entity versions"
    )
    _add_model_source(p_cf)
    _add_entity(p_cf)
    _add_classifier_mode(p_cf)
    _add_engine_flags(p_cf)
    p_cf.add_argument(
        "--min-change",
        action="store_true",
        help="keep only versions with the fewest changed features",
    )
    p_cf.set_defaults(handler=_cmd_counterfactuals)

    p_explain = sub.add_parser(
        "explain", help="responsibility scores and full explanations"
    )
    _add_model_source(p_explain)
    _add_entity(p_explain)
    _add_classifier_mode(p_explain)
    _add_engine_flags(p_explain)
    p_explain.set_defaults(handler=_cmd_explain)

    p_query = sub.add_parser(
        "query", help="answer queries over the counterfactual models"
    )
    _add_model_source(p_query)
    _add_entity(p_query)
    _add_classifier_mode(p_query)
    _add_engine_flags(p_query)
    p_query.add_argument("--queries", required=True, help="query file, one per line")
    semantics = p_query.add_mutually_exclusive_group(required=True)
    semantics.add_argument(
        "--brave",
        dest="semantics",
        action="store_const",
        const="brave",
        help="answers true in some model",
    )
    semantics.add_argument(
        "--cautious",
        dest="semantics",
        action="store_const",
        const="cautious",
        help="answers true in all models",
    )
    p_query.add_argument(
        "--min-change",
        action="store_true",
        help="query only the minimum-change models",
    )
    p_query.add_argument(
        "--no-pb-num",
        action="store_true",
        help="omit staged-probability atoms from the models",
    )
    p_query.set_defaults(handler=_cmd_query)

    p_emit = sub.add_parser(
        "emit-dlv", help="emit the counterfactual intervention program"
    )
    _add_model_source(p_emit)
    _add_entity(p_emit)
    p_emit.add_argument("--constraints", help="domain-knowledge file")
    p_emit.add_argument(
        "--weak",
        action="store_true",
        help="append the change-minimizing weak constraints",
    )
    p_emit.add_argument(
        "--no-domain-rules",
        action="store_true",
        help="emit only the core program, without domain-knowledge rules",
    )
    p_emit.add_argument(
        "--maxint",
        type=int,
        default=DEFAULT_EMIT_MAXINT,
        help="#maxint ceiling written into the program",
    )
    p_emit.add_argument("--out", help="output file (default: stdout)")
    p_emit.set_defaults(handler=_cmd_emit)

    p_solve = sub.add_parser(
        "solve-asp", help="stable models of a ground disjunctive program"
    )
    p_solve.add_argument("program", help="program file")
    p_solve.set_defaults(handler=_cmd_solve)

    return parser


def _add_model_source(sub: argparse.ArgumentParser) -> None:
    source = sub.add_mutually_exclusive_group(required=True)
    source.add_argument("--data", help="training CSV (trains on the fly)")
    source.add_argument("--model", help="persisted model file")


def _add_entity(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--entity", required=True, help="comma-separated feature values"
    )
    sub.add_argument("--eid", default="e", help="entity identifier (default: e)")


def _add_classifier_mode(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--classifier",
        choices=("staged", "exact"),
        default="staged",
        help="staged integer pipeline (default) or exact rationals",
    )
    sub.add_argument(
        "--maxint",
        type=int,
        default=DEFAULT_MAXINT,
        help="overflow ceiling for staged products",
    )


def _add_engine_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--constraints", help="domain-knowledge file")
    sub.add_argument(
        "--strict",
        action="store_true",
        help=(
            "positive-to-negative flips only, and forbidden combinations "
            "also apply to the original entity"
        ),
    )


# ---------------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------------


def _base_model(args: argparse.Namespace) -> NaiveBayesModel:
    if args.model:
        model, _ = load_model(args.model)
        return model
    dataset = load_dataset(args.data)
    return train(dataset)


def _active_model(args: argparse.Namespace) -> Model:
    base = _base_model(args)
    if getattr(args, "classifier", "staged") == "staged":
        return to_percent(base)
    return base


def _entity_of(args: argparse.Namespace, model: Model) -> Entity:
    return parse_entity(args.entity, model.schema, eid=args.eid)


def _constraints_of(
    args: argparse.Namespace, model: Model
) -> ConstraintSet | None:
    path = getattr(args, "constraints", None)
    if not path:
        return None
    return load_constraints(path, model.schema)


def _versions_of(args: argparse.Namespace, model: Model, entity: Entity):
    versions = enumerate_counterfactuals(
        model,
        entity,
        _constraints_of(args, model),
        strict=args.strict,
        maxint=args.maxint,
    )
    if getattr(args, "min_change", False):
        versions = min_change_versions(versions)
    return versions


def _write_out(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_train(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.data)
    model = train(dataset, positive_label=args.positive_label)
    _write_out(serialize_model(model, dataset.class_column), args.out)
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    model = _active_model(args)
    entity = _entity_of(args, model)
    if args.classifier == "staged":
        label, f_pos, f_neg = classify_staged(model, entity, args.maxint)
        scores = dict(zip(model.labels, (f_pos, f_neg)))
    else:
        label, scores = classify_exact(model, entity)
    print(f"label: {label}")
    for name in model.labels:
        print(f"{name}: {scores[name]}")
    return 0


def _cmd_counterfactuals(args: argparse.Namespace) -> int:
    model = _active_model(args)
    entity = _entity_of(args, model)
    for version in _versions_of(args, model, entity):
        print(f"ent({version.eid},{','.join(version.final)},s)")
    return 0


def _cmd_explain(args: argparse.Namespace) -> int:
    model = _active_model(args)
    entity = _entity_of(args, model)
    versions = _versions_of(args, model, entity)
    explanations = explanations_of(versions, entity, model.schema)
    report = xresp(explanations, model.schema)
    for name in model.schema.names:
        print(f"x-resp {name.lower()} = {report.scores[name]}")
    for ex in explanations:
        row = (
            ex.eid,
            ex.cause_feature.lower(),
            ex.inv_resp,
            frozenset(member.lower() for member in ex.contingency),
        )
        print(render_row(row))
    return 0


def _cmd_query(args: argparse.Namespace) -> int:
    model = _active_model(args)
    entity = _entity_of(args, model)
    with open(args.queries, "r", encoding="utf-8") as handle:
        queries = load_queries(handle.read())
    if not queries:
        raise ValueError(f"no queries in {args.queries}")
    versions = _versions_of(args, model, entity)
    atom_sets = model_atom_sets(
        versions,
        model,
        entity,
        include_pb_num=not args.no_pb_num,
        maxint=args.maxint,
    )
    blocks = []
    for query in queries:
        rows = answer(query, atom_sets, args.semantics)
        blocks.append("\n".join(render_row(row) for row in rows))
    output = "\n\n".join(blocks)
    if output:
        print(output)
    return 0


def _cmd_emit(args: argparse.Namespace) -> int:
    base = _base_model(args)
    pmodel = to_percent(base)
    entity = parse_entity(args.entity, pmodel.schema, eid=args.eid)
    constraints = _constraints_of(args, pmodel)
    options = EmitterOptions(
        include_weak_constraints=args.weak,
        include_domain_rules=not args.no_domain_rules,
        maxint=args.maxint,
    )
    _write_out(emit_cip(pmodel, entity, constraints, options), args.out)
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    with open(args.program, "r", encoding="utf-8") as handle:
        program = parse_program(handle.read())
    for model in stable_models(program):
        print("{" + ", ".join(sorted(model)) + "}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
