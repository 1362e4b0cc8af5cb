"""Emit the counterfactual-intervention program as DLV-Complex text.

The generated program is self-contained: domain facts, the original entity
(annotation ``o``), percentage facts, staged-arithmetic probability rules,
transition and classification rules, a disjunctive intervention rule driven
by per-feature chosen/diffchoice predicates, the stop rule, the
explanation/contingency/responsibility machinery over set terms, optional
domain-knowledge constraints, and optional weak constraints minimizing the
number of changed features.

Naming is derived from the schema: each feature contributes a predicate
suffix (its shortest unique lowercase prefix: ``p_o_c``, ``dom_o`` for
``Outlook``) and a body variable (the suffix uppercased, lengthened when it
would collide with the reserved rule variables).  Feature names themselves
appear lowercased as constants, e.g. ``expl(E,humidity,H)``.

``parse_facts`` recovers the percent model and entity from emitted text, so
emit -> parse -> emit is a fixed point.
"""

from __future__ import annotations

import re
import textwrap
from dataclasses import dataclass

from .constraints import ConstraintSet
from .naive_bayes import PercentModel
from .schema import Entity, FeatureSchema, validate_values


class EmitError(ValueError):
    """Schema cannot be rendered (e.g. indistinguishable feature names)."""


class FactParseError(ValueError):
    """Emitted-fact text cannot be parsed back."""


DEFAULT_EMIT_MAXINT = 10**8

# Variables with fixed roles in the generated rules; feature variables must
# not collide with these.
_RESERVED_VARS = {"E", "V", "D", "F", "U", "X", "Z", "I", "Co", "S", "M", "R"}


@dataclass(frozen=True)
class EmitterOptions:
    include_weak_constraints: bool = False
    include_domain_rules: bool = True
    maxint: int = DEFAULT_EMIT_MAXINT

    def __post_init__(self) -> None:
        if self.maxint < 1:
            raise EmitError("maxint must be >= 1")


@dataclass(frozen=True)
class _FeatureNames:
    name: str        # lowercased constant, e.g. "humidity"
    suffix: str      # predicate suffix, e.g. "h"
    var: str         # body variable, e.g. "H"

    @property
    def var_p(self) -> str:
        return self.var + "p"


def _unique_prefixes(names: list[str]) -> list[str]:
    """Shortest prefix of each name that is unique among all names."""
    prefixes = []
    for name in names:
        chosen = None
        for length in range(1, len(name) + 1):
            candidate = name[:length]
            if sum(1 for other in names if other.startswith(candidate)) == 1:
                chosen = candidate
                break
        if chosen is None:
            colliders = sorted(n for n in names if n.startswith(name) and n != name)
            raise EmitError(
                f"feature name {name!r} cannot be disambiguated from: "
                f"{', '.join(colliders)}"
            )
        prefixes.append(chosen)
    return prefixes


def _feature_names(schema: FeatureSchema) -> list[_FeatureNames]:
    lowered = [name.lower() for name in schema.names]
    if len(set(lowered)) != len(lowered):
        raise EmitError("feature names collide after lowercasing")
    prefixes = _unique_prefixes(lowered)

    taken = set(_RESERVED_VARS)
    out: list[_FeatureNames] = []
    for name, prefix in zip(lowered, prefixes):
        length = len(prefix)
        var = prefix.upper()
        while var in taken or var + "p" in taken:
            length += 1
            if length > len(name):
                raise EmitError(f"cannot derive a distinct variable for {name!r}")
            var = name[:length].upper()
        taken.add(var)
        taken.add(var + "p")
        out.append(_FeatureNames(name=name, suffix=prefix, var=var))
    return out


def _stage_vars(count: int, features: list[_FeatureNames]) -> list[str]:
    """Accumulator letters for the staged probability rules (A, B, C, ...)."""
    used = set(_RESERVED_VARS) | {f.var for f in features} | {f.var_p for f in features}
    letters = [c for c in "ABCDFGHIJKLMNOPQRSTUWXYZ" if c not in used]
    if count > len(letters):
        raise EmitError("schema has too many features for staged rule naming")
    return letters[:count]


def _wrap(statement: str) -> str:
    return textwrap.fill(
        statement, width=78, subsequent_indent="    ", break_long_words=False,
        break_on_hyphens=False,
    )


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------


def emit_cip(
    pmodel: PercentModel,
    entity: Entity,
    constraints: ConstraintSet | None = None,
    options: EmitterOptions | None = None,
) -> str:
    """Render the complete program for one entity as DLV-Complex text."""
    opts = options or EmitterOptions()
    schema = pmodel.schema
    validate_values(schema, entity.values)
    if len(schema) < 2:
        raise EmitError("emitting needs at least two features")
    features = _feature_names(schema)
    positive, negative = pmodel.labels

    blocks: list[str] = []
    blocks.append(f"#include<ListAndSet>\n#maxint = {opts.maxint}.")

    # --- facts ------------------------------------------------------------
    dom_lines = []
    for feat, (_, domain) in zip(features, schema.features):
        dom_lines.append(" ".join(f"dom_{feat.suffix}({v})." for v in domain))
    blocks.append("\n".join(dom_lines))

    blocks.append(f"entSchema({','.join(f.name for f in features)}).")
    blocks.append(f"ent({entity.eid},{','.join(entity.values)},o).")
    blocks.append(" ".join(f"p({l}, {pmodel.prior[l]})." for l in pmodel.labels))

    for feat, (name, domain) in zip(features, schema.features):
        lines = []
        for label in pmodel.labels:
            lines.append(
                " ".join(
                    f"p_{feat.suffix}_c({v}, {label}, "
                    f"{pmodel.conditional[(name, v, label)]})."
                    for v in domain
                )
            )
        blocks.append("\n".join(lines))

    # --- staged probability rules ------------------------------------------
    all_vars = ",".join(f.var for f in features)
    ent_tr = f"ent(E,{all_vars},tr)"
    stages = _stage_vars(max(len(features) - 1, 1), features)

    prob_rules = []
    if len(features) >= 2:
        for i in range(1, len(features)):
            acc, acc_p = stages[i - 1], stages[i - 1] + "p"
            head = f"prob_{i}(E,{all_vars},V,{acc_p})"
            if i == 1:
                first, second = features[0], features[1]
                body = [
                    ent_tr,
                    f"p_{first.suffix}_c({first.var}, V, P1)",
                    f"p_{second.suffix}_c({second.var}, V, P2)",
                    f"{acc} = P1*P2",
                ]
            else:
                prev_p = stages[i - 2] + "p"
                nxt = features[i]
                body = [
                    ent_tr,
                    f"prob_{i - 1}(E,{all_vars},V,{prev_p})",
                    f"p_{nxt.suffix}_c({nxt.var}, V, P{i + 1})",
                    f"{acc} = {prev_p}*P{i + 1}",
                ]
            body += [f"{acc_p} = {acc}/10", f"#int({acc})", f"#int({acc_p})", "p(V, D)"]
            prob_rules.append(_wrap(f"{head} :- {', '.join(body)}."))
        last_p = stages[len(features) - 2] + "p"
        pb_body = [
            ent_tr,
            f"prob_{len(features) - 1}(E,{all_vars},V,{last_p})",
            "p(V, D)",
            f"F = {last_p}*D",
            "Fp = F/10",
            "#int(F)",
            "#int(Fp)",
        ]
    else:
        only = features[0]
        pb_body = [
            ent_tr,
            f"p_{only.suffix}_c({only.var}, V, P1)",
            "p(V, D)",
            "F = P1*D",
            "Fp = F/10",
            "#int(F)",
            "#int(Fp)",
        ]
    prob_rules.append(_wrap(f"pb_num(E,{all_vars},V,Fp) :- {', '.join(pb_body)}."))
    blocks.append("\n".join(prob_rules))

    # --- transition and classification --------------------------------------
    blocks.append(
        f"ent(E,{all_vars},tr) :- ent(E,{all_vars},o).\n"
        f"ent(E,{all_vars},tr) :- ent(E,{all_vars},do)."
    )
    f_pos, f_neg = f"F{positive}", f"F{negative}"
    blocks.append(
        _wrap(
            f"cls(E,{all_vars},{positive}) :- {ent_tr}, "
            f"pb_num(E,{all_vars},{positive},{f_pos}), "
            f"pb_num(E,{all_vars},{negative},{f_neg}), {f_pos} >= {f_neg}."
        )
        + "\n"
        + _wrap(
            f"cls(E,{all_vars},{negative}) :- {ent_tr}, "
            f"pb_num(E,{all_vars},{positive},{f_pos}), "
            f"pb_num(E,{all_vars},{negative},{f_neg}), {f_pos} < {f_neg}."
        )
    )

    # --- disjunctive intervention rule ---------------------------------------
    cs = constraints
    blocked: set[str] = set()
    if cs is not None:
        blocked = set(n.lower() for n in (cs.immutable | cs.dependency_targets))
    intervenable = [f for f in features if f.name not in blocked]
    if not intervenable:
        raise EmitError("every feature is blocked; nothing can be intervened")

    cls_yes = f"cls(E,{all_vars},{positive})"
    disjuncts = []
    for feat in intervenable:
        head_vars = ",".join(
            f.var_p if f is feat else f.var for f in features
        )
        disjuncts.append(f"ent(E,{head_vars},do)")
    body = [f"{f.var} != {f.var_p}" for f in intervenable]
    body += [ent_tr, cls_yes]
    body += [
        f"chosen_{f.suffix}({all_vars},{f.var_p})" for f in intervenable
    ]
    body += [f"dom_{f.suffix}({f.var_p})" for f in intervenable]
    blocks.append(_wrap(f"{' v '.join(disjuncts)} :- {', '.join(body)}."))

    chosen_rules = []
    for feat in intervenable:
        chosen_rules.append(
            _wrap(
                f"chosen_{feat.suffix}({all_vars},U) :- {ent_tr}, {cls_yes}, "
                f"dom_{feat.suffix}(U), U != {feat.var}, "
                f"not diffchoice_{feat.suffix}({all_vars},U)."
            )
        )
        chosen_rules.append(
            _wrap(
                f"diffchoice_{feat.suffix}({all_vars},U) :- "
                f"chosen_{feat.suffix}({all_vars},Up), U != Up, "
                f"dom_{feat.suffix}(U)."
            )
        )
    blocks.append("\n".join(chosen_rules))

    blocks.append(f":- ent(E,{all_vars},do), ent(E,{all_vars},o).")
    blocks.append(
        f"ent(E,{all_vars},s) :- ent(E,{all_vars},do), cls(E,{all_vars},{negative})."
    )
    blocks.append(f":- ent(E,{all_vars},o), not entAux(E).")
    blocks.append(f"entAux(E) :- ent(E,{all_vars},s).")

    # --- explanations, contingencies, responsibility -------------------------
    primed_vars = ",".join(f.var_p for f in features)
    ent_o = f"ent(E,{all_vars},o)"
    ent_s = f"ent(E,{primed_vars},s)"
    expl_rules = [
        f"expl(E,{f.name},{f.var}) :- {ent_o}, {ent_s}, {f.var} != {f.var_p}."
        for f in features
    ]
    blocks.append("\n".join(_wrap(r) for r in expl_rules))

    blocks.append(
        "\n".join(
            [
                "cause(E,U) :- expl(E,U,X).",
                "cauCont(E,U,I) :- expl(E,U,X), expl(E,I,Z), U != I.",
                "preCont(E,U,{I}) :- cauCont(E,U,I).",
                _wrap(
                    "preCont(E,U,#union(Co,{I})) :- cauCont(E,U,I), "
                    "preCont(E,U,Co), not #member(I,Co)."
                ),
                "cont(E,U,Co) :- preCont(E,U,Co), not HoleIn(E,U,Co).",
                _wrap(
                    "HoleIn(E,U,Co) :- preCont(E,U,Co), cauCont(E,U,I), "
                    "not #member(I,Co)."
                ),
                "tmpCont(E,U) :- cont(E,U,Co), not #card(Co,0).",
                "cont(E,U,{}) :- cause(E,U), not tmpCont(E,U).",
            ]
        )
    )
    blocks.append("invResp(E,U,R) :- cont(E,U,S), #card(S,M), R = M+1, #int(R).")
    blocks.append("fullExpl(E,U,R,S) :- expl(E,U,X), cont(E,U,S), invResp(E,U,R).")

    # --- domain knowledge -----------------------------------------------------
    if cs is not None and opts.include_domain_rules:
        knowledge = []
        for combo in cs.forbidden:
            args = [combo.get(name, "_") for name, _ in schema.features]
            knowledge.append(f":- ent(E,{','.join(args)},tr).")
        for dep in cs.dependencies:
            src = next(f for f, (n, _) in zip(features, schema.features) if n == dep.source)
            tgt = next(f for f, (n, _) in zip(features, schema.features) if n == dep.target)
            for sval in schema.domain(dep.source):
                tval = dep.mapping[sval]
                head_args = []
                body_args = []
                for f, (name, _) in zip(features, schema.features):
                    if name == dep.source:
                        head_args.append(sval)
                        body_args.append(sval)
                    elif name == dep.target:
                        head_args.append(tval)
                        body_args.append(f.var)
                    else:
                        head_args.append(f.var)
                        body_args.append(f.var)
                knowledge.append(
                    f"ent(E,{','.join(head_args)},tr) :- "
                    f"ent(E,{','.join(body_args)},tr)."
                )
        if knowledge:
            blocks.append("\n".join(knowledge))

    # --- weak constraints -------------------------------------------------------
    if opts.include_weak_constraints:
        weak = [
            f":~ {ent_o}, {ent_s}, {f.var} != {f.var_p}." for f in features
        ]
        blocks.append("\n".join(weak))

    return "\n\n".join(blocks) + "\n"


# ---------------------------------------------------------------------------
# Normalization and fact recovery
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r":-|:~|!=|>=|<=|#[A-Za-z]+|[A-Za-z_][A-Za-z0-9_]*|\d+|[(){},.<>=*/+]|\S"
)


def normalize_tokens(text: str) -> str:
    """Whitespace-insensitive normal form: tokens joined by single spaces."""
    out: list[str] = []
    for raw in text.splitlines():
        line = raw.split("%", 1)[0]
        out.extend(_TOKEN_RE.findall(line))
    return " ".join(out)


def split_statements(text: str) -> list[str]:
    """Normalized statements, in order.  ``#include`` lines stand alone."""
    statements: list[str] = []
    body_lines: list[str] = []
    for raw in text.splitlines():
        line = raw.split("%", 1)[0]
        if line.strip().startswith("#include"):
            statements.append(normalize_tokens(line.strip()))
            continue
        body_lines.append(line)
    buffer = "\n".join(body_lines)
    for chunk in buffer.split("."):
        normalized = normalize_tokens(chunk)
        if normalized:
            statements.append(normalized)
    return statements


_FACT_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\((.*)\)$")


def _fact_statements(text: str) -> list[tuple[int, str]]:
    """Dot-terminated statements with their starting line numbers.

    ``#include`` lines are dropped; rules and weak constraints are skipped
    (facts only); wrapped rule bodies therefore never masquerade as facts.
    """
    statements: list[tuple[int, str]] = []
    current: list[str] = []
    start_line = 1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0]
        if line.strip().startswith("#include"):
            continue
        for ch in line:
            if not current:
                start_line = lineno
            if ch == ".":
                statement = "".join(current).strip()
                if statement:
                    statements.append((start_line, statement))
                current = []
            else:
                current.append(ch)
    leftover = "".join(current).strip()
    if leftover:
        raise FactParseError(f"line {start_line}: unterminated statement: {leftover!r}")
    return [
        (lineno, stmt)
        for lineno, stmt in statements
        if ":-" not in stmt and ":~" not in stmt and not stmt.startswith("#maxint")
    ]


def parse_facts(text: str) -> tuple[PercentModel, Entity]:
    """Recover the percent model and o-annotated entity from emitted text."""
    dom: dict[str, list[str]] = {}
    schema_names: list[str] | None = None
    entity: tuple[str, tuple[str, ...]] | None = None
    priors: list[tuple[str, int]] = []
    cond: dict[tuple[str, str, str], int] = {}  # (suffix, value, label) -> pct

    for lineno, statement in _fact_statements(text):
        match = _FACT_RE.match(re.sub(r"\s+", "", statement))
        if not match:
            raise FactParseError(f"line {lineno}: not a fact: {statement!r}")
        pred, arg_text = match.groups()
        args = arg_text.split(",") if arg_text else []
        try:
            if pred.startswith("dom_"):
                dom.setdefault(pred[4:], []).append(args[0])
            elif pred == "entSchema":
                schema_names = args
            elif pred == "ent":
                if args[-1] == "o":
                    entity = (args[0], tuple(args[1:-1]))
            elif pred == "p":
                priors.append((args[0], int(args[1])))
            elif pred.startswith("p_") and pred.endswith("_c"):
                cond[(pred[2:-2], args[0], args[1])] = int(args[2])
            else:
                raise FactParseError(
                    f"line {lineno}: unrecognized fact predicate {pred!r}"
                )
        except (IndexError, ValueError) as exc:
            if isinstance(exc, FactParseError):
                raise
            raise FactParseError(
                f"line {lineno}: malformed fact: {statement!r}"
            ) from exc

    if schema_names is None:
        raise FactParseError("missing entSchema fact")
    if entity is None:
        raise FactParseError("missing o-annotated ent fact")
    if len(priors) != 2:
        raise FactParseError(f"expected 2 prior facts, found {len(priors)}")

    suffixes = _unique_prefixes(schema_names)
    features = []
    for name, suffix in zip(schema_names, suffixes):
        if suffix not in dom:
            raise FactParseError(f"missing dom_{suffix} facts for feature {name}")
        features.append((name, tuple(dom[suffix])))
    schema = FeatureSchema(tuple(features))

    labels = (priors[0][0], priors[1][0])
    conditional: dict[tuple[str, str, str], int] = {}
    for (suffix, value, label), pct in cond.items():
        name = schema_names[suffixes.index(suffix)]
        conditional[(name, value, label)] = pct

    pmodel = PercentModel(
        schema=schema,
        labels=labels,
        prior={label: pct for label, pct in priors},
        conditional=conditional,
    )
    eid, values = entity
    validate_values(schema, values)
    return pmodel, Entity(eid=eid, values=values)
