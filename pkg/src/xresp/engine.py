"""Counterfactual enumeration, explanations, and x-Resp scores.

The search realizes counterfactual-intervention semantics as breadth-first
reachability over entities:

* the start state is the original entity, which must carry the original
  label;
* from any state that still has the original label, changing one feature to
  any different in-domain value yields a successor, subject to domain
  constraints (forbidden combinations prune states, dependency targets are
  overwritten rather than freely intervened, immutable features are never
  touched);
* the exact original tuple is never re-entered;
* a state whose label differs is terminal and reported as a counterfactual
  version, with one shortest intervention path recorded.

Every feature changed in a version is a cause; the remaining changed
features form its contingency set, and the inverse responsibility of the
explanation is the total number of changes.  The x-Resp score of a feature
is the reciprocal of its minimum inverse responsibility, or 0 when the
feature is changed in no version.

``strict_actual_cause`` is an independent brute-force oracle for the
counterfactual-cause definition itself: it searches all contingency
assignments directly and ignores path reachability, so the two computations
can be compared but are not merged.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Union

from .constraints import ConstraintSet, admits, empty_constraints, propagate
from .naive_bayes import (
    DEFAULT_MAXINT,
    NaiveBayesModel,
    PercentModel,
    classify_exact,
    classify_staged,
)
from .schema import Entity, FeatureSchema, validate_values

Model = Union[PercentModel, NaiveBayesModel]


@dataclass(frozen=True)
class Intervention:
    feature: str
    old: str
    new: str


@dataclass(frozen=True)
class CounterfactualVersion:
    """A label-flipping variant of the original entity."""

    eid: str
    final: tuple[str, ...]
    changed: frozenset[str]
    path: tuple[Intervention, ...]
    label: str


@dataclass(frozen=True)
class Explanation:
    """A cause feature value with its contingency set.

    ``inv_resp`` is always ``len(contingency) + 1``; the witnessing version
    is carried for reporting but ignored by equality so explanation sets
    deduplicate by content.
    """

    eid: str
    cause_feature: str
    cause_value: str
    contingency: frozenset[str]
    inv_resp: int
    witness: CounterfactualVersion = field(compare=False)

    def __post_init__(self) -> None:
        if self.cause_feature in self.contingency:
            raise ValueError("cause feature cannot appear in its own contingency")
        if self.inv_resp != len(self.contingency) + 1:
            raise ValueError("inv_resp must equal |contingency| + 1")


@dataclass(frozen=True)
class ResponsibilityReport:
    """Per-feature x-Resp scores plus one minimum-contingency witness each."""

    scores: Mapping[str, Fraction]
    witnesses: Mapping[str, CounterfactualVersion]


def _classifier(model: Model, maxint: int) -> Callable[[tuple[str, ...]], str]:
    """Label function for either model flavor (staged for percent models)."""
    if isinstance(model, PercentModel):
        def staged(values: tuple[str, ...]) -> str:
            label, _, _ = classify_staged(model, Entity("_", values), maxint)
            return label
        return staged

    def exact(values: tuple[str, ...]) -> str:
        label, _ = classify_exact(model, Entity("_", values))
        return label
    return exact


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def enumerate_counterfactuals(
    model: Model,
    entity: Entity,
    constraints: ConstraintSet | None = None,
    *,
    strict: bool = False,
    maxint: int = DEFAULT_MAXINT,
) -> tuple[CounterfactualVersion, ...]:
    """All label-flipping entities reachable by admissible interventions.

    Interventions change one feature per step, each feature at most once,
    and only continue from states that keep the original label; a state
    whose label flips is terminal and becomes a version.  Pass a
    PercentModel to classify with the staged integer pipeline (the default
    pairing) or a NaiveBayesModel for exact rationals.

    ``strict`` tightens admissibility twice over: interventions only run
    when the original label is the positive one, and forbidden combinations
    apply to the original entity as well (discarding everything when the
    original itself is inadmissible).  An empty result is legal and means no
    counterfactual version exists under the constraints.
    """
    schema = model.schema
    validate_values(schema, entity.values)
    cs = constraints if constraints is not None else empty_constraints(schema)
    if cs.schema != schema:
        raise ValueError("constraint set was built against a different schema")
    label_of = _classifier(model, maxint)

    original = tuple(entity.values)
    original_label = label_of(original)
    if strict:
        if original_label != model.labels[0]:
            return ()
        if not admits(cs, original):
            return ()

    blocked = cs.immutable | cs.dependency_targets
    free_features = [
        (i, name, dom)
        for i, (name, dom) in enumerate(schema.features)
        if name not in blocked
    ]

    seen: set[tuple[str, ...]] = {original}
    found: list[CounterfactualVersion] = []
    frontier: list[tuple[tuple[str, ...], tuple[Intervention, ...]]] = [(original, ())]

    while frontier:
        next_frontier: list[tuple[tuple[str, ...], tuple[Intervention, ...]]] = []
        for state, path in frontier:
            for index, name, domain in free_features:
                # each feature is intervened at most once: once a value
                # differs from the original it is settled for the chain
                if state[index] != original[index]:
                    continue
                for new_value in domain:
                    if new_value == state[index]:
                        continue
                    candidate = list(state)
                    candidate[index] = new_value
                    successor = propagate(cs, tuple(candidate))
                    if successor == original or successor in seen:
                        continue
                    if not admits(cs, successor):
                        continue
                    seen.add(successor)
                    step = Intervention(name, state[index], new_value)
                    successor_path = path + (step,)
                    successor_label = label_of(successor)
                    if successor_label != original_label:
                        found.append(
                            _version(entity.eid, original, successor,
                                     successor_path, successor_label, schema)
                        )
                    else:
                        next_frontier.append((successor, successor_path))
        frontier = next_frontier

    return tuple(sorted(found, key=lambda v: (len(v.changed), v.final)))


def _version(
    eid: str,
    original: tuple[str, ...],
    final: tuple[str, ...],
    path: tuple[Intervention, ...],
    label: str,
    schema: FeatureSchema,
) -> CounterfactualVersion:
    changed = frozenset(
        name
        for (name, _), old, new in zip(schema.features, original, final)
        if old != new
    )
    return CounterfactualVersion(
        eid=eid, final=final, changed=changed, path=path, label=label
    )


def min_change_versions(
    versions: Iterable[CounterfactualVersion],
) -> tuple[CounterfactualVersion, ...]:
    """The versions with the fewest changed features; empty input stays empty."""
    pool = list(versions)
    if not pool:
        return ()
    best = min(len(v.changed) for v in pool)
    return tuple(
        sorted(
            (v for v in pool if len(v.changed) == best),
            key=lambda v: (len(v.changed), v.final),
        )
    )


# ---------------------------------------------------------------------------
# Explanations and scores
# ---------------------------------------------------------------------------


def explanations_of(
    versions: Iterable[CounterfactualVersion],
    original: Entity,
    schema: FeatureSchema,
) -> tuple[Explanation, ...]:
    """One explanation per (version, changed feature), deduplicated by content.

    The cause keeps the feature's original value; the contingency is the
    version's remaining changed features.  A single-change version yields
    the empty contingency.
    """
    seen: dict[tuple, Explanation] = {}
    for version in versions:
        for cause in version.changed:
            contingency = frozenset(version.changed - {cause})
            key = (version.eid, cause, contingency)
            if key in seen:
                continue
            seen[key] = Explanation(
                eid=version.eid,
                cause_feature=cause,
                cause_value=original.values[schema.index(cause)],
                contingency=contingency,
                inv_resp=len(version.changed),
                witness=version,
            )
    return tuple(
        sorted(
            seen.values(),
            key=lambda ex: (ex.cause_feature, ex.inv_resp, sorted(ex.contingency)),
        )
    )


def xresp(
    explanations: Iterable[Explanation], schema: FeatureSchema
) -> ResponsibilityReport:
    """Per-feature score 1/(minimum inv_resp), or 0 for features never changed."""
    best: dict[str, Explanation] = {}
    for ex in explanations:
        current = best.get(ex.cause_feature)
        if current is None or ex.inv_resp < current.inv_resp:
            best[ex.cause_feature] = ex

    scores: dict[str, Fraction] = {}
    witnesses: dict[str, CounterfactualVersion] = {}
    for name in schema.names:
        if name in best:
            scores[name] = Fraction(1, best[name].inv_resp)
            witnesses[name] = best[name].witness
        else:
            scores[name] = Fraction(0)
    return ResponsibilityReport(scores=scores, witnesses=witnesses)


# ---------------------------------------------------------------------------
# Brute-force oracle for the strict actual-cause definition
# ---------------------------------------------------------------------------


def strict_actual_cause(
    model: Model,
    entity: Entity,
    feature: str,
    *,
    maxint: int = DEFAULT_MAXINT,
) -> tuple[bool, int | None]:
    """Direct search over contingency sets, ignoring path reachability.

    The feature's value x is an actual cause with contingency Y (new values
    Y') when changing Y alone preserves the original label while
    additionally changing x flips it.  Returns whether any (x', Y, Y')
    works and the minimum |Y| that does.  Contingency values are only drawn
    from non-original values: keeping a feature at its original value is
    the same as leaving it out of Y, so minimal sizes are unaffected.
    """
    schema = model.schema
    validate_values(schema, entity.values)
    label_of = _classifier(model, maxint)
    feature_index = schema.index(feature)

    original = tuple(entity.values)
    original_label = label_of(original)
    x_alternatives = [
        v for v in schema.domain(feature) if v != original[feature_index]
    ]
    others = [
        (i, dom)
        for i, (name, dom) in enumerate(schema.features)
        if name != feature
    ]

    for size in range(len(others) + 1):
        for combo in itertools.combinations(others, size):
            value_choices = [
                [v for v in dom if v != original[i]] for i, dom in combo
            ]
            for assignment in itertools.product(*value_choices):
                contingent = list(original)
                for (i, _), value in zip(combo, assignment):
                    contingent[i] = value
                if label_of(tuple(contingent)) != original_label:
                    continue
                for x_new in x_alternatives:
                    flipped = list(contingent)
                    flipped[feature_index] = x_new
                    if label_of(tuple(flipped)) != original_label:
                        return True, size
    return False, None
