"""Naive-Bayes training and classification, in two arithmetic regimes.

Training is pure frequency counting: the prior of a label is its row share,
and each conditional is the share of a feature value among rows of that
label.  All of it is kept as exact ``fractions.Fraction`` values so nothing
is lost to floating point.

Classification compares per-label numerators (prior times the product of
the entity's conditionals); the shared denominator never needs computing.
Two classifiers are provided on purpose:

* ``classify_exact`` multiplies the rationals as-is.
* ``classify_staged`` replicates an integer-only pipeline: conditionals are
  first rounded to percentages, then folded left-to-right in schema order
  with an integer division by 10 after every multiplication, and finally
  scaled by the prior percentage (again followed by ``// 10``).  This is
  what a solver restricted to integer arithmetic computes, and its rounding
  artifacts are observable by comparing the two classifiers.

Percentages are produced by largest-remainder rounding per distribution, so
each distribution sums to exactly 100.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .schema import Dataset, Entity, FeatureSchema, SchemaError, validate_values


class ModelFormatError(ValueError):
    """Malformed persisted-model text."""


class StagedOverflowError(ValueError):
    """An intermediate staged product exceeded the configured integer ceiling."""


DEFAULT_MAXINT = 10**8


@dataclass(frozen=True)
class NaiveBayesModel:
    """Exact-rational model. ``labels`` is ordered with the positive label first."""

    schema: FeatureSchema
    labels: tuple[str, str]
    prior: Mapping[str, Fraction]
    conditional: Mapping[tuple[str, str, str], Fraction]

    def __post_init__(self) -> None:
        if sum(self.prior[l] for l in self.labels) != 1:
            raise ModelFormatError("priors must sum to 1")
        for label in self.labels:
            for name, domain in self.schema.features:
                total = sum(self.conditional[(name, v, label)] for v in domain)
                if total != 1:
                    raise ModelFormatError(
                        f"conditionals of {name} given {label} sum to {total}, not 1"
                    )


@dataclass(frozen=True)
class PercentModel:
    """Integer-percentage twin of NaiveBayesModel; every distribution sums to 100."""

    schema: FeatureSchema
    labels: tuple[str, str]
    prior: Mapping[str, int]
    conditional: Mapping[tuple[str, str, str], int]

    def __post_init__(self) -> None:
        if sum(self.prior[l] for l in self.labels) != 100:
            raise ModelFormatError("percent priors must sum to 100")
        for label in self.labels:
            for name, domain in self.schema.features:
                total = sum(self.conditional[(name, v, label)] for v in domain)
                if total != 100:
                    raise ModelFormatError(
                        f"percent conditionals of {name} given {label} "
                        f"sum to {total}, not 100"
                    )


def train(dataset: Dataset, positive_label: str | None = None) -> NaiveBayesModel:
    """Train from frequencies.

    ``positive_label`` fixes which label is treated as positive (listed
    first, wins staged ties).  By default the majority label is positive,
    with dataset order deciding an exact tie.
    """
    total = len(dataset.rows)
    counts = {label: 0 for label in dataset.labels}
    for _, label in dataset.rows:
        counts[label] += 1
    for label, n in counts.items():
        if n == 0:
            raise ModelFormatError(f"label {label} has no training rows")

    if positive_label is None:
        positive_label = max(dataset.labels, key=lambda l: counts[l])
    elif positive_label not in dataset.labels:
        raise ModelFormatError(
            f"positive label {positive_label!r} not among dataset labels "
            f"{list(dataset.labels)}"
        )
    negative_label = next(l for l in dataset.labels if l != positive_label)
    labels = (positive_label, negative_label)

    prior = {label: Fraction(counts[label], total) for label in labels}

    cond: dict[tuple[str, str, str], Fraction] = {}
    for fidx, (name, domain) in enumerate(dataset.schema.features):
        for label in labels:
            for value in domain:
                matching = sum(
                    1
                    for values, row_label in dataset.rows
                    if row_label == label and values[fidx] == value
                )
                cond[(name, value, label)] = Fraction(matching, counts[label])

    return NaiveBayesModel(
        schema=dataset.schema, labels=labels, prior=prior, conditional=cond
    )


def _percentify(pairs: list[tuple[object, Fraction]]) -> dict:
    """Largest-remainder rounding of one distribution to integers summing to 100.

    Floors of value*100 are taken first; the leftover units go to the
    entries with the largest fractional parts, ties resolved by the order
    of ``pairs`` (domain order).
    """
    scaled = [(key, value * 100) for key, value in pairs]
    floors = {key: int(value) for key, value in scaled}  # values are >= 0
    leftover = 100 - sum(floors.values())
    remainders = sorted(
        range(len(scaled)),
        key=lambda i: (-(scaled[i][1] - floors[scaled[i][0]]), i),
    )
    for i in remainders[:leftover]:
        floors[scaled[i][0]] += 1
    return floors


def to_percent(model: NaiveBayesModel) -> PercentModel:
    """Convert every distribution to integer percentages summing to 100."""
    prior = _percentify([(label, model.prior[label]) for label in model.labels])

    cond: dict[tuple[str, str, str], int] = {}
    for name, domain in model.schema.features:
        for label in model.labels:
            dist = _percentify(
                [(value, model.conditional[(name, value, label)]) for value in domain]
            )
            for value, pct in dist.items():
                cond[(name, value, label)] = pct

    return PercentModel(
        schema=model.schema, labels=model.labels, prior=prior, conditional=cond
    )


def classify_exact(
    model: NaiveBayesModel, entity: Entity
) -> tuple[str, dict[str, Fraction]]:
    """Exact numerators per label; the larger one wins, ties to the positive label."""
    validate_values(model.schema, entity.values)
    numerators: dict[str, Fraction] = {}
    for label in model.labels:
        num = model.prior[label]
        for (name, _), value in zip(model.schema.features, entity.values):
            num *= model.conditional[(name, value, label)]
        numerators[label] = num
    positive, negative = model.labels
    label = positive if numerators[positive] >= numerators[negative] else negative
    return label, numerators


def classify_staged(
    pmodel: PercentModel, entity: Entity, maxint: int = DEFAULT_MAXINT
) -> tuple[str, int, int]:
    """Integer-percentage pipeline: fold conditionals in schema order.

    Every multiplication is followed by ``// 10``; the prior percentage is
    folded last the same way.  Products above ``maxint`` raise
    StagedOverflowError (mirroring a solver's integer ceiling).
    """
    validate_values(pmodel.schema, entity.values)
    scores: dict[str, int] = {}
    for label in pmodel.labels:
        acc: int | None = None
        for (name, _), value in zip(pmodel.schema.features, entity.values):
            pct = pmodel.conditional[(name, value, label)]
            if acc is None:
                acc = pct
            else:
                acc = _checked_mul(acc, pct, maxint) // 10
        if acc is None:  # zero-feature schema cannot occur (schema arity >= 1)
            acc = 1
        acc = _checked_mul(acc, pmodel.prior[label], maxint) // 10
        scores[label] = acc
    positive, negative = pmodel.labels
    label = positive if scores[positive] >= scores[negative] else negative
    return label, scores[positive], scores[negative]


def _checked_mul(a: int, b: int, maxint: int) -> int:
    product = a * b
    if product > maxint:
        raise StagedOverflowError(
            f"staged product {a}*{b} = {product} exceeds maxint {maxint}"
        )
    return product


# ---------------------------------------------------------------------------
# Model persistence
# ---------------------------------------------------------------------------
#
# Plain-text layout, one statement per line:
#
#   labels: yes,no
#   class-column: Play
#   prior: yes 9/14
#   prior: no 5/14
#   Outlook,sunny,yes,2/9
#   ...
#
# Feature order and domain order are recovered from the first appearance of
# each feature/value among the conditional lines, so save -> load -> save is
# byte-identical.


def save_model(model: NaiveBayesModel, path: str, class_column: str = "class") -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(serialize_model(model, class_column))


def serialize_model(model: NaiveBayesModel, class_column: str = "class") -> str:
    lines = [f"labels: {model.labels[0]},{model.labels[1]}"]
    lines.append(f"class-column: {class_column}")
    for label in model.labels:
        lines.append(f"prior: {label} {model.prior[label]}")
    for name, domain in model.schema.features:
        for value in domain:
            for label in model.labels:
                frac = model.conditional[(name, value, label)]
                lines.append(f"{name},{value},{label},{frac}")
    return "\n".join(lines) + "\n"


def load_model(path: str) -> tuple[NaiveBayesModel, str]:
    """Load a persisted model; returns (model, class column name)."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_model(handle.read())


def parse_model(text: str) -> tuple[NaiveBayesModel, str]:
    labels: tuple[str, str] | None = None
    class_column = "class"
    prior: dict[str, Fraction] = {}
    cond: dict[tuple[str, str, str], Fraction] = {}
    feature_order: list[str] = []
    domains: dict[str, list[str]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("labels:"):
            parts = [p.strip() for p in line[len("labels:"):].split(",")]
            if len(parts) != 2 or not all(parts):
                raise ModelFormatError(f"line {lineno}: need exactly two labels")
            labels = (parts[0], parts[1])
        elif line.startswith("class-column:"):
            class_column = line[len("class-column:"):].strip()
        elif line.startswith("prior:"):
            try:
                label, frac = line[len("prior:"):].split()
                prior[label] = Fraction(frac)
            except ValueError as exc:
                raise ModelFormatError(f"line {lineno}: bad prior: {raw!r}") from exc
        else:
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 4:
                raise ModelFormatError(
                    f"line {lineno}: expected feature,value,label,fraction: {raw!r}"
                )
            name, value, label, frac_text = parts
            try:
                frac = Fraction(frac_text)
            except ValueError as exc:
                raise ModelFormatError(
                    f"line {lineno}: bad fraction {frac_text!r}"
                ) from exc
            if name not in feature_order:
                feature_order.append(name)
                domains[name] = []
            if value not in domains[name]:
                domains[name].append(value)
            cond[(name, value, label)] = frac

    if labels is None:
        raise ModelFormatError("missing 'labels:' line")
    if set(prior) != set(labels):
        raise ModelFormatError("priors must cover exactly the declared labels")

    try:
        schema = FeatureSchema(
            tuple((name, tuple(domains[name])) for name in feature_order)
        )
    except SchemaError as exc:
        raise ModelFormatError(f"bad feature table: {exc}") from exc
    try:
        model = NaiveBayesModel(
            schema=schema, labels=labels, prior=prior, conditional=cond
        )
    except KeyError as exc:
        raise ModelFormatError(f"incomplete conditional table: missing {exc}") from exc
    return model, class_column
