"""Feature schemas, entities, and dataset ingestion.

A schema is an ordered list of categorical features, each with a finite
ordered domain.  Feature order is significant everywhere downstream: the
classifier folds conditional probabilities in schema order, and emitted
program text lays out atom arguments positionally.

Datasets are comma-separated text files with a header row; the last column
is the class label.  When no schema is given, domains are inferred from the
observed values in first-occurrence order, which keeps every derived
artifact (percent tables, emitted programs, query answers) reproducible.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass


class SchemaError(ValueError):
    """Invalid schema structure (duplicate names, tiny domains, ...)."""


class DataError(ValueError):
    """Invalid dataset or entity text."""


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered categorical features with finite ordered domains."""

    features: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self) -> None:
        names = [name for name, _ in self.features]
        if any(not name for name in names):
            raise SchemaError("feature names must be non-empty")
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError(f"duplicate feature names: {', '.join(dupes)}")
        for name, domain in self.features:
            if len(set(domain)) != len(domain):
                raise SchemaError(f"domain of {name} has repeated values")
            if len(domain) < 2:
                raise SchemaError(
                    f"domain of {name} has {len(domain)} value(s); need at least 2"
                )

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.features)

    def domain(self, name: str) -> tuple[str, ...]:
        for fname, dom in self.features:
            if fname == name:
                return dom
        raise SchemaError(f"unknown feature: {name}")

    def index(self, name: str) -> int:
        for i, (fname, _) in enumerate(self.features):
            if fname == name:
                return i
        raise SchemaError(f"unknown feature: {name}")

    def __len__(self) -> int:
        return len(self.features)


@dataclass(frozen=True)
class Entity:
    """One categorical value per schema feature, in schema order."""

    eid: str
    values: tuple[str, ...]


@dataclass(frozen=True)
class Dataset:
    schema: FeatureSchema
    rows: tuple[tuple[tuple[str, ...], str], ...]
    labels: tuple[str, str]
    class_column: str = "class"


def validate_values(schema: FeatureSchema, values: tuple[str, ...]) -> None:
    """Raise DataError unless ``values`` fits the schema positionally."""
    if len(values) != len(schema):
        raise DataError(
            f"expected {len(schema)} values, got {len(values)}"
        )
    for (name, domain), value in zip(schema.features, values):
        if value not in domain:
            raise DataError(
                f"value {value!r} is not in the domain of {name} "
                f"({', '.join(domain)})"
            )


def parse_entity(text: str, schema: FeatureSchema, eid: str = "e") -> Entity:
    """Parse a comma-separated value list into an Entity bound to ``schema``."""
    values = tuple(part.strip() for part in text.split(","))
    validate_values(schema, values)
    return Entity(eid=eid, values=values)


def load_dataset(path: str, schema: FeatureSchema | None = None) -> Dataset:
    """Load a dataset from a delimited text file.

    The header row names the features; the final column is the class label.
    Without an explicit schema, per-column domains are inferred in
    first-occurrence order.  With one, every value is validated against it.
    """
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return _read_dataset(handle, schema)


def _read_dataset(handle: io.TextIOBase, schema: FeatureSchema | None) -> Dataset:
    reader = csv.reader(handle)
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("dataset file is empty") from None
    header = [col.strip() for col in header]
    if len(header) < 2:
        raise DataError("header must name at least one feature and the class column")
    feature_names = header[:-1]

    rows: list[tuple[tuple[str, ...], str]] = []
    for lineno, raw in enumerate(reader, start=2):
        if not raw or (len(raw) == 1 and not raw[0].strip()):
            continue
        record = [cell.strip() for cell in raw]
        if len(record) != len(header):
            raise DataError(
                f"line {lineno}: expected {len(header)} fields, got {len(record)}"
            )
        rows.append((tuple(record[:-1]), record[-1]))

    observed_labels: list[str] = []
    for _, label in rows:
        if label not in observed_labels:
            observed_labels.append(label)
    if len(observed_labels) != 2:
        raise DataError(
            f"need exactly 2 class labels, observed {len(observed_labels)}"
        )

    if schema is None:
        domains: list[list[str]] = [[] for _ in feature_names]
        for values, _ in rows:
            for col, value in enumerate(values):
                if value not in domains[col]:
                    domains[col].append(value)
        schema = FeatureSchema(
            tuple(
                (name, tuple(domain))
                for name, domain in zip(feature_names, domains)
            )
        )
    else:
        if list(schema.names) != feature_names:
            raise DataError(
                f"header features {feature_names} do not match schema "
                f"{list(schema.names)}"
            )
        for values, _ in rows:
            validate_values(schema, values)

    labels = (observed_labels[0], observed_labels[1])
    return Dataset(
        schema=schema, rows=tuple(rows), labels=labels, class_column=header[-1]
    )


def serialize_dataset(dataset: Dataset) -> str:
    """Render a dataset back to its file format (used for round-trip checks)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(list(dataset.schema.names) + [dataset.class_column])
    for values, label in dataset.rows:
        writer.writerow(list(values) + [label])
    return out.getvalue()
