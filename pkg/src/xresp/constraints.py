"""Domain knowledge for the counterfactual search.

Three kinds of constraints restrict which intervened entities are
admissible:

* forbidden combinations — partial assignments that no intermediate or
  final search state may match (the original entity is exempt unless the
  engine runs in strict mode);
* functional dependencies — a target feature's value is overwritten from a
  source feature's value after every intervention, and free interventions
  on the target are disabled;
* immutable features — never intervened at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .schema import FeatureSchema


class ConstraintError(ValueError):
    """Constraint references unknown features/values or is self-contradictory."""


@dataclass(frozen=True)
class Dependency:
    source: str
    target: str
    mapping: Mapping[str, str]  # total over the source domain


@dataclass(frozen=True)
class ConstraintSet:
    schema: FeatureSchema
    forbidden: tuple[Mapping[str, str], ...] = ()
    dependencies: tuple[Dependency, ...] = ()
    immutable: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        names = set(self.schema.names)
        for combo in self.forbidden:
            if not combo:
                raise ConstraintError("forbidden combination needs at least one binding")
            for name, value in combo.items():
                if name not in names:
                    raise ConstraintError(f"forbidden combination: unknown feature {name}")
                if value not in self.schema.domain(name):
                    raise ConstraintError(
                        f"forbidden combination: {value!r} not in domain of {name}"
                    )
        targets = set()
        for dep in self.dependencies:
            if dep.source not in names or dep.target not in names:
                raise ConstraintError(
                    f"dependency {dep.source} -> {dep.target}: unknown feature"
                )
            if dep.source == dep.target:
                raise ConstraintError(f"dependency on itself: {dep.source}")
            src_dom = set(self.schema.domain(dep.source))
            if set(dep.mapping) != src_dom:
                raise ConstraintError(
                    f"dependency {dep.source} -> {dep.target} must map every "
                    f"source value; got {sorted(dep.mapping)} vs {sorted(src_dom)}"
                )
            tgt_dom = self.schema.domain(dep.target)
            for sval, tval in dep.mapping.items():
                if tval not in tgt_dom:
                    raise ConstraintError(
                        f"dependency {dep.source} -> {dep.target}: image {tval!r} "
                        f"not in domain of {dep.target}"
                    )
            targets.add(dep.target)
        for name in self.immutable:
            if name not in names:
                raise ConstraintError(f"immutable: unknown feature {name}")
        clash = targets & self.immutable
        if clash:
            raise ConstraintError(
                f"feature(s) both dependency target and immutable: {', '.join(sorted(clash))}"
            )
        _reject_cycles(self.dependencies)

    @property
    def dependency_targets(self) -> frozenset[str]:
        return frozenset(dep.target for dep in self.dependencies)


def _reject_cycles(dependencies: tuple[Dependency, ...]) -> None:
    # source -> target edges; any directed cycle is a construction error
    edges: dict[str, set[str]] = {}
    for dep in dependencies:
        edges.setdefault(dep.source, set()).add(dep.target)

    visiting: set[str] = set()
    done: set[str] = set()

    def visit(node: str) -> None:
        if node in done:
            return
        if node in visiting:
            raise ConstraintError(f"cyclic dependencies involving {node}")
        visiting.add(node)
        for nxt in edges.get(node, ()):
            visit(nxt)
        visiting.discard(node)
        done.add(node)

    for start in list(edges):
        visit(start)


def empty_constraints(schema: FeatureSchema) -> ConstraintSet:
    return ConstraintSet(schema=schema)


def admits(constraints: ConstraintSet, values: tuple[str, ...]) -> bool:
    """False iff some forbidden partial assignment is fully matched."""
    schema = constraints.schema
    for combo in constraints.forbidden:
        if all(values[schema.index(name)] == value for name, value in combo.items()):
            return False
    return True


def propagate(constraints: ConstraintSet, values: tuple[str, ...]) -> tuple[str, ...]:
    """Overwrite dependency targets from their sources, to a fixed point.

    Dependencies are applied in declaration order; passes repeat until the
    values stop changing, which acyclicity guarantees after at most one
    pass per dependency.
    """
    schema = constraints.schema
    current = list(values)
    for _ in range(len(constraints.dependencies) + 1):
        changed = False
        for dep in constraints.dependencies:
            src_value = current[schema.index(dep.source)]
            image = dep.mapping[src_value]
            tgt_index = schema.index(dep.target)
            if current[tgt_index] != image:
                current[tgt_index] = image
                changed = True
        if not changed:
            return tuple(current)
    raise ConstraintError("dependency propagation did not converge")  # pragma: no cover


# ---------------------------------------------------------------------------
# Constraints file format
# ---------------------------------------------------------------------------
#
#   % comment
#   forbid Temperature=high, Wind=strong
#   depend Temperature -> Humidity: high->normal, medium->high, low->high
#   immutable Outlook


def parse_constraints(text: str, schema: FeatureSchema) -> ConstraintSet:
    forbidden: list[dict[str, str]] = []
    dependencies: list[Dependency] = []
    immutable: set[str] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("forbid "):
            combo: dict[str, str] = {}
            for part in line[len("forbid "):].split(","):
                if "=" not in part:
                    raise ConstraintError(
                        f"line {lineno}: expected Feature=value, got {part.strip()!r}"
                    )
                name, value = part.split("=", 1)
                combo[name.strip()] = value.strip()
            forbidden.append(combo)
        elif line.startswith("depend "):
            head, _, mapping_text = line[len("depend "):].partition(":")
            if "->" not in head or not mapping_text.strip():
                raise ConstraintError(
                    f"line {lineno}: expected 'depend Src -> Tgt: v->w, ...'"
                )
            source, _, target = head.partition("->")
            mapping: dict[str, str] = {}
            for part in mapping_text.split(","):
                if "->" not in part:
                    raise ConstraintError(
                        f"line {lineno}: expected v->w, got {part.strip()!r}"
                    )
                sval, _, tval = part.partition("->")
                mapping[sval.strip()] = tval.strip()
            dependencies.append(
                Dependency(source=source.strip(), target=target.strip(), mapping=mapping)
            )
        elif line.startswith("immutable "):
            immutable.add(line[len("immutable "):].strip())
        else:
            raise ConstraintError(f"line {lineno}: unrecognized directive: {line!r}")

    return ConstraintSet(
        schema=schema,
        forbidden=tuple(forbidden),
        dependencies=tuple(dependencies),
        immutable=frozenset(immutable),
    )


def load_constraints(path: str, schema: FeatureSchema) -> ConstraintSet:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_constraints(handle.read(), schema)
