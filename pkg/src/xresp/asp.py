"""A tiny kernel for ground disjunctive logic programs.

Rules have the shape ``a1 v a2 :- b1, b2, not c1.`` over propositional
atoms; an empty head (``:- body.``) is a hard constraint and ``:~ body.``
is a weak constraint.  Stable models are computed from first principles:

1. the reduct of a program w.r.t. a candidate atom set S deletes every rule
   whose negative body intersects S and strips the negative literals from
   the survivors;
2. S is stable iff S is a minimal model of its own reduct;
3. if weak constraints are present, only stable models violating the fewest
   of them are kept.

Everything is exhaustive subset enumeration over the Herbrand base, bounded
by a configurable cap (default 20 atoms, overridable per call or through
the XRESP_ASP_ATOM_CAP environment variable).  Transparency and testability
are the point here, not speed: this kernel is the executable definition the
rest of the package is validated against.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

DEFAULT_ATOM_CAP = 20
ATOM_CAP_ENV = "XRESP_ASP_ATOM_CAP"

_ATOM_RE = re.compile(r"^[a-z_][A-Za-z0-9_]*$")
_HEAD_SPLIT_RE = re.compile(r"\s+v\s+")


class ProgramSyntaxError(ValueError):
    """Malformed program text; message carries the line number."""


class EnumerationCapError(ValueError):
    """Herbrand base too large for exhaustive enumeration."""


@dataclass(frozen=True)
class Rule:
    head: frozenset[str]  # empty head = hard constraint
    pos: frozenset[str]
    neg: frozenset[str]


@dataclass(frozen=True)
class WeakConstraint:
    pos: frozenset[str]
    neg: frozenset[str]


@dataclass(frozen=True)
class GroundProgram:
    atoms: frozenset[str]
    rules: tuple[Rule, ...]
    weak: tuple[WeakConstraint, ...] = ()


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def parse_program(text: str) -> GroundProgram:
    """Parse program text; ``%`` starts a comment, statements end with ``.``."""
    rules: list[Rule] = []
    weak: list[WeakConstraint] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        if not line.endswith("."):
            raise ProgramSyntaxError(f"line {lineno}: statement must end with '.'")
        for statement in line.split("."):
            statement = statement.strip()
            if not statement:
                continue
            _parse_statement(statement, lineno, rules, weak)

    atoms: set[str] = set()
    for rule in rules:
        atoms |= rule.head | rule.pos | rule.neg
    for wc in weak:
        atoms |= wc.pos | wc.neg
    return GroundProgram(atoms=frozenset(atoms), rules=tuple(rules), weak=tuple(weak))


def _parse_statement(
    statement: str, lineno: int, rules: list[Rule], weak: list[WeakConstraint]
) -> None:
    if statement.startswith(":~"):
        pos, neg = _parse_body(statement[2:], lineno)
        weak.append(WeakConstraint(pos=pos, neg=neg))
        return
    if statement.startswith(":-"):
        pos, neg = _parse_body(statement[2:], lineno)
        rules.append(Rule(head=frozenset(), pos=pos, neg=neg))
        return
    head_text, sep, body_text = statement.partition(":-")
    head = _parse_head(head_text, lineno)
    if sep:
        pos, neg = _parse_body(body_text, lineno)
    else:
        pos = neg = frozenset()
    rules.append(Rule(head=head, pos=pos, neg=neg))


def _parse_head(text: str, lineno: int) -> frozenset[str]:
    head: set[str] = set()
    for token in _HEAD_SPLIT_RE.split(text.strip()):
        token = token.strip()
        if not _ATOM_RE.match(token):
            raise ProgramSyntaxError(f"line {lineno}: bad head atom: {token!r}")
        head.add(token)
    return frozenset(head)


def _parse_body(text: str, lineno: int) -> tuple[frozenset[str], frozenset[str]]:
    pos: set[str] = set()
    neg: set[str] = set()
    for literal in text.split(","):
        literal = literal.strip()
        if literal.startswith("not ") or literal.startswith("not\t"):
            atom = literal[4:].strip()
            bucket = neg
        else:
            atom = literal
            bucket = pos
        if not _ATOM_RE.match(atom):
            raise ProgramSyntaxError(f"line {lineno}: bad body literal: {literal!r}")
        bucket.add(atom)
    return frozenset(pos), frozenset(neg)


# ---------------------------------------------------------------------------
# Semantics
# ---------------------------------------------------------------------------


def reduct(program: GroundProgram, s: frozenset[str]) -> GroundProgram:
    """The Gelfond-Lifschitz transform of the program w.r.t. ``s``."""
    unknown = s - program.atoms
    if unknown:
        raise ValueError(f"atoms outside the Herbrand base: {sorted(unknown)}")
    kept = tuple(
        Rule(head=rule.head, pos=rule.pos, neg=frozenset())
        for rule in program.rules
        if not (rule.neg & s)
    )
    return GroundProgram(atoms=program.atoms, rules=kept, weak=())


def _resolve_cap(cap: int | None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get(ATOM_CAP_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValueError(f"{ATOM_CAP_ENV} must be an integer, got {env!r}") from exc
    return DEFAULT_ATOM_CAP


def _check_cap(program: GroundProgram, cap: int | None) -> None:
    limit = _resolve_cap(cap)
    if len(program.atoms) > limit:
        raise EnumerationCapError(
            f"Herbrand base has {len(program.atoms)} atoms; exhaustive "
            f"enumeration is capped at {limit} (raise the cap or set "
            f"{ATOM_CAP_ENV})"
        )


def _masks(program: GroundProgram, order: list[str]) -> list[tuple[int, int, int]]:
    index = {atom: i for i, atom in enumerate(order)}
    def mask(atoms: frozenset[str]) -> int:
        m = 0
        for atom in atoms:
            m |= 1 << index[atom]
        return m
    return [(mask(r.head), mask(r.pos), mask(r.neg)) for r in program.rules]


def _satisfies(mask: int, rule_masks: list[tuple[int, int, int]]) -> bool:
    for head, pos, neg in rule_masks:
        if pos & mask == pos and neg & mask == 0:
            if head & mask == 0:
                return False
    return True


def minimal_models(
    program: GroundProgram, *, cap: int | None = None
) -> tuple[frozenset[str], ...]:
    """Subset-minimal models of a negation-free program."""
    for rule in program.rules:
        if rule.neg:
            raise ValueError("minimal_models requires a negation-free program")
    _check_cap(program, cap)

    order = sorted(program.atoms)
    rule_masks = _masks(program, order)
    n = len(order)

    satisfying = [m for m in range(1 << n) if _satisfies(m, rule_masks)]
    satisfying.sort(key=lambda m: (bin(m).count("1"), m))
    minimal: list[int] = []
    for m in satisfying:
        if not any(kept & m == kept for kept in minimal):
            minimal.append(m)

    models = [_unmask(m, order) for m in minimal]
    return tuple(sorted(models, key=lambda model: tuple(sorted(model))))


def _unmask(mask: int, order: list[str]) -> frozenset[str]:
    return frozenset(atom for i, atom in enumerate(order) if mask >> i & 1)


def stable_models(
    program: GroundProgram, *, cap: int | None = None
) -> tuple[frozenset[str], ...]:
    """All stable models; with weak constraints, only minimum-violation ones."""
    _check_cap(program, cap)
    order = sorted(program.atoms)
    n = len(order)
    index = {atom: i for i, atom in enumerate(order)}

    def mask_of(atoms: frozenset[str]) -> int:
        m = 0
        for atom in atoms:
            m |= 1 << index[atom]
        return m

    rule_triples = [
        (mask_of(r.head), mask_of(r.pos), mask_of(r.neg)) for r in program.rules
    ]
    weak_pairs = [(mask_of(w.pos), mask_of(w.neg)) for w in program.weak]

    stable_masks: list[int] = []
    for candidate in range(1 << n):
        # reduct: drop rules whose negative body intersects the candidate
        reduct_masks = [
            (head, pos, 0)
            for head, pos, neg in rule_triples
            if neg & candidate == 0
        ]
        if not _satisfies(candidate, reduct_masks):
            continue
        # minimality: no proper submask may satisfy the reduct
        minimal = True
        if candidate:
            sub = (candidate - 1) & candidate
            while True:
                if _satisfies(sub, reduct_masks):
                    minimal = False
                    break
                if sub == 0:
                    break
                sub = (sub - 1) & candidate
        if minimal:
            stable_masks.append(candidate)

    if program.weak and stable_masks:
        def violations(mask: int) -> int:
            return sum(
                1 for pos, neg in weak_pairs if pos & mask == pos and neg & mask == 0
            )
        best = min(violations(m) for m in stable_masks)
        stable_masks = [m for m in stable_masks if violations(m) == best]

    models = [_unmask(m, order) for m in stable_masks]
    return tuple(sorted(models, key=lambda model: tuple(sorted(model))))


def answer_query_ground(
    program: GroundProgram,
    query_atoms: frozenset[str] | set[str],
    semantics: str,
    *,
    cap: int | None = None,
) -> bool:
    """Brave: some stable model contains every query atom; cautious: all do."""
    atoms = frozenset(query_atoms)
    unknown = atoms - program.atoms
    if unknown:
        raise ValueError(f"query atoms outside the Herbrand base: {sorted(unknown)}")
    if semantics not in ("brave", "cautious"):
        raise ValueError(f"semantics must be 'brave' or 'cautious', got {semantics!r}")
    models = stable_models(program, cap=cap)
    if semantics == "brave":
        return any(atoms <= model for model in models)
    return all(atoms <= model for model in models)
