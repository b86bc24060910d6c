"""Competence taxonomy (the 3-level PIS tree) and job profiles."""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from types import MappingProxyType

from .errors import (
    CompgapError,
    DepthViolation,
    DuplicateId,
    IncompleteRcd,
    MissingParent,
    OrphanInternal,
    ParseError,
    ScoreOutOfRange,
    UnknownCompetenceInRule,
    UnknownId,
    UnknownTerm,
)
from .hcv import HcvAllocation

ID_PATTERN = re.compile(r"^C[1-9]\d*(\.[1-9]\d*)*$")
MAX_LEVEL = 3
SCORE_MIN, SCORE_MAX = 1.0, 5.0

IMPORTANCE_SCALE = {
    "very important": 5,
    "important": 4,
    "moderately important": 3,
    "of little importance": 2,
    "unimportant": 1,
}


def id_key(cid: str) -> tuple[int, ...]:
    """Sort key ordering ``C1.10`` after ``C1.9``."""
    return tuple(int(p) for p in cid[1:].split("."))


def id_level(cid: str) -> int:
    return cid.count(".") + 1


@dataclass(frozen=True)
class CompetenceNode:
    id: str
    name: str = ""
    parent: str | None = None

    @property
    def level(self) -> int:
        return id_level(self.id)


@dataclass(frozen=True)
class NodeView:
    node: CompetenceNode
    children: tuple[str, ...]
    leaves: tuple[str, ...]

    @property
    def level(self) -> int:
        return self.node.level

    @property
    def parent(self) -> str | None:
        return self.node.parent

    @property
    def is_leaf(self) -> bool:
        return not self.children


class CompetenceTree:
    """Validated, immutable competence hierarchy. Build with :func:`build_tree`."""

    def __init__(self, nodes: Mapping[str, CompetenceNode], children: Mapping[str, tuple[str, ...]]):
        self._nodes = MappingProxyType(dict(nodes))
        self._children = MappingProxyType(dict(children))
        self.roots: tuple[str, ...] = tuple(
            sorted((n.id for n in nodes.values() if n.parent is None), key=id_key)
        )
        self._by_level = {
            k: tuple(sorted((i for i in nodes if id_level(i) == k), key=id_key))
            for k in range(1, MAX_LEVEL + 1)
        }

    def __contains__(self, cid: object) -> bool:
        return cid in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompetenceTree):
            return NotImplemented
        return dict(self._nodes) == dict(other._nodes)

    def __repr__(self) -> str:
        sizes = "/".join(str(len(self.level_ids(k))) for k in range(1, MAX_LEVEL + 1))
        return f"CompetenceTree({sizes})"

    @property
    def nodes(self) -> Mapping[str, CompetenceNode]:
        return self._nodes

    def node(self, cid: str) -> CompetenceNode:
        try:
            return self._nodes[cid]
        except KeyError:
            raise UnknownId(f"unknown competence id {cid!r}") from None

    def level_ids(self, level: int) -> tuple[str, ...]:
        return self._by_level.get(level, ())

    @property
    def leaves(self) -> tuple[str, ...]:
        return self.level_ids(MAX_LEVEL)

    def children(self, cid: str) -> tuple[str, ...]:
        self.node(cid)
        return self._children.get(cid, ())

    def leaf_descendants(self, cid: str) -> tuple[str, ...]:
        kids = self.children(cid)
        if not kids:
            return (cid,)
        return tuple(leaf for k in kids for leaf in self.leaf_descendants(k))

    def query(self, cid: str) -> NodeView:
        node = self.node(cid)
        return NodeView(node, self.children(cid), self.leaf_descendants(cid))

    def shape(self) -> str:
        return "/".join(str(len(self.level_ids(k))) for k in range(1, MAX_LEVEL + 1))

    def to_records(self) -> list[dict]:
        ordered = sorted(self._nodes.values(), key=lambda n: (n.level, id_key(n.id)))
        return [{"id": n.id, "name": n.name, "parent": n.parent} for n in ordered]


def tree_problems(node_list: Sequence[CompetenceNode]) -> list[CompgapError]:
    """Every structural violation found in ``node_list`` (empty when valid)."""
    problems: list[CompgapError] = []
    if not node_list:
        return [ParseError("empty node list")]
    seen: dict[str, CompetenceNode] = {}
    for n in node_list:
        if not isinstance(n.id, str) or not ID_PATTERN.match(n.id):
            problems.append(ParseError(f"malformed competence id {n.id!r}", location=str(n.id)))
            continue
        if n.id in seen:
            problems.append(DuplicateId(f"duplicate id {n.id!r}", location=n.id))
            continue
        seen[n.id] = n
    for n in seen.values():
        if n.level > MAX_LEVEL:
            problems.append(DepthViolation(f"{n.id} is deeper than level {MAX_LEVEL}", location=n.id))
        if n.parent is None:
            if n.level != 1:
                problems.append(MissingParent(f"level-{n.level} node {n.id} has no parent", location=n.id))
            continue
        if n.level == 1:
            problems.append(DepthViolation(f"level-1 node {n.id} must not have a parent", location=n.id))
        elif n.parent not in seen:
            problems.append(MissingParent(f"parent {n.parent!r} of {n.id} not found", location=n.id))
        elif id_level(n.parent) != n.level - 1:
            problems.append(
                DepthViolation(f"{n.id} (level {n.level}) hangs under level-{id_level(n.parent)} {n.parent}", location=n.id)
            )
    has_child = {n.parent for n in seen.values() if n.parent is not None}
    for n in seen.values():
        if n.level < MAX_LEVEL and n.id not in has_child:
            problems.append(OrphanInternal(f"level-{n.level} node {n.id} has no children", location=n.id))
    return problems


def build_tree(node_list: Iterable[CompetenceNode]) -> CompetenceTree:
    nodes = list(node_list)
    problems = tree_problems(nodes)
    if problems:
        raise problems[0]
    by_id = {n.id: n for n in nodes}
    children: dict[str, list[str]] = {}
    for n in by_id.values():
        if n.parent is not None:
            children.setdefault(n.parent, []).append(n.id)
    return CompetenceTree(by_id, {p: tuple(sorted(c, key=id_key)) for p, c in children.items()})


def tree_query(tree: CompetenceTree, cid: str) -> NodeView:
    return tree.query(cid)


def importance_to_score(term: str) -> int:
    key = " ".join(str(term).split()).lower()
    try:
        return IMPORTANCE_SCALE[key]
    except KeyError:
        raise UnknownTerm(f"unknown importance term {term!r}") from None


def score_from_value(value: float | int | str, location: str | None = None) -> float:
    """Numeric score in [1, 5] from a number or a lexical importance term."""
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            return float(importance_to_score(value))
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"score must be a number or importance term, got {value!r}", location=location)
    v = float(value)
    if not SCORE_MIN <= v <= SCORE_MAX:
        raise ScoreOutOfRange(f"score {v} outside [1, 5]", location=location)
    return v


@dataclass(frozen=True)
class EligibilityRule:
    """Minimum score a candidate must reach on one competence (any level)."""

    competence: str
    min_score: float
    description: str = ""

    def __post_init__(self):
        if not SCORE_MIN <= self.min_score <= SCORE_MAX:
            raise ScoreOutOfRange(f"eligibility threshold {self.min_score} outside [1, 5]", location=self.competence)


@dataclass(frozen=True)
class JobProfile:
    job_id: str
    rcd3: Mapping[str, float]
    allocation: HcvAllocation
    eligibility: tuple[EligibilityRule, ...] = field(default=())

    @property
    def f(self) -> float:
        return self.allocation.f

    @property
    def hcv1(self) -> Mapping[str, float]:
        return self.allocation.level1

    @property
    def hcv2(self) -> dict[str, float]:
        return {cid: y for group in self.allocation.level2.values() for cid, y in group.items()}


def job_problems(
    tree: CompetenceTree,
    rcd3: Mapping[str, float | int | str],
    hcv1: Mapping[str, float],
    hcv2: Mapping[str, float],
    eligibility: Sequence[EligibilityRule | Mapping] = (),
    f: float = 100,
) -> list[CompgapError]:
    problems: list[CompgapError] = []
    for cid, value in rcd3.items():
        if cid not in tree or id_level(cid) != MAX_LEVEL:
            problems.append(UnknownId(f"rcd3 entry {cid!r} is not a leaf of the tree", location=f"rcd3.{cid}"))
            continue
        try:
            score_from_value(value, location=f"rcd3.{cid}")
        except CompgapError as exc:
            exc.location = exc.location or f"rcd3.{cid}"
            problems.append(exc)
    missing = [leaf for leaf in tree.leaves if leaf not in rcd3]
    if missing:
        shown = ", ".join(missing[:5]) + (" ..." if len(missing) > 5 else "")
        problems.append(IncompleteRcd(f"{len(missing)} leaves without a required score: {shown}", location="rcd3"))
    try:
        HcvAllocation.from_flat(tree, hcv1, hcv2, f)
    except CompgapError as exc:
        problems.append(exc)
    for i, rule in enumerate(eligibility):
        try:
            rule = _as_rule(rule)
        except CompgapError as exc:
            exc.location = exc.location or f"eligibility[{i}]"
            problems.append(exc)
            continue
        if rule.competence not in tree:
            problems.append(
                UnknownCompetenceInRule(f"rule references unknown competence {rule.competence!r}", location=f"eligibility[{i}]")
            )
    return problems


def _as_rule(rule: EligibilityRule | Mapping) -> EligibilityRule:
    if isinstance(rule, EligibilityRule):
        return rule
    try:
        return EligibilityRule(str(rule["competence"]), float(rule["min_score"]), str(rule.get("description", "")))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed eligibility rule {rule!r}") from exc


def build_job_profile(
    tree: CompetenceTree,
    rcd3: Mapping[str, float | int | str],
    hcv1: Mapping[str, float],
    hcv2: Mapping[str, float],
    eligibility: Sequence[EligibilityRule | Mapping] = (),
    f: float = 100,
    job_id: str = "job",
) -> JobProfile:
    """Validated job profile; lexical RCD terms are mapped to 1..5."""
    problems = job_problems(tree, rcd3, hcv1, hcv2, eligibility, f)
    if problems:
        raise problems[0]
    scores = {leaf: score_from_value(rcd3[leaf]) for leaf in tree.leaves}
    return JobProfile(
        job_id=job_id,
        rcd3=MappingProxyType(scores),
        allocation=HcvAllocation.from_flat(tree, hcv1, hcv2, f),
        eligibility=tuple(_as_rule(r) for r in eligibility),
    )
