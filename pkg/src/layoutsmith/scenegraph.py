"""Relational scene documents.

A document is a bipartite graph: asset nodes on one side, relation nodes
on the other, with ordered member edges. Documents are immutable; reviewer
feedback produces a new document atomically and appends to its history.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence, Union

from .geometry import Layout, Vec3
from .relations import (
    ArityError, RelationKind, check_arity, validate_args,
)
from .skills.library import SkillLibrary
from .skills.parser import ParseError, parse_skill
from .skills.typecheck import TypeCheckError, check_skill


class MissingLayout(KeyError):
    """An asset referenced by scoring or emission has no layout."""


class InvalidEdit(ValueError):
    """A feedback edit cannot apply; carries the index of the bad edit."""

    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"edit {index}: {reason}")


@dataclass(frozen=True)
class AssetRef:
    id: str
    name: str
    description: str = ""
    height_m: float = 1.0


@dataclass(frozen=True)
class RelationNode:
    """One constraint: a kind, ordered member asset ids, args, and the
    name of the skill that scores it."""

    id: str
    kind: RelationKind
    members: tuple[str, ...]
    args: dict = field(default_factory=dict)
    skill: str = ""

    def __post_init__(self) -> None:
        if not self.skill:
            object.__setattr__(self, "skill", self.kind.value)


@dataclass(frozen=True)
class SubScene:
    title: str
    asset_list: tuple[str, ...]
    description: str = ""


@dataclass(frozen=True)
class CameraSpec:
    location: Vec3
    target: Vec3
    lens: float = 35.0

    def __post_init__(self) -> None:
        if self.location == self.target:
            raise ValueError("camera location must differ from its target")


# ---- feedback edits ----

@dataclass(frozen=True)
class AddRelation:
    relation: RelationNode


@dataclass(frozen=True)
class RemoveRelation:
    relation_id: str


@dataclass(frozen=True)
class SetArg:
    relation_id: str
    name: str
    value: object


@dataclass(frozen=True)
class ReplaceSkillBody:
    skill_name: str
    source: str


Edit = Union[AddRelation, RemoveRelation, SetArg, ReplaceSkillBody]

VERDICTS = ("accept", "revise")


@dataclass(frozen=True)
class ReviewFeedback:
    verdict: str
    edits: tuple[Edit, ...] = ()

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}, "
                             f"got {self.verdict!r}")


@dataclass(frozen=True)
class SceneDocument:
    query: str
    subscenes: tuple[SubScene, ...] = ()
    assets: tuple[AssetRef, ...] = ()
    relations: tuple[RelationNode, ...] = ()
    layouts: dict = field(default_factory=dict)  # asset id -> Layout
    camera: CameraSpec | None = None
    history: tuple[ReviewFeedback, ...] = ()

    def asset_ids(self) -> set[str]:
        return {a.id for a in self.assets}

    def relation_by_id(self, relation_id: str) -> RelationNode | None:
        for r in self.relations:
            if r.id == relation_id:
                return r
        return None

    def with_layouts(self, layouts: Mapping[str, Layout]) -> "SceneDocument":
        return replace(self, layouts=dict(layouts))


@dataclass(frozen=True)
class Violation:
    rule: str
    subject: str
    message: str


def validate(doc: SceneDocument) -> list[Violation]:
    """Structural problems with a document; an empty list means valid."""
    out: list[Violation] = []
    seen_assets: set[str] = set()
    for a in doc.assets:
        if a.id in seen_assets:
            out.append(Violation("DuplicateId", a.id,
                                 f"asset id '{a.id}' appears twice"))
        seen_assets.add(a.id)
        if not (math.isfinite(a.height_m) and a.height_m > 0.0):
            out.append(Violation("NonPositiveHeight", a.id,
                                 f"asset '{a.id}' height_m={a.height_m!r}"))
    asset_ids = {a.id for a in doc.assets}

    seen_relations: set[str] = set()
    for r in doc.relations:
        if r.id in seen_relations:
            out.append(Violation("DuplicateId", r.id,
                                 f"relation id '{r.id}' appears twice"))
        seen_relations.add(r.id)
        if not r.members:
            out.append(Violation("EmptyMembers", r.id,
                                 f"relation '{r.id}' has no members"))
        for m in r.members:
            if m not in asset_ids:
                out.append(Violation(
                    "DanglingEdge", r.id,
                    f"relation '{r.id}' references unknown asset '{m}'"))
        try:
            check_arity(r.kind, len(r.members))
        except ArityError as exc:
            out.append(Violation("ArityViolation", r.id, str(exc)))
        for problem in validate_args(r.kind, r.args):
            out.append(Violation("BadArgs", r.id, problem))

    for i, s in enumerate(doc.subscenes):
        subject = s.title or f"subscene[{i}]"
        if not s.asset_list:
            out.append(Violation("EmptySubScene", subject,
                                 "sub-scene lists no assets"))
        for m in s.asset_list:
            if m not in asset_ids:
                out.append(Violation(
                    "DanglingEdge", subject,
                    f"sub-scene references unknown asset '{m}'"))

    for lid in doc.layouts:
        if lid not in asset_ids:
            out.append(Violation("DanglingEdge", lid,
                                 f"layout for unknown asset '{lid}'"))
    return out


def _check_edit(edit: Edit, index: int, relations: list[RelationNode],
                asset_ids: set[str]) -> None:
    if isinstance(edit, AddRelation):
        r = edit.relation
        if any(existing.id == r.id for existing in relations):
            raise InvalidEdit(index, f"relation id '{r.id}' already exists")
        if not r.members:
            raise InvalidEdit(index, f"relation '{r.id}' has no members")
        for m in r.members:
            if m not in asset_ids:
                raise InvalidEdit(index, f"unknown member asset '{m}'")
        try:
            check_arity(r.kind, len(r.members))
        except ArityError as exc:
            raise InvalidEdit(index, str(exc))
        problems = validate_args(r.kind, r.args)
        if problems:
            raise InvalidEdit(index, "; ".join(problems))
        return
    if isinstance(edit, RemoveRelation):
        if not any(r.id == edit.relation_id for r in relations):
            raise InvalidEdit(index,
                              f"no relation with id '{edit.relation_id}'")
        return
    if isinstance(edit, SetArg):
        target = next((r for r in relations if r.id == edit.relation_id),
                      None)
        if target is None:
            raise InvalidEdit(index,
                              f"no relation with id '{edit.relation_id}'")
        candidate = dict(target.args)
        candidate[edit.name] = edit.value
        problems = validate_args(target.kind, candidate)
        if problems:
            raise InvalidEdit(index, "; ".join(problems))
        return
    if isinstance(edit, ReplaceSkillBody):
        try:
            d = check_skill(parse_skill(edit.source))
        except (ParseError, TypeCheckError) as exc:
            raise InvalidEdit(index, f"bad skill source: {exc}")
        if d.name != edit.skill_name:
            raise InvalidEdit(
                index, f"source defines '{d.name}', edit names "
                       f"'{edit.skill_name}'")
        return
    raise InvalidEdit(index, f"unknown edit type {type(edit).__name__}")


def apply_feedback(doc: SceneDocument,
                   fb: ReviewFeedback) -> SceneDocument:
    """Apply every edit or none; the original document is untouched.

    Graph edits rewrite the relation set. ReplaceSkillBody edits are
    validated (parse + typecheck) and recorded in history; installing the
    new body into a library is the caller's job.
    """
    relations = list(doc.relations)
    asset_ids = doc.asset_ids()
    # First pass: validate all edits against a scratch copy.
    scratch = list(relations)
    for i, edit in enumerate(fb.edits):
        _check_edit(edit, i, scratch, asset_ids)
        if isinstance(edit, AddRelation):
            scratch.append(edit.relation)
        elif isinstance(edit, RemoveRelation):
            scratch = [r for r in scratch if r.id != edit.relation_id]
        elif isinstance(edit, SetArg):
            scratch = [
                replace(r, args={**r.args, edit.name: edit.value})
                if r.id == edit.relation_id else r
                for r in scratch
            ]
    return replace(doc, relations=tuple(scratch),
                   history=doc.history + (fb,))


def member_layouts(relation: RelationNode,
                   layouts: Mapping[str, Layout]) -> list[Layout]:
    out = []
    for m in relation.members:
        if m not in layouts:
            raise MissingLayout(m)
        out.append(layouts[m])
    return out


def objective(relations: Sequence[RelationNode],
              layouts: Mapping[str, Layout],
              library: SkillLibrary) -> float:
    """Sum of per-relation scores; each term lies in [0, 1]."""
    total = 0.0
    for r in relations:
        total += library.evaluate(r.skill, member_layouts(r, layouts),
                                  r.args)
    return total


def total_objective(doc: SceneDocument, library: SkillLibrary) -> float:
    return objective(doc.relations, doc.layouts, library)
