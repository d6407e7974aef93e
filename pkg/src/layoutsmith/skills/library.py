"""Versioned store of scoring skills.

Skills resolve by name to one active version. Bodies are either DSL
definitions or native callables; both clamp to [0, 1] at the evaluation
boundary. Consensus merging picks, among candidate bodies, the one most
similar to the rest under tree edit distance (a configured learner
callback may override the choice).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Mapping, Sequence

from ..geometry import Layout, clamp
from ..relations import NATIVE_SCORERS, RelationKind
from .evaluate import eval_skill
from .expr import Expr, SkillDef, children, node_count, node_label, print_skill
from .parser import parse_skill
from .typecheck import check_skill


class UnresolvedSkill(KeyError):
    pass


class EmptyCandidateSet(ValueError):
    pass


class IncompatibleParams(ValueError):
    pass


NativeFn = Callable[[Sequence[Layout], Mapping[str, object]], float]


@dataclass(frozen=True)
class Skill:
    """One version of one named skill."""

    name: str
    version: int
    definition: SkillDef | None = None
    native: NativeFn | None = None
    provenance: str = ""
    source: str | None = None

    def __post_init__(self) -> None:
        if (self.definition is None) == (self.native is None):
            raise ValueError("a skill has either a definition or a native "
                             "callable, not both")

    def canonical_source(self) -> str:
        if self.definition is not None:
            return print_skill(self.definition)
        return f"# {self.name}: built-in native implementation\n"


# ---- tree edit distance (Zhang–Shasha, unit costs) ----

def _postorder(root: Expr) -> list[Expr]:
    out: list[Expr] = []

    def visit(n: Expr) -> None:
        for c in children(n):
            visit(c)
        out.append(n)

    visit(root)
    return out


def tree_edit_distance(t1: Expr, t2: Expr) -> int:
    """Minimum node insertions/deletions/relabels turning t1 into t2."""
    post1, post2 = _postorder(t1), _postorder(t2)
    lab1 = [node_label(n) for n in post1]
    lab2 = [node_label(n) for n in post2]

    def leftmost(post: list[Expr]) -> list[int]:
        index = {id(n): i for i, n in enumerate(post)}
        lml = [0] * len(post)
        for i, n in enumerate(post):
            ch = children(n)
            lml[i] = i if not ch else lml[index[id(ch[0])]]
        return lml

    l1, l2 = leftmost(post1), leftmost(post2)

    def keyroots(lml: list[int]) -> list[int]:
        last: dict[int, int] = {}
        for i, l in enumerate(lml):
            last[l] = i
        return sorted(last.values())

    n1, n2 = len(post1), len(post2)
    td = [[0] * n2 for _ in range(n1)]
    for i in keyroots(l1):
        for j in keyroots(l2):
            li, lj = l1[i], l2[j]
            rows, cols = i - li + 2, j - lj + 2
            fd = [[0] * cols for _ in range(rows)]
            for di in range(1, rows):
                fd[di][0] = fd[di - 1][0] + 1
            for dj in range(1, cols):
                fd[0][dj] = fd[0][dj - 1] + 1
            for di in range(1, rows):
                for dj in range(1, cols):
                    i1, j1 = li + di - 1, lj + dj - 1
                    if l1[i1] == li and l2[j1] == lj:
                        cost = 0 if lab1[i1] == lab2[j1] else 1
                        fd[di][dj] = min(fd[di - 1][dj] + 1,
                                         fd[di][dj - 1] + 1,
                                         fd[di - 1][dj - 1] + cost)
                        td[i1][j1] = fd[di][dj]
                    else:
                        fd[di][dj] = min(
                            fd[di - 1][dj] + 1,
                            fd[di][dj - 1] + 1,
                            fd[l1[i1] - li][l2[j1] - lj] + td[i1][j1])
    return td[n1 - 1][n2 - 1]


def ast_similarity(a: Expr, b: Expr) -> float:
    """1 minus normalized edit distance, floored at 0."""
    d = tree_edit_distance(a, b)
    biggest = max(node_count(a), node_count(b))
    return max(0.0, 1.0 - d / biggest)


def _param_signature(d: SkillDef) -> tuple[tuple[str, str], ...]:
    return tuple((p.name, str(p.ty)) for p in d.params)


# ---- the library ----

class SkillLibrary:
    def __init__(self) -> None:
        self._versions: dict[str, dict[int, Skill]] = {}
        self._active: dict[str, int] = {}

    def names(self) -> list[str]:
        return sorted(self._versions)

    def versions(self, name: str) -> list[int]:
        if name not in self._versions:
            raise UnresolvedSkill(name)
        return sorted(self._versions[name])

    def has(self, name: str) -> bool:
        return name in self._versions

    def add(self, skill: Skill, make_active: bool = True) -> None:
        bucket = self._versions.setdefault(skill.name, {})
        if skill.version in bucket:
            raise ValueError(
                f"skill '{skill.name}' already has version {skill.version}")
        bucket[skill.version] = skill
        if make_active or skill.name not in self._active:
            self._active[skill.name] = skill.version

    def active(self, name: str) -> Skill:
        if name not in self._versions:
            raise UnresolvedSkill(name)
        return self._versions[name][self._active[name]]

    def get(self, name: str, version: int) -> Skill:
        if name not in self._versions or version not in self._versions[name]:
            raise UnresolvedSkill(f"{name} v{version}")
        return self._versions[name][version]

    def evaluate(self, name: str, members: Sequence[Layout],
                 args: Mapping[str, object] | None = None) -> float:
        """Score members with the active version of a skill, clamped."""
        skill = self.active(name)
        if skill.native is not None:
            return clamp(float(skill.native(members, args or {})), 0.0, 1.0)
        return eval_skill(skill.definition, members, args)

    def copy(self) -> "SkillLibrary":
        dup = SkillLibrary()
        dup._versions = {name: dict(bucket)
                         for name, bucket in self._versions.items()}
        dup._active = dict(self._active)
        return dup

    def replace_body(self, name: str, source: str, provenance: str) -> Skill:
        """Install a new version parsed from source and make it active."""
        d = check_skill(parse_skill(source))
        if d.name != name:
            raise ValueError(
                f"source defines '{d.name}' but was bound to '{name}'")
        current = self._versions.get(name)
        if current:
            active = self.active(name)
            if (active.definition is not None
                    and _param_signature(active.definition)
                    != _param_signature(d)):
                raise IncompatibleParams(
                    f"'{name}' cannot change its parameter list")
            version = max(current) + 1
        else:
            version = 1
        skill = Skill(name, version, definition=d, provenance=provenance,
                      source=source)
        self.add(skill)
        return skill

    def merge_candidates(
            self, name: str, candidates: Sequence[Skill],
            chooser: Callable[[Sequence[Skill]], int] | None = None
    ) -> Skill:
        """Fold candidate bodies into one new active version.

        The deterministic rule keeps the candidate with the highest mean
        pairwise AST similarity to the others, breaking ties by smallest
        canonical source. A chooser callback (the learner oracle) may pick
        the winner instead; an out-of-range pick falls back to the rule.
        """
        if not candidates:
            raise EmptyCandidateSet(f"no candidates for '{name}'")
        defs = []
        for c in candidates:
            if c.definition is None:
                raise IncompatibleParams(
                    f"candidate for '{name}' has no DSL body")
            defs.append(c.definition)
        sig = _param_signature(defs[0])
        for d in defs[1:]:
            if _param_signature(d) != sig:
                raise IncompatibleParams(
                    f"candidates for '{name}' disagree on parameters")
        if self.has(name):
            active = self.active(name)
            if (active.definition is not None
                    and _param_signature(active.definition) != sig):
                raise IncompatibleParams(
                    f"'{name}' cannot change its parameter list")

        winner: int | None = None
        if chooser is not None:
            pick = chooser(candidates)
            if isinstance(pick, int) and 0 <= pick < len(candidates):
                winner = pick
        if winner is None:
            best_key: tuple[float, str] | None = None
            for i, d in enumerate(defs):
                others = [ast_similarity(d.body, o.body)
                          for k, o in enumerate(defs) if k != i]
                score = sum(others) / len(others) if others else 1.0
                key = (-score, print_skill(d))
                if best_key is None or key < best_key:
                    best_key = key
                    winner = i
        chosen = candidates[winner]
        version = (max(self._versions[name]) + 1) if self.has(name) else 1
        merged = Skill(name, version, definition=chosen.definition,
                       provenance=(f"consensus of {len(candidates)} "
                                   f"candidates; from {chosen.provenance}"
                                   if chosen.provenance else
                                   f"consensus of {len(candidates)} "
                                   f"candidates"),
                       source=chosen.source)
        self.add(merged)
        return merged

    # ---- persistence ----

    def save_manifest(self, directory: str | Path) -> Path:
        """Write every version as a .skill file plus a manifest.json."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        manifest: dict[str, dict] = {}
        for name in self.names():
            entry: dict = {"active": self._active[name], "versions": {}}
            for version in self.versions(name):
                skill = self.get(name, version)
                if skill.native is not None:
                    entry["versions"][str(version)] = {"native": True}
                else:
                    fname = f"{name}_v{version}.skill"
                    (directory / fname).write_text(
                        skill.canonical_source(), encoding="utf-8")
                    entry["versions"][str(version)] = {"file": fname}
            manifest[name] = entry
        path = directory / "manifest.json"
        path.write_text(
            json.dumps({"skills": manifest}, sort_keys=True, indent=2)
            + "\n", encoding="utf-8")
        return path

    @classmethod
    def load_manifest(cls, path: str | Path) -> "SkillLibrary":
        path = Path(path)
        if path.is_dir():
            path = path / "manifest.json"
        data = json.loads(path.read_text(encoding="utf-8"))
        lib = cls()
        for name, entry in sorted(data["skills"].items()):
            for vtext, vinfo in sorted(entry["versions"].items(),
                                       key=lambda kv: int(kv[0])):
                version = int(vtext)
                if vinfo.get("native"):
                    native = _native_for(name)
                    lib.add(Skill(name, version, native=native,
                                  provenance="built-in native"),
                            make_active=False)
                else:
                    source = (path.parent / vinfo["file"]).read_text(
                        encoding="utf-8")
                    d = check_skill(parse_skill(source))
                    lib.add(Skill(name, version, definition=d,
                                  provenance="loaded", source=source),
                            make_active=False)
            lib._active[name] = int(entry["active"])
        return lib


def _native_for(name: str) -> NativeFn:
    try:
        return NATIVE_SCORERS[RelationKind(name)]
    except (KeyError, ValueError):
        raise UnresolvedSkill(f"no native implementation for '{name}'")


# The shipped scorer skills carried as DSL sources; overlap and repetition
# stay native (vertex-set arithmetic has no list-of-corners DSL type).
DSL_BUILTIN_NAMES = (
    "proximity", "direction", "alignment", "symmetry", "parallelism",
    "perpendicularity", "hierarchy", "rotation", "scaling",
)
NATIVE_BUILTIN_NAMES = ("overlap", "repetition")


def builtin_source(name: str) -> str:
    ref = resources.files("layoutsmith.skills").joinpath(
        f"data/{name}.skill")
    return ref.read_text(encoding="utf-8")


def default_library() -> SkillLibrary:
    """Fresh library with one built-in skill per relation kind."""
    lib = SkillLibrary()
    for name in DSL_BUILTIN_NAMES:
        source = builtin_source(name)
        d = check_skill(parse_skill(source))
        lib.add(Skill(name, 1, definition=d, provenance="built-in",
                      source=source))
    for name in NATIVE_BUILTIN_NAMES:
        lib.add(Skill(name, 1, native=_native_for(name),
                      provenance="built-in native"))
    return lib


def merge_candidates(library: SkillLibrary, name: str,
                     candidates: Sequence[Skill],
                     chooser: Callable[[Sequence[Skill]], int] | None = None
                     ) -> Skill:
    """Module-level convenience over SkillLibrary.merge_candidates."""
    return library.merge_candidates(name, candidates, chooser)
