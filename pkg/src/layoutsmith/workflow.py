"""Dual-loop layout workflow.

Inner loop: solve the current graph, show the reviewer a preview, apply
its feedback, repeat up to n_inner times (an accept verdict stops early).
Outer loop: run a batch of queries through decompose -> plan -> code ->
inner loop, then fold every proposed skill body into the library by
consensus, once per name.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from .assets import (default_layout, normalize_height, retrieve,
                     unique_ids)
from .emit import SchemaError, edit_from_json, emit_preview, ensure_camera
from .geometry import Layout
from .oracles import OracleProtocolError, OracleRequest, load_prompt
from .relations import RelationKind
from .scenegraph import (AssetRef, InvalidEdit, RelationNode,
                         ReplaceSkillBody, ReviewFeedback, SceneDocument,
                         SubScene, VERDICTS, apply_feedback,
                         total_objective, validate)
from .skills.library import IncompatibleParams, Skill, SkillLibrary
from .solver import SolverConfig, solve


class FeedbackRejected(ValueError):
    """Reviewer edits failed validation; the iteration was skipped."""


@dataclass(frozen=True)
class RunConfig:
    n_inner: int = 3
    n_outer: int = 1
    solver: SolverConfig = field(default_factory=SolverConfig)
    use_library_learner: bool = False
    attach_preview: bool = True

    def __post_init__(self) -> None:
        if self.n_inner < 1:
            raise ValueError("n_inner must be at least 1")
        if self.n_outer < 1:
            raise ValueError("n_outer must be at least 1")


@dataclass(frozen=True)
class InnerResult:
    document: SceneDocument
    score: float
    library: SkillLibrary
    updates: tuple[Skill, ...]
    iteration_scores: tuple[float, ...]
    errors: tuple[str, ...]


@dataclass(frozen=True)
class OuterResult:
    library: SkillLibrary
    documents: tuple[SceneDocument, ...]
    errors: tuple[str, ...]


def render_preview(doc: SceneDocument) -> bytes:
    return emit_preview(doc).encode("utf-8")


def _relation_lines(doc: SceneDocument) -> str:
    lines = []
    for r in doc.relations:
        args = ", ".join(f"{k}={v!r}" for k, v in sorted(r.args.items()))
        lines.append(f"- {r.id}: {r.kind.value}({', '.join(r.members)})"
                     f" [{args}] skill={r.skill}")
    return "\n".join(lines) if lines else "- (none)"


def _review_prompt(query: str, doc: SceneDocument) -> str:
    steps = "\n".join(f"- {s.title}: {s.description}"
                      for s in doc.subscenes) or "- (single step)"
    return (f"{load_prompt('prompt_review')}\n"
            f"Scene intent: {query}\n"
            f"Plan:\n{steps}\n"
            f"Current relations:\n{_relation_lines(doc)}\n")


def parse_feedback(payload: object) -> ReviewFeedback:
    if not isinstance(payload, dict):
        raise OracleProtocolError("reviewer payload must be an object")
    verdict = payload.get("verdict")
    if verdict not in VERDICTS:
        raise OracleProtocolError(f"unknown verdict {verdict!r}")
    raw_edits = payload.get("edits", [])
    if not isinstance(raw_edits, list):
        raise OracleProtocolError("edits must be an array")
    edits = []
    for i, raw in enumerate(raw_edits):
        try:
            edits.append(edit_from_json(raw, f"/edits/{i}"))
        except SchemaError as exc:
            raise OracleProtocolError(f"bad edit: {exc}")
    if verdict == "accept" and edits:
        raise OracleProtocolError("accept must carry no edits")
    return ReviewFeedback(verdict=verdict, edits=tuple(edits))


def _install_source(lib: SkillLibrary, name: str, source: str,
                    provenance: str) -> Skill:
    try:
        return lib.replace_body(name, source, provenance)
    except (IncompatibleParams, ValueError) as exc:
        raise FeedbackRejected(str(exc))


def run_inner(query: str, doc: SceneDocument, cfg: RunConfig,
              lib: SkillLibrary, oracle,
              frozen: tuple[str, ...] = ()) -> InnerResult:
    """Solve / preview / review / revise up to cfg.n_inner times.

    Returns the best-scoring layouts seen, re-scored under the final
    graph and library so later graph edits cannot hide regressions.
    Iterations whose feedback fails to parse or validate are skipped with
    the prior state kept.
    """
    working = lib.copy()
    current = doc
    snapshots: list[dict[str, Layout]] = []
    updates: list[Skill] = []
    errors: list[str] = []
    iteration_scores: list[float] = []
    for t in range(1, cfg.n_inner + 1):
        result = solve(current, cfg.solver, working, frozen=frozen)
        current = current.with_layouts(result.layouts)
        snapshots.append(result.layouts)
        iteration_scores.append(result.score)
        try:
            image = render_preview(current) if cfg.attach_preview else None
            payload = oracle.ask(OracleRequest(
                "reviewer", _review_prompt(query, current), image))
            fb = parse_feedback(payload)
        except OracleProtocolError as exc:
            errors.append(f"iteration {t}: {exc}")
            continue
        # Dry-run the library updates, then the graph edits; commit both
        # only when everything passes.
        lib_next = working.copy()
        new_skills = []
        try:
            for edit in fb.edits:
                if isinstance(edit, ReplaceSkillBody):
                    new_skills.append(_install_source(
                        lib_next, edit.skill_name, edit.source,
                        provenance=f"review of '{query}'"))
            next_doc = apply_feedback(current, fb)
        except (InvalidEdit, FeedbackRejected) as exc:
            errors.append(f"iteration {t}: feedback rejected: {exc}")
            continue
        working = lib_next
        updates.extend(new_skills)
        current = next_doc
        if fb.verdict == "accept":
            break
    # Keep the best layouts seen, re-scored under the final graph and
    # library; a revision on the last iteration is solved on the next
    # run, not here.
    best_layouts = snapshots[0]
    best_score = None
    for snap in snapshots:
        score = total_objective(current.with_layouts(snap), working)
        if best_score is None or score > best_score:
            best_layouts, best_score = snap, score
    current = current.with_layouts(best_layouts)
    return InnerResult(document=current, score=best_score, library=working,
                       updates=tuple(updates),
                       iteration_scores=tuple(iteration_scores),
                       errors=tuple(errors))


# ---- outer loop ----

def _decompose_prompt(query: str) -> str:
    return (f"{load_prompt('query_find_assets')}\n"
            f"Scene request: {query}\n\n"
            f"{load_prompt('query_height_assets')}\n\n"
            f"{load_prompt('query_plan_assets')}\n"
            'Respond with JSON: {"assets": [{"name", "description", '
            '"height_m"}], "subscenes": [{"title", "asset_list", '
            '"description"}]}\n')


def _plan_prompt(query: str, sub: SubScene, ids: tuple[str, ...]) -> str:
    return (f"{load_prompt('prompt_graph')}\n"
            f"Scene request: {query}\n"
            f"Step: {sub.title}\n"
            f"Description: {sub.description}\n"
            f"Assets: {', '.join(ids)}\n"
            'Respond with JSON: {"relations": [{"id", "kind", '
            '"members"}]}\n')


def _code_prompt(query: str, sub: SubScene,
                 planned: list[dict]) -> str:
    lines = "\n".join(f"- {p['id']}: {p['kind']}({', '.join(p['members'])})"
                      for p in planned)
    return (f"{load_prompt('prompt_code')}\n"
            f"Scene request: {query}\n"
            f"Step: {sub.title}\n"
            f"Planned relations:\n{lines}\n")


def _parse_decomposition(payload: object):
    if not isinstance(payload, dict):
        raise OracleProtocolError("decomposer payload must be an object")
    raw_assets = payload.get("assets")
    raw_subs = payload.get("subscenes")
    if not isinstance(raw_assets, list) or not raw_assets:
        raise OracleProtocolError("decomposer must list assets")
    if not isinstance(raw_subs, list) or not raw_subs:
        raise OracleProtocolError("decomposer must list subscenes")
    assets = []
    for a in raw_assets:
        if not isinstance(a, dict) or not a.get("name"):
            raise OracleProtocolError("each asset needs a name")
        try:
            height = float(a.get("height_m", 1.0))
        except (TypeError, ValueError):
            raise OracleProtocolError(
                f"bad height for {a.get('name')!r}")
        assets.append((str(a["name"]), str(a.get("description", "")),
                       height))
    subs = []
    for s in raw_subs:
        if not isinstance(s, dict) or not isinstance(s.get("asset_list"),
                                                     list):
            raise OracleProtocolError("each subscene needs an asset_list")
        subs.append((str(s.get("title", "")),
                     [str(n) for n in s["asset_list"]],
                     str(s.get("description", ""))))
    return assets, subs


def _parse_plan(payload: object) -> list[dict]:
    if not isinstance(payload, dict) or \
            not isinstance(payload.get("relations"), list):
        raise OracleProtocolError("planner payload must carry relations")
    out = []
    for r in payload["relations"]:
        if not isinstance(r, dict):
            raise OracleProtocolError("each relation must be an object")
        if not all(k in r for k in ("id", "kind", "members")):
            raise OracleProtocolError("relation needs id, kind, members")
        if not isinstance(r["members"], list):
            raise OracleProtocolError("members must be an array")
        out.append({"id": str(r["id"]), "kind": str(r["kind"]),
                    "members": [str(m) for m in r["members"]]})
    return out


def _parse_code(payload: object):
    if not isinstance(payload, dict):
        raise OracleProtocolError("coder payload must be an object")
    args = payload.get("args", {})
    if not isinstance(args, dict) or \
            not all(isinstance(v, dict) for v in args.values()):
        raise OracleProtocolError("args must map relation ids to objects")
    skills = payload.get("skills", [])
    if not isinstance(skills, list):
        raise OracleProtocolError("skills must be an array")
    parsed = []
    for s in skills:
        if not isinstance(s, dict) or "name" not in s or "source" not in s:
            raise OracleProtocolError("each skill needs name and source")
        parsed.append((str(s["name"]), str(s["source"])))
    return args, parsed


def _initial_layouts(assets: list[AssetRef], catalog) -> dict[str, Layout]:
    layouts = {}
    for a in assets:
        if catalog:
            entry = retrieve(catalog, f"{a.name} {a.description}".strip(),
                             k=1)[0]
            layouts[a.id] = normalize_height(entry, a.height_m)
        else:
            layouts[a.id] = default_layout(a.height_m)
    return layouts


def _run_query(query: str, cfg: RunConfig, library: SkillLibrary,
               oracle, catalog) -> tuple[SceneDocument, list[Skill],
                                         list[str]]:
    payload = oracle.ask(OracleRequest("decomposer",
                                       _decompose_prompt(query)))
    raw_assets, raw_subs = _parse_decomposition(payload)
    names = [name for name, _, _ in raw_assets]
    ids = unique_ids(names)
    assets = [AssetRef(id=aid, name=name, description=desc, height_m=h)
              for aid, (name, desc, h) in zip(ids, raw_assets)]
    # Map subscene name references to instance ids; repeats consume
    # instances in order.
    pools: dict[str, list[str]] = {}
    for aid, name in zip(ids, names):
        pools.setdefault(name, []).append(aid)
    cursors = {name: 0 for name in pools}
    subscenes = []
    for title, member_names, desc in raw_subs:
        member_ids = []
        for name in member_names:
            if name in pools:
                i = cursors[name]
                if i >= len(pools[name]):
                    raise OracleProtocolError(
                        f"subscene reuses '{name}' beyond its "
                        f"{len(pools[name])} instances")
                member_ids.append(pools[name][i])
                cursors[name] = i + 1
            elif name in ids:
                member_ids.append(name)  # already an instance id
            else:
                raise OracleProtocolError(
                    f"subscene references unknown asset '{name}'")
        subscenes.append(SubScene(title=title,
                                  asset_list=tuple(member_ids),
                                  description=desc))
    doc = SceneDocument(query=query, subscenes=tuple(subscenes),
                        assets=tuple(assets), relations=(),
                        layouts=_initial_layouts(assets, catalog))
    problems = validate(doc)
    if problems:
        raise OracleProtocolError(
            f"decomposition invalid: {problems[0].message}")

    qlib = library.copy()
    updates: list[Skill] = []
    notes: list[str] = []
    all_ids = set(ids)
    for sub in doc.subscenes:
        planned = _parse_plan(oracle.ask(OracleRequest(
            "planner", _plan_prompt(query, sub, sub.asset_list))))
        args_by_id, skill_sources = _parse_code(oracle.ask(OracleRequest(
            "coder", _code_prompt(query, sub, planned))))
        for name, source in skill_sources:
            try:
                updates.append(_install_source(
                    qlib, name, source, provenance=f"coder for '{query}'"))
            except FeedbackRejected as exc:
                raise OracleProtocolError(f"bad coder skill: {exc}")
        nodes = []
        for p in planned:
            try:
                kind = RelationKind(p["kind"])
            except ValueError:
                raise OracleProtocolError(
                    f"unknown relation kind '{p['kind']}'")
            extra = args_by_id.get(p["id"], {})
            skill_name = extra.pop("skill", None) if isinstance(
                extra, dict) else None
            nodes.append(RelationNode(
                id=p["id"], kind=kind, members=tuple(p["members"]),
                args=dict(extra),
                skill=str(skill_name) if skill_name else kind.value))
        candidate = replace(doc, relations=doc.relations + tuple(nodes))
        problems = validate(candidate)
        if problems:
            raise OracleProtocolError(
                f"planned graph invalid: {problems[0].message}")
        doc = candidate
        frozen = tuple(sorted(all_ids - set(sub.asset_list)))
        inner = run_inner(query, doc, cfg, qlib, oracle, frozen=frozen)
        doc = inner.document
        qlib = inner.library
        updates.extend(inner.updates)
        notes.extend(f"{query!r}: {e}" for e in inner.errors)
    return ensure_camera(doc), updates, notes


def _learner_chooser(oracle):
    def chooser(candidates):
        numbered = "\n\n".join(
            f"[{i}]\n{c.canonical_source()}"
            for i, c in enumerate(candidates))
        try:
            payload = oracle.ask(OracleRequest(
                "library_learner",
                f"{load_prompt('prompt_learn')}\n{numbered}\n"))
        except OracleProtocolError:
            return None
        if isinstance(payload, dict) and isinstance(
                payload.get("choice"), int):
            return payload["choice"]
        return None
    return chooser


def run_outer(queries: list[str], cfg: RunConfig, lib: SkillLibrary,
              oracle, catalog=None) -> OuterResult:
    """Process a batch of queries and consensus-merge skill updates.

    Failures are isolated per query: a query whose oracle output cannot
    be used becomes an error record, and the rest of the batch still
    merges.
    """
    library = lib
    errors: list[str] = []
    documents: tuple[SceneDocument, ...] = ()
    for _ in range(cfg.n_outer):
        round_docs = []
        candidates: dict[str, list[Skill]] = {}
        for query in queries:
            try:
                doc, updates, notes = _run_query(query, cfg, library,
                                                 oracle, catalog)
            except OracleProtocolError as exc:
                errors.append(f"query {query!r}: {exc}")
                continue
            errors.extend(notes)
            round_docs.append(doc)
            for skill in updates:
                candidates.setdefault(skill.name, []).append(skill)
        merged = library.copy()
        chooser = _learner_chooser(oracle) if cfg.use_library_learner \
            else None
        for name in sorted(candidates):
            try:
                merged.merge_candidates(name, candidates[name],
                                        chooser=chooser)
            except IncompatibleParams as exc:
                errors.append(f"merge '{name}': {exc}")
        library = merged
        documents = tuple(round_docs)
    return OuterResult(library=library, documents=documents,
                       errors=tuple(errors))
