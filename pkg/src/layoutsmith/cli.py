"""Command-line surface: run the workflow, score the bench suite,
inspect the skill library.

Exit codes: 0 success, 2 oracle failure, 3 validation failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

from .assets import load_catalog
from .emit import SchemaError, emit_all, load_scene
from .geometry import Aabb, Vec3
from .oracles import (HttpOracle, MockOracle, OracleUnavailable,
                      UnmatchedOracleCall)
from .relations import RelationKind
from .scenegraph import (AssetRef, RelationNode, SceneDocument, SubScene,
                         validate)
from .skills.evaluate import eval_skill
from .skills.library import (EmptyCandidateSet, Skill, SkillLibrary,
                             default_library)
from .skills.parser import ParseError, parse_skill
from .skills.typecheck import TypeCheckError, check_skill
from .solver import SolverConfig, solve
from .workflow import RunConfig, run_outer

EXIT_OK = 0
EXIT_ORACLE = 2
EXIT_VALIDATION = 3

SOLVER_NAMES = {"hill": "hill_climb", "anneal": "anneal",
                "grid": "grid_oracle"}


def _err(message: str) -> None:
    print(message, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="layoutsmith",
        description="Constraint-driven 3D scene layout from text queries.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="turn a query (or an existing scene "
                                     "file) into layout artifacts")
    run.add_argument("input", help="query text file, literal query, or "
                                   "a .scene.json to re-solve")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--mock", metavar="TRANSCRIPT",
                     help="scripted oracle transcript (JSON)")
    run.add_argument("--oracle-url", metavar="URL",
                     help="HTTP oracle endpoint")
    run.add_argument("--catalog", metavar="PATH")
    run.add_argument("--inner", type=int, default=3, metavar="N")
    run.add_argument("--outer", type=int, default=1, metavar="N")
    run.add_argument("--solver", choices=sorted(SOLVER_NAMES),
                     default="hill")
    run.add_argument("--iterations", type=int, default=100, metavar="N")
    run.add_argument("--step", type=float, default=0.1, metavar="METRES")
    run.add_argument("--restarts", type=int, default=1, metavar="N")
    run.add_argument("--perturb-z", action="store_true")
    run.add_argument("--out", default="out", metavar="DIR")

    ev = sub.add_parser("eval", help="score the bench suite and report "
                                     "the constraint-score mean")
    ev.add_argument("--suite", metavar="DIR",
                    help="directory of case JSONs (default: bundled)")
    ev.add_argument("--scenes", metavar="DIR",
                    help="score pre-solved <case_id>.scene.json files "
                         "instead of solving")
    ev.add_argument("--solver", choices=sorted(SOLVER_NAMES))
    ev.add_argument("--seed", type=int)
    ev.add_argument("--out", default="out", metavar="DIR")

    sk = sub.add_parser("skills", help="inspect or merge the skill "
                                       "library")
    sk.add_argument("action", choices=("list", "show", "merge"))
    sk.add_argument("name", nargs="?",
                    help="skill name (show, merge)")
    sk.add_argument("candidates", nargs="?", metavar="DIR",
                    help="directory of candidate .skill files (merge)")
    sk.add_argument("--library", metavar="MANIFEST",
                    help="load this manifest instead of the built-ins")
    sk.add_argument("--out", metavar="DIR",
                    help="write the updated library manifest here "
                         "(merge)")
    return p


def _make_oracle(args):
    if args.mock:
        return MockOracle.from_file(args.mock)
    if args.oracle_url:
        return HttpOracle(args.oracle_url)
    return None


def _solver_config(args) -> SolverConfig:
    return SolverConfig(max_iterations=args.iterations,
                        adjustment_step=args.step,
                        seed=args.seed,
                        mode=SOLVER_NAMES[args.solver],
                        perturb_z=args.perturb_z,
                        restarts=args.restarts)


def cmd_run(args) -> int:
    out_dir = Path(args.out)
    if args.input.endswith(".json"):
        return _run_scene_file(args, out_dir)
    query_path = Path(args.input)
    query = (query_path.read_text(encoding="utf-8").strip()
             if query_path.exists() else args.input.strip())
    if not query:
        _err("empty query")
        return EXIT_VALIDATION
    try:
        oracle = _make_oracle(args)
    except OracleUnavailable as exc:
        _err(str(exc))
        return EXIT_ORACLE
    if oracle is None:
        _err("a query run needs --mock or --oracle-url")
        return EXIT_ORACLE
    catalog = load_catalog(args.catalog) if args.catalog else None
    cfg = RunConfig(n_inner=args.inner, n_outer=args.outer,
                    solver=_solver_config(args))
    try:
        result = run_outer([query], cfg, default_library(), oracle,
                           catalog)
    except (OracleUnavailable, UnmatchedOracleCall) as exc:
        _err(str(exc))
        return EXIT_ORACLE
    for note in result.errors:
        _err(f"warning: {note}")
    if not result.documents:
        _err("no scene produced")
        return EXIT_ORACLE
    for i, doc in enumerate(result.documents):
        paths = emit_all(doc, out_dir, f"scene_{i + 1}", catalog)
        for path in paths.values():
            print(path)
    print(result.library.save_manifest(out_dir / "skills"))
    return EXIT_OK


def _run_scene_file(args, out_dir: Path) -> int:
    try:
        doc = load_scene(args.input)
    except FileNotFoundError:
        _err(f"no such file: {args.input}")
        return EXIT_VALIDATION
    except SchemaError as exc:
        _err(str(exc))
        return EXIT_VALIDATION
    problems = validate(doc)
    if problems:
        for v in problems:
            _err(f"{v.rule}: {v.subject}: {v.message}")
        return EXIT_VALIDATION
    library = default_library()
    try:
        result = solve(doc, _solver_config(args), library)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_VALIDATION
    doc = doc.with_layouts(result.layouts)
    stem = Path(args.input).name.split(".")[0]
    paths = emit_all(doc, out_dir, stem)
    for path in paths.values():
        print(path)
    print(f"objective: {result.score!r}")
    return EXIT_OK


# ---- eval ----

def _bundled_case_paths() -> list:
    base = resources.files("layoutsmith.bench.cases")
    return sorted((e for e in base.iterdir() if e.name.endswith(".json")),
                  key=lambda e: e.name)


def _load_cases(suite_dir: str | None) -> list[dict]:
    if suite_dir:
        paths = sorted(Path(suite_dir).glob("*.json"))
        texts = [p.read_text(encoding="utf-8") for p in paths]
    else:
        texts = [p.read_text(encoding="utf-8")
                 for p in _bundled_case_paths()]
    return [json.loads(t) for t in texts]


def _case_layout(raw: dict):
    from .emit import _layout_from_json
    return _layout_from_json(raw, "/assets/layout")


def _case_document(case: dict) -> tuple[SceneDocument, tuple[str, ...]]:
    assets = []
    layouts = {}
    frozen = []
    for a in case["assets"]:
        aid = a["id"]
        assets.append(AssetRef(id=aid, name=a.get("name", aid),
                               height_m=float(a.get("height_m", 1.0))))
        layouts[aid] = _case_layout(a["layout"])
        if a.get("frozen"):
            frozen.append(aid)
    relations = tuple(
        RelationNode(id=r["id"], kind=RelationKind(r["kind"]),
                     members=tuple(r["members"]),
                     args=dict(r.get("args", {})),
                     skill=r.get("skill", r["kind"]))
        for r in case.get("relations", ()))
    doc = SceneDocument(
        query=case.get("description", case["id"]),
        subscenes=(SubScene(title=case["id"],
                            asset_list=tuple(a["id"]
                                             for a in case["assets"]),
                            description=case.get("description", "")),),
        assets=tuple(assets), relations=relations, layouts=layouts)
    return doc, tuple(frozen)


def _case_solver(case: dict, args) -> SolverConfig:
    raw = dict(case.get("solver", {}))
    bounds = None
    if "bounds" in raw:
        b = raw["bounds"]
        bounds = Aabb(Vec3(*[float(v) for v in b["min"]]),
                      Vec3(*[float(v) for v in b["max"]]))
    mode = raw.get("mode", "grid_oracle")
    if args.solver:
        mode = SOLVER_NAMES[args.solver]
    return SolverConfig(
        max_iterations=int(raw.get("max_iterations", 300)),
        adjustment_step=float(raw.get("step", 0.25)),
        seed=int(args.seed if args.seed is not None
                 else raw.get("seed", 0)),
        mode=mode,
        perturb_z=bool(raw.get("perturb_z", False)),
        restarts=int(raw.get("restarts", 1)),
        bounds=bounds)


def _score_case(case: dict, args, scenes_dir: str | None,
                errors: list[str]) -> float:
    case_id = case["id"]
    oracle_spec = case["oracle"]
    d = check_skill(parse_skill(oracle_spec["source"]))
    if scenes_dir:
        scene_path = Path(scenes_dir) / f"{case_id}.scene.json"
        if not scene_path.exists():
            errors.append(f"MissingScene: {scene_path}")
            return 0.0
        doc = load_scene(scene_path)
        layouts = doc.layouts
    else:
        doc, frozen = _case_document(case)
        problems = validate(doc)
        if problems:
            raise SchemaError(problems[0].message, f"/cases/{case_id}")
        library = default_library()
        for s in case.get("skills", ()):
            library.replace_body(s["name"], s["source"],
                                 provenance=f"case {case_id}")
        result = solve(doc, _case_solver(case, args), library,
                       frozen=frozen)
        layouts = result.layouts
    members = [layouts[m] for m in oracle_spec["members"]]
    return eval_skill(d, members, dict(oracle_spec.get("args", {})))


def cmd_eval(args) -> int:
    try:
        cases = _load_cases(args.suite)
    except (OSError, json.JSONDecodeError) as exc:
        _err(f"cannot load suite: {exc}")
        return EXIT_VALIDATION
    if not cases:
        _err("empty suite")
        return EXIT_VALIDATION
    errors: list[str] = []
    rows = []
    for case in cases:
        try:
            score = _score_case(case, args, args.scenes, errors)
        except (ParseError, TypeCheckError, SchemaError, KeyError) as exc:
            _err(f"case {case.get('id', '?')}: {exc}")
            return EXIT_VALIDATION
        rows.append((case["id"], score))
    mean = sum(score for _, score in rows) / len(rows)
    report = {
        "cases": [{"id": cid, "score": score} for cid, score in rows],
        "mean": mean,
        "constraint_score": mean * 100.0,
        "clip_sim": None,
        "errors": errors,
    }
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "eval_report.json"
    report_path.write_text(
        json.dumps(report, sort_keys=True, indent=2) + "\n",
        encoding="utf-8")
    width = max(len(cid) for cid, _ in rows)
    for cid, score in rows:
        print(f"{cid:<{width}}  {score:.3f}")
    print(f"{'mean':<{width}}  {mean:.3f}")
    print(f"constraint score: {mean * 100.0:.1f}")
    print("clip sim: unavailable (no embedding model)")
    for note in errors:
        _err(note)
    print(report_path)
    return EXIT_OK


# ---- skills ----

def _load_library(args) -> SkillLibrary:
    if getattr(args, "library", None):
        return SkillLibrary.load_manifest(args.library)
    return default_library()


def cmd_skills(args) -> int:
    library = _load_library(args)
    if args.action == "list":
        for name in library.names():
            skill = library.active(name)
            kind = "dsl" if skill.definition is not None else "native"
            print(f"{name} v{skill.version} ({kind}) {skill.provenance}")
        return EXIT_OK
    if args.action == "show":
        if not args.name:
            _err("show needs a skill name")
            return EXIT_VALIDATION
        try:
            print(library.active(args.name).canonical_source(), end="")
        except KeyError as exc:
            _err(str(exc))
            return EXIT_VALIDATION
        return EXIT_OK
    # merge
    if not args.name or not args.candidates:
        _err("merge needs a skill name and a candidate directory")
        return EXIT_VALIDATION
    paths = sorted(Path(args.candidates).glob("*.skill"))
    candidates = []
    for i, path in enumerate(paths):
        try:
            d = check_skill(parse_skill(path.read_text(encoding="utf-8")))
        except (ParseError, TypeCheckError) as exc:
            _err(f"{path}: {exc}")
            return EXIT_VALIDATION
        if d.name != args.name:
            _err(f"{path}: defines '{d.name}', expected '{args.name}'")
            return EXIT_VALIDATION
        candidates.append(Skill(args.name, version=i + 1, definition=d,
                                provenance=str(path)))
    try:
        merged = library.merge_candidates(args.name, candidates)
    except (EmptyCandidateSet, ValueError) as exc:
        _err(str(exc))
        return EXIT_VALIDATION
    print(f"{merged.name} v{merged.version}")
    print(merged.canonical_source(), end="")
    if args.out:
        print(library.save_manifest(args.out))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": cmd_run, "eval": cmd_eval, "skills": cmd_skills}
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
