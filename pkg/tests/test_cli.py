"""CLI contract: exit codes, artifacts on disk, deterministic reruns."""
import json
from pathlib import Path

import pytest

from layoutsmith.cli import EXIT_OK, EXIT_ORACLE, EXIT_VALIDATION, main
from layoutsmith.skills.library import builtin_source

FIXTURES = Path(__file__).resolve().parent / "fixtures"
GOLDENS = Path(__file__).resolve().parent / "goldens"
TRANSCRIPT = str(FIXTURES / "desk_lamp_transcript.json")


def test_no_command_is_a_usage_error():
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == 2


# ---- run ----

def test_run_missing_transcript(tmp_path, capsys):
    code = main(["run", "a desk", "--mock", str(tmp_path / "nope.json")])
    assert code == EXIT_ORACLE
    assert "not found" in capsys.readouterr().err


def test_run_needs_an_oracle(capsys):
    assert main(["run", "a desk"]) == EXIT_ORACLE
    assert "--mock" in capsys.readouterr().err


def test_run_empty_query_file(tmp_path, capsys):
    q = tmp_path / "query.txt"
    q.write_text("   \n", encoding="utf-8")
    assert main(["run", str(q)]) == EXIT_VALIDATION
    assert "empty query" in capsys.readouterr().err


def test_run_rejects_missing_or_broken_scene_files(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.scene.json")]) == \
        EXIT_VALIDATION
    bad = tmp_path / "bad.scene.json"
    bad.write_text("{oops", encoding="utf-8")
    assert main(["run", str(bad)]) == EXIT_VALIDATION
    err = capsys.readouterr().err
    assert "no such file" in err
    assert "JSON" in err


def test_run_rejects_invalid_documents(tmp_path, capsys):
    scene = tmp_path / "dup.scene.json"
    scene.write_text(json.dumps({
        "query": "q",
        "assets": [{"id": "a"}, {"id": "a"}],
        "layouts": {"a": {
            "location": [0, 0, 0.5],
            "bbox": {"min": [-0.5, -0.5, 0], "max": [0.5, 0.5, 1]},
            "orientation": [0, 0, 0]}},
    }), encoding="utf-8")
    assert main(["run", str(scene)]) == EXIT_VALIDATION
    assert "duplicate" in capsys.readouterr().err.lower()


def run_scene_into(out_dir, capsys):
    code = main(["run", str(GOLDENS / "reading_corner.scene.json"),
                 "--out", str(out_dir), "--solver", "hill",
                 "--iterations", "15", "--seed", "7"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "objective:" in out
    return (out_dir / "reading_corner.scene.json").read_bytes()


def test_run_resolves_a_scene_file_deterministically(tmp_path, capsys):
    first = run_scene_into(tmp_path / "one", capsys)
    second = run_scene_into(tmp_path / "two", capsys)
    assert first == second
    svg = (tmp_path / "one" / "reading_corner.preview.svg").read_text(
        encoding="utf-8")
    assert svg.startswith("<svg ")


def run_query_into(out_dir, capsys):
    code = main(["run", "a desk with a reading lamp",
                 "--mock", TRANSCRIPT, "--out", str(out_dir),
                 "--solver", "hill", "--iterations", "40", "--seed", "3"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert str(out_dir / "scene_1.scene.json") in out
    return (out_dir / "scene_1.scene.json").read_bytes()


def test_run_query_writes_artifacts_and_repeats_byte_for_byte(
        tmp_path, capsys):
    first = run_query_into(tmp_path / "one", capsys)
    second = run_query_into(tmp_path / "two", capsys)
    assert first == second
    assert (tmp_path / "one" / "scene_1.blender.py").exists()
    assert (tmp_path / "one" / "skills" / "manifest.json").exists()


def test_run_query_from_a_text_file(tmp_path, capsys):
    q = tmp_path / "query.txt"
    q.write_text("a desk with a reading lamp\n", encoding="utf-8")
    code = main(["run", str(q), "--mock", TRANSCRIPT,
                 "--out", str(tmp_path / "out"),
                 "--solver", "hill", "--iterations", "10"])
    assert code == EXIT_OK
    capsys.readouterr()


# ---- eval ----

def test_eval_bundled_suite_scores_clean(tmp_path, capsys):
    code = main(["eval", "--out", str(tmp_path)])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "constraint score: 100.0" in out
    report = json.loads((tmp_path / "eval_report.json").read_text(
        encoding="utf-8"))
    assert report["mean"] == 1.0
    assert report["constraint_score"] == 100.0
    assert report["errors"] == []
    assert len(report["cases"]) == 10
    assert report["clip_sim"] is None


def test_eval_empty_suite(tmp_path, capsys):
    assert main(["eval", "--suite", str(tmp_path),
                 "--out", str(tmp_path / "out")]) == EXIT_VALIDATION
    assert "empty suite" in capsys.readouterr().err


def test_eval_unreadable_suite(tmp_path, capsys):
    (tmp_path / "case.json").write_text("{", encoding="utf-8")
    assert main(["eval", "--suite", str(tmp_path),
                 "--out", str(tmp_path / "out")]) == EXIT_VALIDATION
    assert "cannot load suite" in capsys.readouterr().err


def test_eval_case_without_oracle_fails_validation(tmp_path, capsys):
    (tmp_path / "case.json").write_text(json.dumps({
        "id": "case_x",
        "assets": [{"id": "a", "layout": {
            "location": [0, 0, 0.5],
            "bbox": {"min": [-0.5, -0.5, 0], "max": [0.5, 0.5, 1]},
            "orientation": [0, 0, 0]}}],
        "relations": [],
    }), encoding="utf-8")
    assert main(["eval", "--suite", str(tmp_path),
                 "--out", str(tmp_path / "out")]) == EXIT_VALIDATION
    assert "case_x" in capsys.readouterr().err


def test_eval_scenes_mode_reports_missing_files(tmp_path, capsys):
    scenes = tmp_path / "scenes"
    scenes.mkdir()
    code = main(["eval", "--scenes", str(scenes),
                 "--out", str(tmp_path / "out")])
    assert code == EXIT_OK
    capsys.readouterr()
    report = json.loads(
        (tmp_path / "out" / "eval_report.json").read_text(
            encoding="utf-8"))
    assert report["mean"] == 0.0
    assert len(report["errors"]) == 10
    assert all(e.startswith("MissingScene") for e in report["errors"])


# ---- skills ----

def test_skills_list_names_the_builtins(capsys):
    assert main(["skills", "list"]) == EXIT_OK
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert len(lines) == 11
    assert any(line.startswith("proximity v1 (dsl)") for line in lines)
    assert any(line.startswith("overlap v1 (native)") for line in lines)


def test_skills_show(capsys):
    assert main(["skills", "show", "proximity"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("skill proximity(")
    assert main(["skills", "show"]) == EXIT_VALIDATION
    assert main(["skills", "show", "levitation"]) == EXIT_VALIDATION
    capsys.readouterr()


def test_skills_merge_from_candidate_files(tmp_path, capsys):
    cand = tmp_path / "cands"
    cand.mkdir()
    src = builtin_source("proximity")
    (cand / "a.skill").write_text(src, encoding="utf-8")
    (cand / "b.skill").write_text(src, encoding="utf-8")
    code = main(["skills", "merge", "proximity", str(cand),
                 "--out", str(tmp_path / "lib")])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("proximity v2")
    manifest = tmp_path / "lib" / "manifest.json"
    assert manifest.exists()
    # the saved manifest round-trips through the library loader
    assert main(["skills", "list", "--library", str(manifest)]) == EXIT_OK
    assert "proximity v2" in capsys.readouterr().out


def test_skills_merge_input_errors(tmp_path, capsys):
    assert main(["skills", "merge", "proximity"]) == EXIT_VALIDATION
    cand = tmp_path / "cands"
    cand.mkdir()
    (cand / "bad.skill").write_text("skill nope(", encoding="utf-8")
    assert main(["skills", "merge", "proximity", str(cand)]) == \
        EXIT_VALIDATION
    (cand / "bad.skill").write_text(builtin_source("alignment"),
                                    encoding="utf-8")
    assert main(["skills", "merge", "proximity", str(cand)]) == \
        EXIT_VALIDATION
    capsys.readouterr()
