"""Serialization and emitter behavior, pinned against the golden scene."""
import json
from pathlib import Path

import pytest

from layoutsmith.emit import (
    MissingCamera, SchemaError, doc_from_json, doc_to_json, dumps_scene,
    emit_all, emit_blender_script, emit_preview, ensure_camera, load_scene,
    loads_scene, save_scene,
)
from layoutsmith.geometry import Vec3
from layoutsmith.relations import RelationKind
from layoutsmith.scenegraph import (
    AddRelation, MissingLayout, RelationNode, RemoveRelation,
    ReplaceSkillBody, ReviewFeedback, SetArg,
)

from conftest import _rel, make_layout, simple_doc
from make_goldens import CATALOG, golden_document

GOLDENS = Path(__file__).resolve().parent / "goldens"


def test_golden_scene_file_parses_back_to_the_source_document():
    assert load_scene(GOLDENS / "reading_corner.scene.json") == \
        golden_document()


def test_dumps_is_stable_and_newline_terminated():
    doc = golden_document()
    text = dumps_scene(doc)
    assert text == dumps_scene(doc)
    assert text.endswith("}\n")
    # canonical form: keys sorted so diffs stay readable
    data = json.loads(text)
    assert list(data) == sorted(data)


def test_round_trip_without_camera_omits_the_key():
    doc = simple_doc({"a": make_layout()}, [])
    text = dumps_scene(doc)
    assert '"camera"' not in text
    back = loads_scene(text)
    assert back.camera is None
    assert back == doc


def test_round_trip_preserves_every_edit_op():
    doc = simple_doc({"a": make_layout(), "b": make_layout(x=2.0)}, [
        _rel("r1", RelationKind.PROXIMITY, ("a", "b"),
             min_distance=0.5, max_distance=2.0),
    ])
    history = (ReviewFeedback(verdict="revise", edits=(
        AddRelation(RelationNode(
            id="r2", kind=RelationKind.ALIGNMENT, members=("a", "b"),
            args={"axis": "y"})),
        RemoveRelation("r1"),
        SetArg("r1", "max_distance", 3.5),
        ReplaceSkillBody("proximity", "skill proximity(a: layout, "
                         "b: layout) -> score\n  1.0"),
    )), ReviewFeedback(verdict="accept"))
    doc = type(doc)(**{**doc.__dict__, "history": history})
    assert loads_scene(dumps_scene(doc)) == doc


def test_save_and_load_scene(tmp_path):
    doc = golden_document()
    path = save_scene(doc, tmp_path / "scene.json")
    assert load_scene(path) == doc


def pointer_of(callable):
    with pytest.raises(SchemaError) as err:
        callable()
    return err.value.pointer


def test_schema_error_pointers():
    assert pointer_of(lambda: loads_scene("{not json")) == "/"
    assert pointer_of(lambda: doc_from_json([])) == "/"
    assert pointer_of(lambda: doc_from_json(
        {"assets": [{"name": "a"}]})) == "/assets/0"
    assert pointer_of(lambda: doc_from_json(
        {"assets": [{"id": "a", "height_m": "tall"}]})) == \
        "/assets/0/height_m"
    assert pointer_of(lambda: doc_from_json(
        {"relations": [{"id": "r", "kind": "hugs", "members": []}]})) == \
        "/relations/0/kind"
    assert pointer_of(lambda: doc_from_json(
        {"layouts": {"a": {"location": [0, 0, 0],
                           "orientation": [0, 0, 0]}}})) == "/layouts/a"
    assert pointer_of(lambda: doc_from_json(
        {"layouts": {"a": {"location": [0, 0], "bbox": {
            "min": [0, 0, 0], "max": [1, 1, 1]},
            "orientation": [0, 0, 0]}}})) == "/layouts/a/location"
    assert pointer_of(lambda: doc_from_json(
        {"history": [{"verdict": "maybe"}]})) == "/history/0/verdict"
    assert pointer_of(lambda: doc_from_json(
        {"history": [{"verdict": "revise",
                      "edits": [{"op": "tweak"}]}]})) == \
        "/history/0/edits/0/op"
    assert pointer_of(lambda: doc_from_json(
        {"camera": {"location": [0, 0, 0]}})) == "/camera"


def test_inverted_bbox_reports_its_layout_pointer():
    # Aabb validation surfaces as a schema error, not a bare ValueError
    assert pointer_of(lambda: doc_from_json(
        {"layouts": {"a": {"location": [0, 0, 0],
                           "bbox": {"min": [1, 1, 1], "max": [0, 0, 0]},
                           "orientation": [0, 0, 0]}}})) == "/layouts/a"


def test_degenerate_camera_is_a_schema_error():
    assert pointer_of(lambda: doc_from_json(
        {"camera": {"location": [1, 1, 1], "target": [1, 1, 1]}})) == \
        "/camera"


def test_blender_script_requires_camera():
    doc = simple_doc({"a": make_layout()}, [])
    with pytest.raises(MissingCamera):
        emit_blender_script(doc)


def test_blender_script_embeds_objects_in_id_order():
    doc = ensure_camera(simple_doc(
        {"b": make_layout(x=1.0), "a": make_layout()}, []))
    text = emit_blender_script(doc)
    objects = json.loads(text.split("OBJECTS = json.loads('''")[1]
                         .split("''')")[0])
    assert [o["name"] for o in objects] == ["a", "b"]
    assert "file" not in objects[0]


def test_blender_script_attaches_catalog_files_by_asset_name():
    doc = golden_document()
    text = emit_blender_script(doc, catalog=CATALOG)
    objects = json.loads(text.split("OBJECTS = json.loads('''")[1]
                         .split("''')")[0])
    by_name = {o["name"]: o for o in objects}
    assert by_name["plant"]["file"] == "assets/plant.glb"
    assert "file" not in by_name["armchair"]


def test_ensure_camera_is_identity_when_present():
    doc = golden_document()
    assert ensure_camera(doc) is doc


def test_ensure_camera_frames_the_scene():
    doc = simple_doc({"a": make_layout(), "b": make_layout(x=4.0)}, [])
    framed = ensure_camera(doc)
    assert framed.camera is not None
    assert framed.camera.target == Vec3(2.0, 0.0, 0.5)
    # deterministic: same input gives the same camera
    assert ensure_camera(doc) == framed


def test_ensure_camera_rejects_empty_scene():
    doc = simple_doc({}, [])
    with pytest.raises(MissingLayout):
        ensure_camera(doc)


def test_preview_draws_each_asset_once():
    doc = simple_doc({"a": make_layout(), "b": make_layout(x=3.0)}, [])
    svg = emit_preview(doc)
    assert svg.startswith("<svg ")
    assert svg.endswith("</svg>\n")
    # one background rect plus one footprint per asset
    assert svg.count("<rect") == 3
    assert ">a</text>" in svg and ">b</text>" in svg
    assert svg == emit_preview(doc)


def test_preview_requires_layouts():
    with pytest.raises(MissingLayout):
        emit_preview(simple_doc({}, []))


def test_emit_all_writes_three_files(tmp_path):
    paths = emit_all(golden_document(), tmp_path, "corner", catalog=CATALOG)
    assert sorted(paths) == ["preview", "scene", "script"]
    for key, path in paths.items():
        assert path.exists(), key
    assert paths["scene"].name == "corner.scene.json"
    # a camera-less document gets one attached before writing
    bare = simple_doc({"a": make_layout()}, [])
    out = emit_all(bare, tmp_path, "bare")
    assert '"camera"' in out["scene"].read_text(encoding="utf-8")


def test_doc_to_json_sorts_assets_and_layouts():
    doc = simple_doc({"b": make_layout(x=1.0), "a": make_layout()}, [])
    data = doc_to_json(doc)
    assert [a["id"] for a in data["assets"]] == ["a", "b"]
    assert list(data["layouts"]) == ["a", "b"]
