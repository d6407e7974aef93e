import pytest

from layoutsmith.relations import RelationKind
from layoutsmith.scenegraph import (
    AddRelation, AssetRef, CameraSpec, InvalidEdit, MissingLayout,
    RelationNode, RemoveRelation, ReplaceSkillBody, ReviewFeedback,
    SceneDocument, SetArg, SubScene, apply_feedback, objective,
    total_objective, validate,
)
from layoutsmith.geometry import Vec3
from layoutsmith.skills.library import default_library

from conftest import make_layout, simple_doc, _rel


@pytest.fixture()
def doc():
    return simple_doc(
        {"desk": make_layout(0, 0, 0.35, ex=1.2, ey=0.8, h=0.7),
         "lamp": make_layout(0.3, 0.1, 0.9, ex=0.3, ey=0.3, h=0.4)},
        [_rel("r1", "proximity", ["lamp", "desk"],
              min_distance=0.2, max_distance=6.0)])


def test_relation_node_defaults_skill_to_kind():
    r = RelationNode(id="x", kind=RelationKind.ALIGNMENT,
                     members=("a",), args={"axis": "x"})
    assert r.skill == "alignment"
    r2 = RelationNode(id="y", kind=RelationKind.ALIGNMENT,
                      members=("a",), args={"axis": "x"}, skill="custom")
    assert r2.skill == "custom"


def test_camera_rejects_degenerate_aim():
    with pytest.raises(ValueError):
        CameraSpec(location=Vec3(1, 1, 1), target=Vec3(1, 1, 1))


def test_feedback_rejects_unknown_verdict():
    with pytest.raises(ValueError):
        ReviewFeedback(verdict="maybe")


# ---- validate ----

def test_validate_clean(doc):
    assert validate(doc) == []


def test_validate_catches_duplicate_asset_ids(doc):
    bad = SceneDocument(
        query="q", assets=doc.assets + (AssetRef(id="desk", name="desk"),),
        relations=doc.relations, layouts=doc.layouts,
        subscenes=doc.subscenes)
    rules = [v.rule for v in validate(bad)]
    assert "DuplicateId" in rules


def test_validate_catches_dangling_member(doc):
    bad = SceneDocument(
        query="q", assets=doc.assets,
        relations=doc.relations + (
            _rel("r9", "proximity", ["lamp", "ghost"]),),
        layouts=doc.layouts, subscenes=doc.subscenes)
    violations = validate(bad)
    assert any(v.rule == "DanglingEdge" and "ghost" in v.message
               for v in violations)


def test_validate_catches_arity_and_args(doc):
    bad = SceneDocument(
        query="q", assets=doc.assets,
        relations=(
            _rel("r1", "proximity", ["lamp"]),
            RelationNode(id="r2", kind=RelationKind.ALIGNMENT,
                         members=("lamp", "desk"), args={}),
            RelationNode(id="r3", kind=RelationKind.PROXIMITY,
                         members=("lamp", "desk"),
                         args={"mystery": 1}),
        ),
        layouts=doc.layouts, subscenes=doc.subscenes)
    rules = {v.rule for v in validate(bad)}
    assert {"ArityViolation", "BadArgs"} <= rules


def test_validate_catches_bad_height_and_empty_subscene():
    bad = SceneDocument(
        query="q",
        assets=(AssetRef(id="a", name="a", height_m=-1.0),),
        subscenes=(SubScene(title="empty", asset_list=()),))
    rules = {v.rule for v in validate(bad)}
    assert {"NonPositiveHeight", "EmptySubScene"} <= rules


# ---- feedback application ----

def test_apply_feedback_add_and_remove(doc):
    fb = ReviewFeedback(verdict="revise", edits=(
        AddRelation(_rel("r2", "alignment", ["lamp", "desk"], axis="x")),
        RemoveRelation("r1"),
    ))
    out = apply_feedback(doc, fb)
    assert [r.id for r in out.relations] == ["r2"]
    assert out.history == (fb,)
    # original untouched
    assert [r.id for r in doc.relations] == ["r1"]
    assert doc.history == ()


def test_apply_feedback_set_arg(doc):
    fb = ReviewFeedback(verdict="revise", edits=(
        SetArg("r1", "max_distance", 2.0),))
    out = apply_feedback(doc, fb)
    assert out.relations[0].args["max_distance"] == 2.0
    assert doc.relations[0].args["max_distance"] == 6.0


def test_apply_feedback_is_atomic(doc):
    fb = ReviewFeedback(verdict="revise", edits=(
        AddRelation(_rel("r2", "alignment", ["lamp", "desk"], axis="x")),
        RemoveRelation("no-such-relation"),
    ))
    with pytest.raises(InvalidEdit) as exc:
        apply_feedback(doc, fb)
    assert exc.value.index == 1
    assert [r.id for r in doc.relations] == ["r1"]


def test_apply_feedback_rejects_duplicate_relation_id(doc):
    fb = ReviewFeedback(verdict="revise", edits=(
        AddRelation(_rel("r1", "alignment", ["lamp"], axis="x")),))
    with pytest.raises(InvalidEdit):
        apply_feedback(doc, fb)


def test_apply_feedback_rejects_bad_set_arg(doc):
    fb = ReviewFeedback(verdict="revise", edits=(
        SetArg("r1", "mystery", 3),))
    with pytest.raises(InvalidEdit):
        apply_feedback(doc, fb)


def test_replace_skill_body_validated_but_not_installed(doc):
    good = ("skill proximity(a: layout, b: layout, min_distance: real"
            " = 1.0, max_distance: real = 5.0) -> score\n  0.5\n")
    fb = ReviewFeedback(verdict="revise",
                        edits=(ReplaceSkillBody("proximity", good),))
    out = apply_feedback(doc, fb)
    assert out.relations == doc.relations
    assert out.history[-1] is fb

    bad = ReviewFeedback(verdict="revise", edits=(
        ReplaceSkillBody("proximity", "skill nope("),))
    with pytest.raises(InvalidEdit):
        apply_feedback(doc, bad)

    mismatch = ReviewFeedback(verdict="revise", edits=(
        ReplaceSkillBody("alignment", good),))
    with pytest.raises(InvalidEdit):
        apply_feedback(doc, mismatch)


# ---- objective ----

def test_objective_sums_relation_scores(doc):
    lib = default_library()
    lamp, desk = doc.layouts["lamp"], doc.layouts["desk"]
    total = total_objective(doc, lib)
    assert total == lib.evaluate("proximity", [lamp, desk],
                                 doc.relations[0].args)
    assert 0.0 <= total <= len(doc.relations)


def test_objective_missing_layout_raises(doc):
    lib = default_library()
    with pytest.raises(MissingLayout):
        objective(doc.relations, {"desk": doc.layouts["desk"]}, lib)


def test_objective_zero_for_no_relations(doc):
    lib = default_library()
    assert objective((), doc.layouts, lib) == 0.0
