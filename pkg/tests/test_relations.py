"""Scorer unit tests.

Expected values for the concrete-input cases were computed with an
independent reimplementation of each formula (plain math/statistics)
before these assertions were written, then frozen here.
"""
import math

import pytest
from hypothesis import given, settings, strategies as st

from layoutsmith.geometry import Vec3, aabb_vertices
from layoutsmith.relations import (
    ArityError, Axis, MissingArg, NonPositiveFactor, NonPositiveStep,
    RelationKind, ZeroRepetitions, alignment_score, check_arity,
    direction_score, evaluate_hierarchy, overlap_detected, overlap_score,
    parallelism_score, perpendicularity_score, proximity_score,
    repeat_object, repetition_score, rotation_uniformity_score,
    scale_group, scaling_score, symmetry_score, validate_args,
)

from conftest import make_layout, layouts


# ---- breakpoint and edge-case behavior ----

def test_proximity_breakpoints():
    a, b = make_layout(0, 0, 0), make_layout(3, 0, 0)
    assert proximity_score(a, b, min_distance=3.0, max_distance=5.0) == 1.0
    assert proximity_score(a, b, min_distance=4.0, max_distance=6.0) == 1.0
    far = make_layout(6, 0, 0)
    assert proximity_score(a, far, min_distance=1.0,
                           max_distance=6.0) == 0.0
    mid = make_layout(3.5, 0, 0)
    assert proximity_score(a, mid, min_distance=1.0,
                           max_distance=6.0) == 0.5


def test_parallelism_single_asset_is_one():
    assert parallelism_score([make_layout(1, 2, 0, yaw=0.4)]) == 1.0


def test_alignment_empty_is_zero():
    assert alignment_score([], Axis.X) == 0.0


def test_symmetry_saturates_at_max_deviation():
    # one member 20+ away from the other mirrors to a residual >= 10
    group = [make_layout(-11.0, 0, 0), make_layout(0.0, 0, 0),
             make_layout(30.0, 0, 0)]
    assert symmetry_score(group, Axis.X) == 0.0


def test_overlap_threshold_inclusive():
    a = make_layout(0.5, 0.5, 0.5, ex=1, ey=1, h=1)    # [0,1]^3
    b = make_layout(2.5, 2.5, 2.5, ex=1, ey=1, h=1)    # [2,3]^3
    corner_gap = math.sqrt(3.0)
    va, vb = aabb_vertices(a.bbox), aabb_vertices(b.bbox)
    assert overlap_detected(va, vb, threshold=corner_gap) is True
    assert overlap_detected(va, vb, threshold=corner_gap - 1e-9) is False
    assert overlap_score(a, b, threshold=corner_gap) == 1.0
    assert overlap_score(a, b, threshold=corner_gap,
                         require_overlap=False) == 0.0


# ---- frozen concrete values ----

def test_proximity_linear_ramp_value():
    a, b = make_layout(0, 0, 0), make_layout(3, 4, 0)
    got = proximity_score(a, b, min_distance=1.0, max_distance=6.0)
    assert got == pytest.approx(0.19999999999999996, abs=1e-12)


def test_direction_value():
    a = make_layout(0, 0, 0, yaw=0.7)
    b = make_layout(2, 1, 0)
    assert direction_score(a, b) == pytest.approx(0.9860992786626659,
                                                  abs=1e-12)


def test_direction_perfect_and_opposite():
    a = make_layout(0, 0, 0, yaw=0.0)
    ahead = make_layout(5, 0, 0)
    behind = make_layout(-5, 0, 0)
    assert direction_score(a, ahead) == 1.0
    assert direction_score(a, behind) == 0.0


def test_alignment_value():
    group = [make_layout(0.0, 0, 0), make_layout(0.4, 0, 0),
             make_layout(1.0, 0, 0)]
    assert alignment_score(group, Axis.X) == pytest.approx(
        0.8555133079847909, abs=1e-12)


def test_symmetry_value():
    group = [make_layout(-2, 0, 0), make_layout(-1, 0, 0),
             make_layout(3, 0, 0)]
    assert symmetry_score(group, Axis.X) == pytest.approx(
        0.8666666666666667, abs=1e-12)


def test_symmetry_of_two_members_is_always_one():
    # with two members the median mirror maps each onto the other,
    # exactly so for dyadic coordinates
    group = [make_layout(-7.5, 0, 0), make_layout(2.25, 0, 0)]
    assert symmetry_score(group, Axis.X) == 1.0
    messy = [make_layout(-7.3, 0, 0), make_layout(2.1, 0, 0)]
    assert symmetry_score(messy, Axis.X) == pytest.approx(1.0, abs=1e-12)


def test_parallelism_value():
    group = [make_layout(0, 0, 0, yaw=0.5), make_layout(1, 0, 0, yaw=0.5),
             make_layout(2, 1, 0, yaw=0.5)]
    assert parallelism_score(group) == pytest.approx(0.9267766952966369,
                                                     abs=1e-12)


def test_perpendicularity_value():
    a = make_layout(0, 0, 0, yaw=0.3)
    b = make_layout(1, 1, 0, yaw=1.1)
    assert perpendicularity_score(a, b) == pytest.approx(
        0.3032932906528346, abs=1e-12)
    c = make_layout(1, 1, 0, yaw=0.3 + math.pi / 2)
    assert perpendicularity_score(a, c) == pytest.approx(1.0, abs=1e-12)


def test_rotation_value():
    center = Vec3(0, 0, 0)
    group = [make_layout(math.cos(t), math.sin(t), 0)
             for t in (0.0, 2.0, 4.5)]
    assert rotation_uniformity_score(group, center) == pytest.approx(
        0.9173533985800525, abs=1e-12)


def test_rotation_perfect_quarters():
    center = Vec3(0, 0, 0)
    group = [make_layout(1, 0, 0), make_layout(0, 1, 0),
             make_layout(-1, 0, 0), make_layout(0, -1, 0)]
    assert rotation_uniformity_score(group, center) == pytest.approx(
        1.0, abs=1e-12)


def test_repetition_value():
    group = [make_layout(0, 0, 0), make_layout(1.5, 0, 0),
             make_layout(2.5, 0, 0)]
    assert repetition_score(group) == pytest.approx(0.9705882352941176,
                                                    abs=1e-12)


def test_repetition_even_spacing_is_one():
    group = [make_layout(float(i), 0, 0) for i in range(4)]
    assert repetition_score(group) == 1.0


def test_scaling_orderings():
    # members are ordered by their depth coordinate, not list position
    def row(y_big, y_mid, y_small):
        return [make_layout(0, y_big, 0, ex=3, ey=3, h=3),
                make_layout(0, y_mid, 0, ex=2, ey=2, h=2),
                make_layout(0, y_small, 0, ex=1, ey=1, h=1)]

    assert scaling_score(row(0.0, 1.0, 2.0), Axis.Y) == 1.0
    assert scaling_score(row(2.0, 1.0, 0.0), Axis.Y) == 0.0
    assert scaling_score(row(1.0, 0.0, 2.0), Axis.Y) == 0.5


def test_hierarchy_orderings():
    # ids pair with members positionally; the score is the fraction of
    # positions where the member list is already volume-descending
    small = make_layout(1, 0, 0, ex=1, ey=1, h=1)   # volume 1
    mid = make_layout(0, 0, 0, ex=2, ey=2, h=2)     # volume 8
    big = make_layout(2, 0, 0, ex=3, ey=3, h=3)     # volume 27
    names = ["first", "second", "third"]
    assert evaluate_hierarchy([big, mid, small], names) == 1.0
    assert evaluate_hierarchy([mid, small, big], names) == 0.0
    assert evaluate_hierarchy([small, mid, big], names) == pytest.approx(
        0.3333333333333333, abs=1e-12)
    with pytest.raises(ArityError):
        evaluate_hierarchy([small, mid], names)
    with pytest.raises(ValueError):
        evaluate_hierarchy([small, mid], ["a", "a"])


# ---- generators ----

def test_repeat_object():
    base = make_layout(0, 0, 0.5)
    copies = repeat_object(base, 3, Vec3(2, 0, 0))
    assert [c.location.x for c in copies] == [0.0, 2.0, 4.0]
    with pytest.raises(ZeroRepetitions):
        repeat_object(base, 0, Vec3(1, 0, 0))


def test_scale_group():
    out = scale_group([make_layout(1, 0, 1, ex=2, ey=2, h=2)], 2.0)
    assert out[0].location == Vec3(2, 0, 2)
    assert out[0].bbox.extents() == Vec3(4, 4, 4)
    with pytest.raises(NonPositiveFactor):
        scale_group([], 0.0)


def test_put_ontop_converges_and_caps():
    from layoutsmith.relations import ConvergenceError, put_ontop
    mover = make_layout(0, 0, 5.0)
    base = make_layout(0, 0, 0.5)
    dropped = put_ontop([mover], [base])
    assert dropped[0].location.z < 5.0
    with pytest.raises(NonPositiveStep):
        put_ontop([mover], [base], step=0.0)
    # footprints that never meet vertically hit the iteration cap
    apart = make_layout(50, 0, 5.0)
    with pytest.raises(ConvergenceError):
        put_ontop([apart], [base], max_iterations=5)


# ---- arg validation ----

def test_validate_args():
    assert validate_args(RelationKind.PROXIMITY, {}) == []
    assert validate_args(RelationKind.ALIGNMENT, {}) != []
    assert validate_args(RelationKind.ALIGNMENT, {"axis": "x"}) == []
    problems = validate_args(RelationKind.PROXIMITY, {"nope": 1})
    assert "unknown arg" in problems[0]


def test_check_arity():
    check_arity(RelationKind.PROXIMITY, 2)
    with pytest.raises(ArityError):
        check_arity(RelationKind.PROXIMITY, 3)
    with pytest.raises(ArityError):
        check_arity(RelationKind.SYMMETRY, 0)


def test_missing_required_arg_raises_through_dispatch():
    from layoutsmith.relations import NATIVE_SCORERS
    with pytest.raises(MissingArg):
        NATIVE_SCORERS[RelationKind.ROTATION](
            [make_layout(1, 0, 0)], {})


# ---- range property (the acceptance version runs 10^4; this is a
# fast regression guard) ----

@settings(max_examples=200, deadline=None)
@given(st.lists(layouts(), min_size=2, max_size=5), st.data())
def test_scorers_stay_in_unit_interval(group, data):
    checks = [
        proximity_score(group[0], group[1]),
        direction_score(group[0], group[1]),
        alignment_score(group, Axis.Y),
        symmetry_score(group, Axis.X),
        overlap_score(group[0], group[1],
                      threshold=data.draw(st.floats(0.001, 5.0))),
        parallelism_score(group),
        perpendicularity_score(group[0], group[1]),
        evaluate_hierarchy(group, list(range(len(group)))),
        rotation_uniformity_score(group, Vec3(0, 0, 0)),
        repetition_score(group),
        scaling_score(group, Axis.Y),
    ]
    for value in checks:
        assert 0.0 <= value <= 1.0
