"""Scoring functions for inter-object relations.

Each scorer maps layouts (plus scalar arguments) to a score in [0, 1];
higher is better. Generators (repeat_object, put_ontop, scale_group)
produce or adjust layouts instead of scoring them. The dispatch table at
the bottom adapts every kind to a uniform (layouts, args) call used by
the skill library and the graph objective.
"""
from __future__ import annotations

import enum
import math
from typing import Mapping, Sequence

from .geometry import (
    Aabb, Euler, Layout, Vec3,
    aabb_vertices, angle_from_center, clamp, dist, dot, forward_vector,
    mean, median, norm, normalize, pvariance, scale, shortest_vertex_distance,
    sub, translate, volume,
)

TWO_PI = 2.0 * math.pi


class RelationKind(enum.Enum):
    """The relation vocabulary understood by planners and the solver."""

    PROXIMITY = "proximity"
    DIRECTION = "direction"
    ALIGNMENT = "alignment"
    SYMMETRY = "symmetry"
    OVERLAP = "overlap"
    PARALLELISM = "parallelism"
    PERPENDICULARITY = "perpendicularity"
    HIERARCHY = "hierarchy"
    ROTATION = "rotation"
    REPETITION = "repetition"
    SCALING = "scaling"


class Axis(enum.Enum):
    X = "x"
    Y = "y"
    Z = "z"

    def component(self, v: Vec3) -> float:
        if self is Axis.X:
            return v.x
        if self is Axis.Y:
            return v.y
        return v.z


class ArityError(ValueError):
    """A relation received the wrong number of member layouts."""


class MissingArg(ValueError):
    """A required relation argument is absent."""


class ZeroRepetitions(ValueError):
    pass


class NonPositiveStep(ValueError):
    pass


class NonPositiveFactor(ValueError):
    pass


class ConvergenceError(RuntimeError):
    """put_ontop could not reach contact within its iteration budget."""


# ---- scorers ----

def proximity_score(a: Layout, b: Layout,
                    min_distance: float = 1.0,
                    max_distance: float = 5.0) -> float:
    """Closeness of two assets: 1 inside min_distance, 0 beyond max_distance,
    linear in between."""
    d = dist(a.location, b.location)
    if d <= min_distance:
        return 1.0
    if d >= max_distance:
        return 0.0
    return 1.0 - (d - min_distance) / (max_distance - min_distance)


def direction_score(a: Layout, b: Layout) -> float:
    """How squarely a faces b: cosine of facing vs. target direction,
    remapped to [0, 1]."""
    f = normalize(forward_vector(a.orientation))
    t = normalize(sub(b.location, a.location))
    return clamp((dot(f, t) + 1.0) / 2.0, 0.0, 1.0)


def alignment_score(assets: Sequence[Layout], axis: Axis) -> float:
    """Tightness of the member coordinates along one axis; empty input
    scores 0."""
    if not assets:
        return 0.0
    coords = [axis.component(a.location) for a in assets]
    variance = pvariance(coords)
    threshold_variance = 1.0
    return clamp(1.0 / (1.0 + variance / threshold_variance), 0.0, 1.0)


def symmetry_score(assets: Sequence[Layout], axis: Axis) -> float:
    """Mirror balance about the median coordinate of the group.

    Each member's mirrored coordinate is matched to the nearest member
    coordinate (itself allowed); the mean residual is rescaled so that a
    deviation of 10 or more scores 0.
    """
    if not assets:
        return 0.0
    coords = [axis.component(a.location) for a in assets]
    m = median(coords)
    deviations = []
    for c in coords:
        mirrored = 2.0 * m - c
        deviations.append(min(abs(mirrored - other) for other in coords))
    max_deviation = 10.0
    return max(0.0, 1.0 - mean(deviations) / max_deviation)


def overlap_detected(a: Sequence[Vec3], b: Sequence[Vec3],
                     threshold: float = 0.01) -> bool:
    """True when the closest vertex pair sits within threshold (inclusive)."""
    return shortest_vertex_distance(a, b) <= threshold


def overlap_score(a: Layout, b: Layout, threshold: float = 0.01,
                  require_overlap: bool = True) -> float:
    """Binary contact check: scores the presence (or, with
    require_overlap=False, the absence) of near-touching vertices."""
    hit = overlap_detected(aabb_vertices(a.bbox), aabb_vertices(b.bbox),
                           threshold)
    if require_overlap:
        return 1.0 if hit else 0.0
    return 0.0 if hit else 1.0


def _euler_vec(e: Euler) -> Vec3:
    return Vec3(e.pitch, e.yaw, e.roll)


def parallelism_score(assets: Sequence[Layout]) -> float:
    """Consistency of a chain of assets: consecutive displacement
    directions agree and orientations agree. Fewer than two members is
    trivially parallel."""
    if len(assets) < 2:
        return 1.0
    disp = [normalize(sub(assets[i + 1].location, assets[i].location))
            for i in range(len(assets) - 1)]
    dots = [dot(disp[i], disp[i + 1]) for i in range(len(disp) - 1)]
    if not dots:
        position_term = 1.0
    else:
        position_term = mean([0.5 * (d + 1.0) for d in dots])
    sims = []
    for i in range(len(assets) - 1):
        v1 = normalize(_euler_vec(assets[i].orientation))
        v2 = normalize(_euler_vec(assets[i + 1].orientation))
        sims.append(dot(v1, v2))
    orientation_term = mean([(s + 1.0) / 2.0 for s in sims])
    return clamp((position_term + orientation_term) / 2.0, 0.0, 1.0)


def perpendicularity_score(a: Layout, b: Layout) -> float:
    """1 when the two facing directions are orthogonal, 0 when collinear."""
    v1 = forward_vector(a.orientation)
    v2 = forward_vector(b.orientation)
    cosine = dot(v1, v2) / (norm(v1) * norm(v2))
    return clamp(1.0 - abs(cosine), 0.0, 1.0)


def evaluate_hierarchy(assets: Sequence[Layout],
                       expected_order: Sequence[object]) -> float:
    """Fraction of positions where the volume-descending order matches the
    given order. Ids pair with assets positionally; ties keep list order."""
    if not assets:
        return 1.0
    if len(expected_order) != len(assets):
        raise ArityError("expected_order must name each member exactly once")
    if len(set(expected_order)) != len(expected_order):
        raise ValueError("expected_order entries must be unique")
    id_to_volume = {oid: volume(a.bbox)
                    for oid, a in zip(expected_order, assets)}
    sorted_ids = sorted(id_to_volume.keys(),
                        key=lambda oid: id_to_volume[oid], reverse=True)
    correct = sum(1 for i, oid in enumerate(sorted_ids)
                  if expected_order[i] == oid)
    return correct / len(expected_order)


def rotation_uniformity_score(objects: Sequence[Layout],
                              center: Vec3) -> float:
    """Evenness of members around a center: variance of the sorted angular
    gaps (wrap included) pushed through 1/(1+var)."""
    if not objects:
        return 1.0
    angles = sorted(angle_from_center(center, o.location) % TWO_PI
                    for o in objects)
    diffs = [angles[i + 1] - angles[i] for i in range(len(angles) - 1)]
    diffs.append((angles[0] + TWO_PI) - angles[-1])
    return 1.0 / (1.0 + pvariance(diffs))


def scaling_score(assets: Sequence[Layout],
                  depth_axis: Axis = Axis.Y) -> float:
    """Fraction of adjacent pairs whose volume does not increase when the
    members are ordered front-to-back along depth_axis."""
    if len(assets) < 2:
        return 1.0
    ordered = sorted(assets, key=lambda a: depth_axis.component(a.location))
    vols = [volume(a.bbox) for a in ordered]
    indicators = [1.0 if vols[i] >= vols[i + 1] else 0.0
                  for i in range(len(vols) - 1)]
    return mean(indicators)


def repetition_score(assets: Sequence[Layout]) -> float:
    """Regular repetition along a line: consecutive displacements should
    point the same way and keep equal spacing."""
    if len(assets) < 2:
        return 1.0
    disp = [sub(assets[i + 1].location, assets[i].location)
            for i in range(len(assets) - 1)]
    unit = [normalize(d) for d in disp]
    dots = [dot(unit[i], unit[i + 1]) for i in range(len(unit) - 1)]
    if not dots:
        direction_term = 1.0
    else:
        direction_term = mean([0.5 * (d + 1.0) for d in dots])
    spacing_term = 1.0 / (1.0 + pvariance([norm(d) for d in disp]))
    return clamp((direction_term + spacing_term) / 2.0, 0.0, 1.0)


# ---- generators and adjusters ----

def repeat_object(base: Layout, count: int, offset: Vec3) -> list[Layout]:
    """count copies of base, the i-th translated by i * offset."""
    if count <= 0:
        raise ZeroRepetitions(f"count must be positive, got {count}")
    return [translate(base, scale(offset, float(i))) for i in range(count)]


def put_ontop(moving: Sequence[Layout], target: Sequence[Layout],
              threshold: float = 0.01, step: float = 0.01,
              max_iterations: int = 10000) -> list[Layout]:
    """Lower the moving group straight down until its vertices come within
    threshold of the target group's.

    Each pass drops by max(step, current shortest distance), so far-apart
    groups close most of the gap in one move. Groups whose footprints never
    meet cannot converge; the iteration cap turns that into ConvergenceError.
    """
    if step <= 0.0:
        raise NonPositiveStep(f"step must be positive, got {step}")
    if threshold <= 0.0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    movers = list(moving)
    target_vertices = [v for t in target for v in aabb_vertices(t.bbox)]
    for _ in range(max_iterations):
        moving_vertices = [v for m in movers for v in aabb_vertices(m.bbox)]
        shortest = shortest_vertex_distance(moving_vertices, target_vertices)
        if shortest < threshold:
            return movers
        drop = Vec3(0.0, 0.0, -max(step, shortest))
        movers = [translate(m, drop) for m in movers]
    raise ConvergenceError(
        f"no contact within {max_iterations} iterations; "
        "the groups may never meet vertically")


def scale_group(objects: Sequence[Layout], factor: float) -> list[Layout]:
    """Scale locations and boxes about the world origin by factor."""
    if factor <= 0.0:
        raise NonPositiveFactor(f"factor must be positive, got {factor}")
    return [Layout(location=scale(o.location, factor),
                   bbox=Aabb(scale(o.bbox.min, factor),
                             scale(o.bbox.max, factor)),
                   orientation=o.orientation)
            for o in objects]


# ---- argument specs and uniform dispatch ----

# kind -> (required arg names, optional arg names)
ARG_SPECS: dict[RelationKind, tuple[frozenset[str], frozenset[str]]] = {
    RelationKind.PROXIMITY: (frozenset(),
                             frozenset({"min_distance", "max_distance"})),
    RelationKind.DIRECTION: (frozenset(), frozenset()),
    RelationKind.ALIGNMENT: (frozenset({"axis"}), frozenset()),
    RelationKind.SYMMETRY: (frozenset({"axis"}), frozenset()),
    RelationKind.OVERLAP: (frozenset(),
                           frozenset({"threshold", "require_overlap"})),
    RelationKind.PARALLELISM: (frozenset(), frozenset()),
    RelationKind.PERPENDICULARITY: (frozenset(), frozenset()),
    RelationKind.HIERARCHY: (frozenset(), frozenset({"expected_order"})),
    RelationKind.ROTATION: (frozenset({"center"}), frozenset()),
    RelationKind.REPETITION: (frozenset(), frozenset()),
    RelationKind.SCALING: (frozenset(), frozenset({"depth_axis"})),
}

# kind -> exact arity, or None for "one or more"
_EXACT_ARITY: dict[RelationKind, int | None] = {
    RelationKind.PROXIMITY: 2,
    RelationKind.DIRECTION: 2,
    RelationKind.OVERLAP: 2,
    RelationKind.PERPENDICULARITY: 2,
    RelationKind.ALIGNMENT: None,
    RelationKind.SYMMETRY: None,
    RelationKind.PARALLELISM: None,
    RelationKind.HIERARCHY: None,
    RelationKind.ROTATION: None,
    RelationKind.REPETITION: None,
    RelationKind.SCALING: None,
}


def check_arity(kind: RelationKind, member_count: int) -> None:
    exact = _EXACT_ARITY[kind]
    if exact is not None and member_count != exact:
        raise ArityError(
            f"{kind.value} takes exactly {exact} members, got {member_count}")
    if exact is None and member_count < 1:
        raise ArityError(f"{kind.value} needs at least one member")


def validate_args(kind: RelationKind,
                  args: Mapping[str, object]) -> list[str]:
    """Problems with an argument mapping for a kind; empty means valid."""
    required, optional = ARG_SPECS[kind]
    problems = []
    for name in sorted(required - set(args)):
        problems.append(f"missing required arg '{name}' for {kind.value}")
    for name in sorted(set(args) - required - optional):
        problems.append(f"unknown arg '{name}' for {kind.value}")
    return problems


def coerce_axis(value: object) -> Axis:
    if isinstance(value, Axis):
        return value
    if isinstance(value, str):
        return Axis(value.lower())
    raise TypeError(f"cannot interpret {value!r} as an axis")


def coerce_vec3(value: object) -> Vec3:
    if isinstance(value, Vec3):
        return value
    if isinstance(value, (list, tuple)) and len(value) == 3:
        return Vec3(float(value[0]), float(value[1]), float(value[2]))
    raise TypeError(f"cannot interpret {value!r} as a point")


def _require(args: Mapping[str, object], name: str,
             kind: RelationKind) -> object:
    if name not in args:
        raise MissingArg(f"{kind.value} requires arg '{name}'")
    return args[name]


def _score_proximity(layouts, args):
    check_arity(RelationKind.PROXIMITY, len(layouts))
    return proximity_score(layouts[0], layouts[1],
                           min_distance=float(args.get("min_distance", 1.0)),
                           max_distance=float(args.get("max_distance", 5.0)))


def _score_direction(layouts, args):
    check_arity(RelationKind.DIRECTION, len(layouts))
    return direction_score(layouts[0], layouts[1])


def _score_alignment(layouts, args):
    check_arity(RelationKind.ALIGNMENT, len(layouts))
    axis = coerce_axis(_require(args, "axis", RelationKind.ALIGNMENT))
    return alignment_score(layouts, axis)


def _score_symmetry(layouts, args):
    check_arity(RelationKind.SYMMETRY, len(layouts))
    axis = coerce_axis(_require(args, "axis", RelationKind.SYMMETRY))
    return symmetry_score(layouts, axis)


def _score_overlap(layouts, args):
    check_arity(RelationKind.OVERLAP, len(layouts))
    return overlap_score(layouts[0], layouts[1],
                         threshold=float(args.get("threshold", 0.01)),
                         require_overlap=bool(args.get("require_overlap",
                                                       True)))


def _score_parallelism(layouts, args):
    check_arity(RelationKind.PARALLELISM, len(layouts))
    return parallelism_score(layouts)


def _score_perpendicularity(layouts, args):
    check_arity(RelationKind.PERPENDICULARITY, len(layouts))
    return perpendicularity_score(layouts[0], layouts[1])


def _score_hierarchy(layouts, args):
    check_arity(RelationKind.HIERARCHY, len(layouts))
    expected = args.get("expected_order")
    if expected is None:
        expected = list(range(len(layouts)))
    return evaluate_hierarchy(layouts, list(expected))


def _score_rotation(layouts, args):
    check_arity(RelationKind.ROTATION, len(layouts))
    center = coerce_vec3(_require(args, "center", RelationKind.ROTATION))
    return rotation_uniformity_score(layouts, center)


def _score_repetition(layouts, args):
    check_arity(RelationKind.REPETITION, len(layouts))
    return repetition_score(layouts)


def _score_scaling(layouts, args):
    check_arity(RelationKind.SCALING, len(layouts))
    axis = coerce_axis(args.get("depth_axis", Axis.Y))
    return scaling_score(layouts, axis)


NATIVE_SCORERS = {
    RelationKind.PROXIMITY: _score_proximity,
    RelationKind.DIRECTION: _score_direction,
    RelationKind.ALIGNMENT: _score_alignment,
    RelationKind.SYMMETRY: _score_symmetry,
    RelationKind.OVERLAP: _score_overlap,
    RelationKind.PARALLELISM: _score_parallelism,
    RelationKind.PERPENDICULARITY: _score_perpendicularity,
    RelationKind.HIERARCHY: _score_hierarchy,
    RelationKind.ROTATION: _score_rotation,
    RelationKind.REPETITION: _score_repetition,
    RelationKind.SCALING: _score_scaling,
}
