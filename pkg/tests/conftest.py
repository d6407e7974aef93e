import math
import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

# golden regeneration scripts double as fixture builders for the tests
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "scripts"))

from layoutsmith.geometry import Aabb, Euler, Layout, Vec3
from layoutsmith.relations import RelationKind
from layoutsmith.scenegraph import (AssetRef, RelationNode, SceneDocument,
                                    SubScene)
from layoutsmith.solver import SolverConfig


def make_layout(x=0.0, y=0.0, z=0.5, ex=1.0, ey=1.0, h=1.0,
                yaw=0.0, pitch=0.0, roll=0.0) -> Layout:
    """Box of footprint ex * ey and height h centered at (x, y, z)."""
    return Layout(
        location=Vec3(x, y, z),
        bbox=Aabb(Vec3(x - ex / 2, y - ey / 2, z - h / 2),
                  Vec3(x + ex / 2, y + ey / 2, z + h / 2)),
        orientation=Euler(pitch, yaw, roll))


coord = st.floats(min_value=-50.0, max_value=50.0,
                  allow_nan=False, allow_infinity=False)
angle = st.floats(min_value=-math.pi, max_value=math.pi,
                  allow_nan=False, allow_infinity=False)
extent = st.floats(min_value=0.01, max_value=10.0,
                   allow_nan=False, allow_infinity=False)


@st.composite
def layouts(draw):
    return make_layout(x=draw(coord), y=draw(coord), z=draw(coord),
                       ex=draw(extent), ey=draw(extent), h=draw(extent),
                       yaw=draw(angle), pitch=draw(angle))


def simple_doc(layout_map, relations, frozen=(), query="fixture"):
    ids = tuple(sorted(layout_map))
    return SceneDocument(
        query=query,
        subscenes=(SubScene(title=query, asset_list=ids),),
        assets=tuple(AssetRef(id=i, name=i) for i in ids),
        relations=tuple(relations),
        layouts=dict(layout_map))


def _rel(rid, kind, members, **args):
    return RelationNode(id=rid, kind=RelationKind(kind),
                        members=tuple(members), args=dict(args))


def solver_fixtures():
    """Five small instances with a known lattice optimum.

    Each entry: (name, doc, frozen ids, grid config, hill config). The
    hill config runs 500 iterations over 4 restarts; steps are tuned per
    instance so the climb can settle inside the acceptance margin.
    """
    out = []

    # Single free asset pulled onto a proximity plateau.
    doc = simple_doc(
        {"anchor": make_layout(0.0, 0.0), "mover": make_layout(4.0, 0.0)},
        [_rel("r1", "proximity", ["mover", "anchor"],
              min_distance=1.0, max_distance=5.0)])
    bounds = Aabb(Vec3(-3, -3, 0.5), Vec3(3, 3, 0.5))
    out.append((
        "plateau", doc, ("anchor",),
        SolverConfig(mode="grid_oracle", adjustment_step=0.25,
                     bounds=bounds),
        SolverConfig(mode="hill_climb", max_iterations=500, restarts=4,
                     adjustment_step=0.25, bounds=bounds, seed=0)))

    # Two movers chained to a fixed anchor, held on one line.
    doc = simple_doc(
        {"a": make_layout(2.0, 1.0), "b": make_layout(-2.0, -1.0),
         "c": make_layout(0.0, 0.0)},
        [_rel("r1", "proximity", ["a", "b"],
              min_distance=0.5, max_distance=4.0),
         _rel("r2", "proximity", ["b", "c"],
              min_distance=0.5, max_distance=4.0),
         _rel("r3", "alignment", ["a", "b", "c"], axis="y")])
    bounds = Aabb(Vec3(-2, -2, 0.5), Vec3(2, 2, 0.5))
    out.append((
        "chain", doc, ("c",),
        SolverConfig(mode="grid_oracle", adjustment_step=0.5,
                     bounds=bounds),
        SolverConfig(mode="hill_climb", max_iterations=500, restarts=4,
                     adjustment_step=0.3, bounds=bounds, seed=0)))

    # Two movers collapsing onto a fixed corner point.
    doc = simple_doc(
        {"a": make_layout(-1.5, 1.0), "b": make_layout(1.0, -1.5),
         "c": make_layout(0.5, 0.5)},
        [_rel("r1", "alignment", ["a", "b", "c"], axis="x"),
         _rel("r2", "alignment", ["a", "b", "c"], axis="y")])
    bounds = Aabb(Vec3(-2, -2, 0.5), Vec3(2, 2, 0.5))
    out.append((
        "corner", doc, ("c",),
        SolverConfig(mode="grid_oracle", adjustment_step=0.25,
                     bounds=bounds),
        SolverConfig(mode="hill_climb", max_iterations=500, restarts=4,
                     adjustment_step=0.2, bounds=bounds, seed=0)))

    # Facing: orientation term plus a distance band.
    doc = simple_doc(
        {"screen": make_layout(0.0, 2.0, 0.35, ex=1.2, ey=0.2, h=0.7),
         "seat": make_layout(-1.0, -1.0, 0.35, ex=1.8, ey=0.8, h=0.7,
                             yaw=math.pi / 2)},
        [_rel("r1", "direction", ["seat", "screen"]),
         _rel("r2", "proximity", ["seat", "screen"],
              min_distance=2.0, max_distance=4.0)])
    bounds = Aabb(Vec3(-1.5, -1.5, 0.35), Vec3(1.5, 1.5, 0.35))
    out.append((
        "facing", doc, ("screen",),
        SolverConfig(mode="grid_oracle", adjustment_step=0.5,
                     bounds=bounds),
        SolverConfig(mode="hill_climb", max_iterations=500, restarts=4,
                     adjustment_step=0.25, bounds=bounds, seed=0)))

    # Three free assets, pure alignment basin.
    doc = simple_doc(
        {"a": make_layout(-1.0, 0.75), "b": make_layout(1.0, -0.5),
         "c": make_layout(0.25, 1.0)},
        [_rel("r1", "alignment", ["a", "b", "c"], axis="x"),
         _rel("r2", "alignment", ["a", "b", "c"], axis="y")])
    bounds = Aabb(Vec3(-1, -1, 0.5), Vec3(1, 1, 0.5))
    out.append((
        "gather", doc, (),
        SolverConfig(mode="grid_oracle", adjustment_step=0.5,
                     bounds=bounds),
        SolverConfig(mode="hill_climb", max_iterations=500, restarts=4,
                     adjustment_step=0.2, bounds=bounds, seed=0)))

    return out


@pytest.fixture(scope="session")
def fixtures5():
    return solver_fixtures()
