"""End-to-end demo without any external service.

Replays the scripted desk-and-lamp transcript through the full loop and
writes the scene JSON, build script, preview, and skill manifest under
demo_out/. Also re-runs the floating-lamp scenario to show a reviewer
edit pulling an airborne asset back down.
"""
import sys
from pathlib import Path

from layoutsmith.emit import emit_all
from layoutsmith.geometry import Aabb, Euler, Layout, Vec3
from layoutsmith.oracles import MockOracle
from layoutsmith.relations import RelationKind
from layoutsmith.scenegraph import (AssetRef, RelationNode, SceneDocument,
                                    SubScene)
from layoutsmith.skills.library import default_library
from layoutsmith.solver import SolverConfig
from layoutsmith.workflow import RunConfig, run_inner, run_outer

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "tests/fixtures"


def _box(x, y, z, ex, ey, h):
    return Layout(location=Vec3(x, y, z),
                  bbox=Aabb(Vec3(x - ex / 2, y - ey / 2, z - h / 2),
                            Vec3(x + ex / 2, y + ey / 2, z + h / 2)),
                  orientation=Euler())


def floating_lamp():
    """A lamp held only in x and y, hanging 2 m up."""
    return SceneDocument(
        query="a reading lamp over the desk",
        subscenes=(SubScene(title="desk", asset_list=("desk", "lamp")),),
        assets=(AssetRef(id="desk", name="desk"),
                AssetRef(id="lamp", name="lamp")),
        relations=(
            RelationNode(id="a1", kind=RelationKind.ALIGNMENT,
                         members=("lamp", "desk"), args={"axis": "x"}),
            RelationNode(id="a2", kind=RelationKind.ALIGNMENT,
                         members=("lamp", "desk"), args={"axis": "y"}),
        ),
        layouts={"desk": _box(0.0, 0.0, 0.35, 1.2, 0.8, 0.7),
                 "lamp": _box(0.0, 0.0, 2.0, 0.3, 0.3, 0.4)})


def show_regrounding() -> None:
    cfg = RunConfig(n_inner=2, solver=SolverConfig(
        mode="hill_climb", max_iterations=150, adjustment_step=0.2,
        restarts=2, seed=11, perturb_z=True))
    oracle = MockOracle.from_file(FIXTURES / "lamp_floating_transcript.json")
    result = run_inner("a reading lamp over the desk", floating_lamp(),
                       cfg, default_library(), oracle, frozen=("desk",))
    lamp = result.document.layouts["lamp"]
    print(f"floating lamp starts at z=2.00; after the reviewer adds a "
          f"proximity relation it settles at z={lamp.location.z:.2f}")


def main() -> int:
    out_dir = ROOT / "demo_out"
    cfg = RunConfig(n_inner=3, solver=SolverConfig(
        mode="hill_climb", max_iterations=120, adjustment_step=0.15,
        restarts=2, seed=5))
    oracle = MockOracle.from_file(FIXTURES / "desk_lamp_transcript.json")
    result = run_outer(["a desk with a reading lamp"], cfg,
                       default_library(), oracle)
    for note in result.errors:
        print(f"warning: {note}", file=sys.stderr)
    if not result.documents:
        print("no scene produced", file=sys.stderr)
        return 1
    doc = result.documents[0]
    paths = emit_all(doc, out_dir, "desk_lamp")
    for path in paths.values():
        print(path)
    print(result.library.save_manifest(out_dir / "skills"))
    for aid in sorted(doc.layouts):
        loc = doc.layouts[aid].location
        print(f"{aid}: ({loc.x:.2f}, {loc.y:.2f}, {loc.z:.2f})")
    show_regrounding()
    return 0


if __name__ == "__main__":
    sys.exit(main())
