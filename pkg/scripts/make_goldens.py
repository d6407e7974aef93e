"""Regenerate the emitter golden files in tests/goldens.

The scene is hand-authored and fully pinned (no solving), so the three
outputs are stable bytes. Rerun only when the emitters intentionally
change, and review the diff.
"""
from pathlib import Path

from layoutsmith.assets import CatalogEntry
from layoutsmith.emit import emit_all
from layoutsmith.geometry import Aabb, Euler, Layout, Vec3
from layoutsmith.relations import RelationKind
from layoutsmith.scenegraph import (AssetRef, CameraSpec, RelationNode,
                                    ReviewFeedback, SceneDocument, SubScene)

GOLDENS = Path(__file__).resolve().parents[1] / "tests/goldens"


def _box(x, y, ex, ey, h, yaw=0.0):
    return Layout(location=Vec3(x, y, h / 2),
                  bbox=Aabb(Vec3(x - ex / 2, y - ey / 2, 0.0),
                            Vec3(x + ex / 2, y + ey / 2, h)),
                  orientation=Euler(0.0, yaw, 0.0))


def golden_document() -> SceneDocument:
    return SceneDocument(
        query="a reading corner with a bookshelf, an armchair, and a plant",
        subscenes=(SubScene(
            title="reading corner",
            asset_list=("armchair", "bookshelf", "plant"),
            description="armchair angled toward the bookshelf, plant "
                        "beside it"),),
        assets=(
            AssetRef(id="armchair", name="armchair",
                     description="upholstered reading chair",
                     height_m=1.0),
            AssetRef(id="bookshelf", name="bookshelf",
                     description="tall wooden bookshelf", height_m=2.0),
            AssetRef(id="plant", name="plant",
                     description="potted fig plant", height_m=1.4),
        ),
        relations=(
            RelationNode(id="r1", kind=RelationKind.PROXIMITY,
                         members=("armchair", "bookshelf"),
                         args={"min_distance": 0.8, "max_distance": 3.0}),
            RelationNode(id="r2", kind=RelationKind.ALIGNMENT,
                         members=("bookshelf", "plant"),
                         args={"axis": "y"}),
        ),
        layouts={
            "armchair": _box(0.9, -0.6, 0.8, 0.85, 1.0, yaw=2.356194490192345),
            "bookshelf": _box(-0.8, 0.4, 1.0, 0.35, 2.0),
            "plant": _box(0.7, 0.4, 0.45, 0.45, 1.4),
        },
        camera=CameraSpec(location=Vec3(3.2, -3.4, 2.4),
                          target=Vec3(0.0, 0.0, 0.8), lens=50.0),
        history=(ReviewFeedback(verdict="accept"),),
    )


CATALOG = [
    CatalogEntry(name="plant", description="potted fig plant",
                 height_m=1.4, file="assets/plant.glb"),
]


def main():
    GOLDENS.mkdir(parents=True, exist_ok=True)
    paths = emit_all(golden_document(), GOLDENS, "reading_corner",
                     catalog=CATALOG)
    for p in paths.values():
        print(p)


if __name__ == "__main__":
    main()
