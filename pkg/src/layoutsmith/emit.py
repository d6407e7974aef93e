"""Deterministic exporters: build script, top-down preview, canonical JSON.

Identical documents yield byte-identical artifacts. Scene JSON uses
sorted keys and Python's shortest round-trip float text; loading applies
schema checks that report the failing JSON pointer.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

from .geometry import Aabb, Euler, Layout, Vec3
from .relations import RelationKind
from .scenegraph import (
    AddRelation, AssetRef, CameraSpec, Edit, MissingLayout, RelationNode,
    RemoveRelation, ReplaceSkillBody, ReviewFeedback, SceneDocument, SetArg,
    SubScene,
)


class MissingCamera(ValueError):
    pass


class SchemaError(ValueError):
    def __init__(self, message: str, pointer: str):
        self.pointer = pointer
        super().__init__(f"{message} (at {pointer})")


# ---- Blender build script ----

_SCRIPT_BODY = '''\
def clear_scene():
    for obj in list(bpy.data.objects):
        bpy.data.objects.remove(obj, do_unlink=True)


def import_asset(path):
    """Best-effort import for unit-normalized asset files."""
    lower = path.lower()
    before = set(bpy.data.objects)
    try:
        if lower.endswith(".obj"):
            bpy.ops.wm.obj_import(filepath=path)
        elif lower.endswith((".glb", ".gltf")):
            bpy.ops.import_scene.gltf(filepath=path)
        else:
            return None
    except Exception:
        return None
    created = [o for o in bpy.data.objects if o not in before]
    return created[0] if created else None


def add_object(spec):
    obj = None
    if spec.get("file"):
        obj = import_asset(spec["file"])
    if obj is None:
        bpy.ops.mesh.primitive_cube_add(size=1.0,
                                        location=tuple(spec["location"]))
        obj = bpy.context.active_object
    obj.name = spec["name"]
    obj.location = tuple(spec["location"])
    obj.scale = tuple(spec["extents"])
    obj.rotation_euler = (0.0, 0.0, spec["yaw"])
    return obj


def add_camera(spec):
    cam_data = bpy.data.cameras.new(name="Camera")
    cam_data.lens = spec["lens"]
    cam = bpy.data.objects.new("Camera", cam_data)
    bpy.context.collection.objects.link(cam)
    cam.location = tuple(spec["location"])
    direction = Vector(spec["target"]) - Vector(spec["location"])
    rot_quat = direction.to_track_quat('-Z', 'Y')
    cam.rotation_euler = rot_quat.to_euler()
    bpy.context.scene.camera = cam
    return cam


clear_scene()
created = [add_object(spec) for spec in OBJECTS]
add_camera(CAMERA)
bpy.context.view_layer.update()
for obj in created:
    corners = [obj.matrix_world @ Vector(c) for c in obj.bound_box]
    lo = [min(c[i] for c in corners) for i in range(3)]
    hi = [max(c[i] for c in corners) for i in range(3)]
    print(json.dumps({"name": obj.name, "min": lo, "max": hi}))
'''


def emit_blender_script(doc: SceneDocument, catalog=None) -> str:
    """Python source that rebuilds the scene inside Blender.

    Each asset becomes a unit cube scaled to its box extents, placed at
    the box center, and spun to its yaw (asset files from the catalog are
    imported instead when available). The script prints one JSON line per
    object with its world AABB, which the round-trip checker consumes.
    """
    if doc.camera is None:
        raise MissingCamera("document has no camera")
    files = {}
    if catalog is not None:
        files = {entry.name: entry.file for entry in catalog
                 if getattr(entry, "file", None)}
    specs = []
    for asset in sorted(doc.assets, key=lambda a: a.id):
        if asset.id not in doc.layouts:
            raise MissingLayout(asset.id)
        layout = doc.layouts[asset.id]
        center = layout.bbox.center()
        ext = layout.bbox.extents()
        spec = {
            "name": asset.id,
            "location": [center.x, center.y, center.z],
            "extents": [ext.x, ext.y, ext.z],
            "yaw": layout.orientation.yaw,
        }
        if asset.name in files:
            spec["file"] = files[asset.name]
        specs.append(spec)
    cam = {
        "location": [doc.camera.location.x, doc.camera.location.y,
                     doc.camera.location.z],
        "target": [doc.camera.target.x, doc.camera.target.y,
                   doc.camera.target.z],
        "lens": doc.camera.lens,
    }
    objects_json = json.dumps(specs, sort_keys=True, indent=2)
    camera_json = json.dumps(cam, sort_keys=True, indent=2)
    return (
        '"""Scene build script; run with: blender --background --python '
        '<file>"""\n'
        "import json\n\n"
        "import bpy\n"
        "from mathutils import Vector\n\n"
        f"OBJECTS = json.loads('''{objects_json}''')\n\n"
        f"CAMERA = json.loads('''{camera_json}''')\n\n\n"
        + _SCRIPT_BODY
    )


def ensure_camera(doc: SceneDocument) -> SceneDocument:
    """Attach a deterministic default camera when none is set: offset from
    the scene's bounding center, aimed back at it."""
    if doc.camera is not None:
        return doc
    if not doc.layouts:
        raise MissingLayout("cannot frame an empty scene")
    boxes = list(doc.layouts.values())
    lo = Vec3(min(b.bbox.min.x for b in boxes),
              min(b.bbox.min.y for b in boxes),
              min(b.bbox.min.z for b in boxes))
    hi = Vec3(max(b.bbox.max.x for b in boxes),
              max(b.bbox.max.y for b in boxes),
              max(b.bbox.max.z for b in boxes))
    center = Vec3((lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0,
                  (lo.z + hi.z) / 2.0)
    radius = max(hi.x - lo.x, hi.y - lo.y, hi.z - lo.z, 1.0)
    location = Vec3(center.x + 1.5 * radius + 1.0,
                    center.y - 1.5 * radius - 1.0,
                    center.z + radius + 1.0)
    from dataclasses import replace
    return replace(doc, camera=CameraSpec(location=location, target=center))


# ---- top-down SVG preview ----

def _f(v: float) -> str:
    return f"{v:.2f}"


def emit_preview(doc: SceneDocument, size: int = 512) -> str:
    """Orthographic top view: one labeled footprint rectangle per asset
    plus a yaw arrow from its location."""
    if not doc.assets or not doc.layouts:
        raise MissingLayout("nothing to preview")
    ordered = sorted(doc.assets, key=lambda a: a.id)
    for asset in ordered:
        if asset.id not in doc.layouts:
            raise MissingLayout(asset.id)
    boxes = [doc.layouts[a.id].bbox for a in ordered]
    min_x = min(b.min.x for b in boxes)
    max_x = max(b.max.x for b in boxes)
    min_y = min(b.min.y for b in boxes)
    max_y = max(b.max.y for b in boxes)
    pad = 0.05 * max(max_x - min_x, max_y - min_y, 1e-6) + 0.5
    min_x -= pad
    min_y -= pad
    max_x += pad
    max_y += pad
    margin = 10.0
    span = max(max_x - min_x, max_y - min_y)
    px_per_m = (size - 2 * margin) / span

    def to_px(x: float, y: float) -> tuple[float, float]:
        return (margin + (x - min_x) * px_per_m,
                size - margin - (y - min_y) * px_per_m)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
        f'height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="#ffffff"/>',
    ]
    for asset in ordered:
        layout = doc.layouts[asset.id]
        b = layout.bbox
        x0, y0 = to_px(b.min.x, b.max.y)
        x1, y1 = to_px(b.max.x, b.min.y)
        lines.append(
            f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(x1 - x0)}" '
            f'height="{_f(y1 - y0)}" fill="#e2e8f0" stroke="#1e293b" '
            f'stroke-width="1.5"/>')
        loc = layout.location
        yaw = layout.orientation.yaw
        arrow_len = max(0.2, 0.35 * min(b.max.x - b.min.x,
                                        b.max.y - b.min.y))
        tip_x = loc.x + math.cos(yaw) * arrow_len
        tip_y = loc.y + math.sin(yaw) * arrow_len
        ax0, ay0 = to_px(loc.x, loc.y)
        ax1, ay1 = to_px(tip_x, tip_y)
        lines.append(
            f'<line x1="{_f(ax0)}" y1="{_f(ay0)}" x2="{_f(ax1)}" '
            f'y2="{_f(ay1)}" stroke="#b91c1c" stroke-width="2"/>')
        for barb in (yaw + 2.6, yaw - 2.6):
            bx = tip_x + math.cos(barb) * arrow_len * 0.3
            by = tip_y + math.sin(barb) * arrow_len * 0.3
            bpx, bpy = to_px(bx, by)
            lines.append(
                f'<line x1="{_f(ax1)}" y1="{_f(ay1)}" x2="{_f(bpx)}" '
                f'y2="{_f(bpy)}" stroke="#b91c1c" stroke-width="2"/>')
        lines.append(
            f'<text x="{_f(ax0)}" y="{_f(ay0 - 6)}" '
            f'font-family="monospace" font-size="11" '
            f'fill="#0f172a">{asset.id}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# ---- canonical scene JSON ----

def _vec_to_json(v: Vec3) -> list[float]:
    return [v.x, v.y, v.z]


def _layout_to_json(l: Layout) -> dict:
    return {
        "location": _vec_to_json(l.location),
        "bbox": {"min": _vec_to_json(l.bbox.min),
                 "max": _vec_to_json(l.bbox.max)},
        "orientation": [l.orientation.pitch, l.orientation.yaw,
                        l.orientation.roll],
    }


def edit_to_json(edit: Edit) -> dict:
    if isinstance(edit, AddRelation):
        r = edit.relation
        return {"op": "add_relation",
                "relation": {"id": r.id, "kind": r.kind.value,
                             "members": list(r.members),
                             "args": dict(r.args), "skill": r.skill}}
    if isinstance(edit, RemoveRelation):
        return {"op": "remove_relation", "id": edit.relation_id}
    if isinstance(edit, SetArg):
        return {"op": "set_arg", "id": edit.relation_id,
                "name": edit.name, "value": edit.value}
    return {"op": "replace_skill_body", "skill": edit.skill_name,
            "source": edit.source}


def doc_to_json(doc: SceneDocument) -> dict:
    out: dict = {
        "query": doc.query,
        "subscenes": [{"title": s.title,
                       "asset_list": list(s.asset_list),
                       "description": s.description}
                      for s in doc.subscenes],
        "assets": [{"id": a.id, "name": a.name,
                    "description": a.description,
                    "height_m": a.height_m}
                   for a in sorted(doc.assets, key=lambda a: a.id)],
        "relations": [{"id": r.id, "kind": r.kind.value,
                       "members": list(r.members),
                       "args": dict(r.args), "skill": r.skill}
                      for r in doc.relations],
        "layouts": {aid: _layout_to_json(doc.layouts[aid])
                    for aid in sorted(doc.layouts)},
        "history": [{"verdict": fb.verdict,
                     "edits": [edit_to_json(e) for e in fb.edits]}
                    for fb in doc.history],
    }
    if doc.camera is not None:
        out["camera"] = {"location": _vec_to_json(doc.camera.location),
                         "target": _vec_to_json(doc.camera.target),
                         "lens": doc.camera.lens}
    return out


def dumps_scene(doc: SceneDocument) -> str:
    return json.dumps(doc_to_json(doc), sort_keys=True, indent=2,
                      ensure_ascii=False) + "\n"


def save_scene(doc: SceneDocument, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(dumps_scene(doc), encoding="utf-8")
    return path


# -- schema-checked loading --

def _num(value, pointer: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError("expected a number", pointer)
    return float(value)


def _str(value, pointer: str) -> str:
    if not isinstance(value, str):
        raise SchemaError("expected a string", pointer)
    return value


def _list(value, pointer: str) -> list:
    if not isinstance(value, list):
        raise SchemaError("expected an array", pointer)
    return value


def _obj(value, pointer: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError("expected an object", pointer)
    return value


def _vec_from_json(value, pointer: str) -> Vec3:
    arr = _list(value, pointer)
    if len(arr) != 3:
        raise SchemaError("expected 3 numbers", pointer)
    return Vec3(_num(arr[0], f"{pointer}/0"), _num(arr[1], f"{pointer}/1"),
                _num(arr[2], f"{pointer}/2"))


def _layout_from_json(value, pointer: str) -> Layout:
    o = _obj(value, pointer)
    for key in ("location", "bbox", "orientation"):
        if key not in o:
            raise SchemaError(f"missing '{key}'", pointer)
    bbox = _obj(o["bbox"], f"{pointer}/bbox")
    for key in ("min", "max"):
        if key not in bbox:
            raise SchemaError(f"missing '{key}'", f"{pointer}/bbox")
    ori = _list(o["orientation"], f"{pointer}/orientation")
    if len(ori) != 3:
        raise SchemaError("expected 3 numbers", f"{pointer}/orientation")
    try:
        return Layout(
            location=_vec_from_json(o["location"], f"{pointer}/location"),
            bbox=Aabb(_vec_from_json(bbox["min"], f"{pointer}/bbox/min"),
                      _vec_from_json(bbox["max"], f"{pointer}/bbox/max")),
            orientation=Euler(
                _num(ori[0], f"{pointer}/orientation/0"),
                _num(ori[1], f"{pointer}/orientation/1"),
                _num(ori[2], f"{pointer}/orientation/2")))
    except SchemaError:
        raise
    except ValueError as exc:
        # Aabb/Euler validation failures point at the whole layout
        raise SchemaError(str(exc), pointer)


def _relation_from_json(value, pointer: str) -> RelationNode:
    o = _obj(value, pointer)
    for key in ("id", "kind", "members"):
        if key not in o:
            raise SchemaError(f"missing '{key}'", pointer)
    kind_text = _str(o["kind"], f"{pointer}/kind")
    try:
        kind = RelationKind(kind_text)
    except ValueError:
        raise SchemaError(f"unknown relation kind '{kind_text}'",
                          f"{pointer}/kind")
    members = tuple(_str(m, f"{pointer}/members/{i}")
                    for i, m in enumerate(_list(o["members"],
                                                f"{pointer}/members")))
    args = _obj(o.get("args", {}), f"{pointer}/args")
    skill = _str(o.get("skill", kind.value), f"{pointer}/skill")
    return RelationNode(id=_str(o["id"], f"{pointer}/id"), kind=kind,
                        members=members, args=dict(args), skill=skill)


def edit_from_json(value, pointer: str) -> Edit:
    o = _obj(value, pointer)
    op = _str(o.get("op", ""), f"{pointer}/op")
    if op == "add_relation":
        return AddRelation(_relation_from_json(o.get("relation"),
                                               f"{pointer}/relation"))
    if op == "remove_relation":
        return RemoveRelation(_str(o.get("id", None), f"{pointer}/id"))
    if op == "set_arg":
        return SetArg(_str(o.get("id", None), f"{pointer}/id"),
                      _str(o.get("name", None), f"{pointer}/name"),
                      o.get("value"))
    if op == "replace_skill_body":
        return ReplaceSkillBody(_str(o.get("skill", None),
                                     f"{pointer}/skill"),
                                _str(o.get("source", None),
                                     f"{pointer}/source"))
    raise SchemaError(f"unknown edit op '{op}'", f"{pointer}/op")


def doc_from_json(data: object) -> SceneDocument:
    root = _obj(data, "/")
    query = _str(root.get("query", ""), "/query")
    subscenes = []
    for i, s in enumerate(_list(root.get("subscenes", []), "/subscenes")):
        p = f"/subscenes/{i}"
        o = _obj(s, p)
        subscenes.append(SubScene(
            title=_str(o.get("title", ""), f"{p}/title"),
            asset_list=tuple(_str(a, f"{p}/asset_list/{j}")
                             for j, a in enumerate(
                                 _list(o.get("asset_list", []),
                                       f"{p}/asset_list"))),
            description=_str(o.get("description", ""), f"{p}/description")))
    assets = []
    for i, a in enumerate(_list(root.get("assets", []), "/assets")):
        p = f"/assets/{i}"
        o = _obj(a, p)
        if "id" not in o:
            raise SchemaError("missing 'id'", p)
        assets.append(AssetRef(
            id=_str(o["id"], f"{p}/id"),
            name=_str(o.get("name", o["id"]), f"{p}/name"),
            description=_str(o.get("description", ""), f"{p}/description"),
            height_m=_num(o.get("height_m", 1.0), f"{p}/height_m")))
    relations = tuple(
        _relation_from_json(r, f"/relations/{i}")
        for i, r in enumerate(_list(root.get("relations", []),
                                    "/relations")))
    layouts = {}
    for aid, l in sorted(_obj(root.get("layouts", {}), "/layouts").items()):
        layouts[_str(aid, "/layouts")] = _layout_from_json(
            l, f"/layouts/{aid}")
    camera = None
    if "camera" in root:
        o = _obj(root["camera"], "/camera")
        for key in ("location", "target"):
            if key not in o:
                raise SchemaError(f"missing '{key}'", "/camera")
        try:
            camera = CameraSpec(
                location=_vec_from_json(o["location"], "/camera/location"),
                target=_vec_from_json(o["target"], "/camera/target"),
                lens=_num(o.get("lens", 35.0), "/camera/lens"))
        except SchemaError:
            raise
        except ValueError as exc:
            raise SchemaError(str(exc), "/camera")
    history = []
    for i, fb in enumerate(_list(root.get("history", []), "/history")):
        p = f"/history/{i}"
        o = _obj(fb, p)
        verdict = _str(o.get("verdict", ""), f"{p}/verdict")
        if verdict not in ("accept", "revise"):
            raise SchemaError(f"unknown verdict '{verdict}'",
                              f"{p}/verdict")
        edits = tuple(edit_from_json(e, f"{p}/edits/{j}")
                      for j, e in enumerate(_list(o.get("edits", []),
                                                  f"{p}/edits")))
        history.append(ReviewFeedback(verdict=verdict, edits=edits))
    return SceneDocument(query=query, subscenes=tuple(subscenes),
                         assets=tuple(assets), relations=relations,
                         layouts=layouts, camera=camera,
                         history=tuple(history))


def loads_scene(text: str) -> SceneDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc.msg}", "/")
    return doc_from_json(data)


def load_scene(path: str | Path) -> SceneDocument:
    return loads_scene(Path(path).read_text(encoding="utf-8"))


def emit_all(doc: SceneDocument, out_dir: str | Path, stem: str,
             catalog=None) -> dict[str, Path]:
    """Write the scene JSON, build script, and preview for one document."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = ensure_camera(doc)
    paths = {
        "scene": out_dir / f"{stem}.scene.json",
        "script": out_dir / f"{stem}.blender.py",
        "preview": out_dir / f"{stem}.preview.svg",
    }
    paths["scene"].write_text(dumps_scene(doc), encoding="utf-8")
    paths["script"].write_text(emit_blender_script(doc, catalog),
                               encoding="utf-8")
    paths["preview"].write_text(emit_preview(doc), encoding="utf-8")
    return paths
