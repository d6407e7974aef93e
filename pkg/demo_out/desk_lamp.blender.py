"""Scene build script; run with: blender --background --python <file>"""
import json

import bpy
from mathutils import Vector

OBJECTS = json.loads('''[
  {
    "extents": [
      0.7,
      0.7,
      0.7
    ],
    "location": [
      0.0,
      0.0,
      0.35
    ],
    "name": "desk",
    "yaw": 0.0
  },
  {
    "extents": [
      0.4,
      0.4,
      0.4
    ],
    "location": [
      0.0,
      0.0,
      0.2
    ],
    "name": "lamp",
    "yaw": 0.0
  }
]''')

CAMERA = json.loads('''{
  "lens": 35.0,
  "location": [
    2.5,
    -2.5,
    2.35
  ],
  "target": [
    0.0,
    0.0,
    0.35
  ]
}''')


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
