import fs from "fs";
import { z } from "zod";
import { Aabb, Vec3 } from "./report";

const vec3 = z.tuple([z.number(), z.number(), z.number()]);

const layoutSchema = z.object({
  bbox: z.object({ min: vec3, max: vec3 }),
  location: vec3,
  // [pitch, yaw, roll] radians; the build script applies yaw only
  orientation: vec3,
});

const sceneSchema = z.object({
  layouts: z.record(z.string(), layoutSchema),
});

export type Layout = z.infer<typeof layoutSchema>;

export function loadSceneLayouts(scenePath: string): Record<string, Layout> {
  let raw: unknown;
  try {
    raw = JSON.parse(fs.readFileSync(scenePath, "utf-8"));
  } catch (err) {
    throw new Error(`could not read scene file ${scenePath}: ${(err as Error).message}`);
  }
  const parsed = sceneSchema.safeParse(raw);
  if (!parsed.success) {
    const first = parsed.error.issues[0];
    const where = first.path.join("/") || "(root)";
    throw new Error(`invalid scene file ${scenePath}: ${where}: ${first.message}`);
  }
  return parsed.data.layouts;
}

/**
 * World AABB the build script will produce for a layout. The script places
 * a box at the stored bbox center and spins it by yaw, so the expected
 * bounds are the yaw-rotated corners re-bounded along the world axes.
 */
export function expectedWorldAabb(layout: Layout): Aabb {
  const { min, max } = layout.bbox;
  const center: Vec3 = [0, 1, 2].map((i) => (min[i] + max[i]) / 2) as Vec3;
  const half: Vec3 = [0, 1, 2].map((i) => (max[i] - min[i]) / 2) as Vec3;
  const yaw = layout.orientation[1];
  const c = Math.abs(Math.cos(yaw));
  const s = Math.abs(Math.sin(yaw));
  const spread: Vec3 = [
    c * half[0] + s * half[1],
    s * half[0] + c * half[1],
    half[2],
  ];
  return {
    min: [0, 1, 2].map((i) => center[i] - spread[i]) as Vec3,
    max: [0, 1, 2].map((i) => center[i] + spread[i]) as Vec3,
  };
}
