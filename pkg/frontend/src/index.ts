export { findBlender, BlenderInfo } from "./blender";
export { parseProtocol } from "./protocol";
export { expectedWorldAabb, loadSceneLayouts, Layout } from "./scene";
export { runScript, RunOptions } from "./runner";
export {
  Aabb,
  BlenderNotFound,
  DEVIATION_TOLERANCE,
  ObjectRecord,
  ProtocolMismatch,
  RunnerReport,
  ScriptCrashed,
  Vec3,
} from "./report";
