export type Vec3 = [number, number, number];

export interface Aabb {
  min: Vec3;
  max: Vec3;
}

/** One object's round-trip record: what Blender reported vs the scene file. */
export interface ObjectRecord {
  name: string;
  expected: Aabb;
  observed: Aabb;
  /** Max componentwise |observed - expected| over both corners, in meters. */
  deviation: number;
}

export interface RunnerReport {
  blenderVersion: string;
  blenderExit: number;
  /** Sorted by object name, so the report is stable regardless of print order. */
  objects: ObjectRecord[];
  maxDeviation: number;
  renderPath?: string;
}

/** Round-trip passes when every AABB component agrees within this. */
export const DEVIATION_TOLERANCE = 1e-3;

export class BlenderNotFound extends Error {
  constructor(message: string) {
    super(message);
    this.name = "BlenderNotFound";
  }
}

export class ScriptCrashed extends Error {
  readonly exitCode: number | null;
  readonly stderr: string;

  constructor(message: string, exitCode: number | null, stderr: string) {
    super(message);
    this.name = "ScriptCrashed";
    this.exitCode = exitCode;
    this.stderr = stderr;
  }
}

export class ProtocolMismatch extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ProtocolMismatch";
  }
}
