import { execFile } from "child_process";
import fs from "fs";
import path from "path";
import { promisify } from "util";
import { findBlender } from "./blender";
import { parseProtocol } from "./protocol";
import { expectedWorldAabb, loadSceneLayouts } from "./scene";
import {
  Aabb,
  BlenderNotFound,
  ObjectRecord,
  ProtocolMismatch,
  RunnerReport,
  ScriptCrashed,
} from "./report";

const execFileAsync = promisify(execFile);

export interface RunOptions {
  /** Write a camera-view render to this path. */
  render?: string;
  /** Kill Blender after this long. */
  timeoutMs?: number;
  /** Explicit Blender executable; otherwise $BLENDER, then PATH. */
  blenderPath?: string;
}

function componentDeviation(observed: Aabb, expected: Aabb): number {
  let worst = 0;
  for (const corner of ["min", "max"] as const) {
    for (let i = 0; i < 3; i++) {
      worst = Math.max(worst, Math.abs(observed[corner][i] - expected[corner][i]));
    }
  }
  return worst;
}

function renderExpression(target: string): string {
  // JSON string literals are valid Python string literals
  const encoded = JSON.stringify(path.resolve(target));
  return [
    "import bpy",
    `bpy.context.scene.render.filepath = ${encoded}`,
    "bpy.ops.render.render(write_still=True)",
  ].join("; ");
}

/**
 * Execute a scene build script inside headless Blender and diff the
 * AABB records it prints against the scene file's layouts.
 *
 * The inputs are only ever read. Objects are compared by name against
 * the layout table; a layout with no printed record is a ProtocolMismatch,
 * while extra printed objects are ignored. The report lists objects in
 * name order, so it does not depend on the script's print order.
 */
export async function runScript(
  scriptPath: string,
  scenePath: string,
  options: RunOptions = {},
): Promise<RunnerReport> {
  const script = path.resolve(scriptPath);
  const scene = path.resolve(scenePath);
  for (const input of [script, scene]) {
    if (!fs.existsSync(input)) {
      throw new Error(`input file not found: ${input}`);
    }
  }
  const layouts = loadSceneLayouts(scene);
  const blender = await findBlender(options.blenderPath);

  // --python-exit-code makes script exceptions surface as a nonzero exit;
  // by default Blender swallows them and exits 0.
  const args = ["--background", "--python-exit-code", "1", "--python", script];
  if (options.render) {
    args.push("--python-expr", renderExpression(options.render));
  }

  let stdout: string;
  try {
    const result = await execFileAsync(blender.path, args, {
      cwd: path.dirname(script),
      timeout: options.timeoutMs ?? 300_000,
      maxBuffer: 64 * 1024 * 1024,
    });
    stdout = result.stdout;
  } catch (err) {
    const failure = err as NodeJS.ErrnoException & {
      code?: number | string;
      killed?: boolean;
      stderr?: string;
    };
    const stderr = failure.stderr ?? "";
    if (failure.code === "ENOENT") {
      throw new BlenderNotFound(`could not launch ${blender.path}`);
    }
    if (failure.killed) {
      throw new ScriptCrashed(
        `blender timed out after ${options.timeoutMs ?? 300_000}ms`,
        null,
        stderr,
      );
    }
    const exitCode = typeof failure.code === "number" ? failure.code : null;
    throw new ScriptCrashed(
      `blender exited with code ${failure.code}`,
      exitCode,
      stderr,
    );
  }

  const printed = parseProtocol(stdout);
  const objects: ObjectRecord[] = [];
  for (const name of Object.keys(layouts).sort()) {
    const observed = printed.get(name);
    if (observed === undefined) {
      throw new ProtocolMismatch(`script output is missing object "${name}"`);
    }
    const expected = expectedWorldAabb(layouts[name]);
    objects.push({
      name,
      expected,
      observed,
      deviation: componentDeviation(observed, expected),
    });
  }
  const maxDeviation = objects.reduce((acc, o) => Math.max(acc, o.deviation), 0);

  const report: RunnerReport = {
    blenderVersion: blender.version,
    blenderExit: 0,
    objects,
    maxDeviation,
  };
  if (options.render) {
    const rendered = path.resolve(options.render);
    if (!fs.existsSync(rendered)) {
      throw new ScriptCrashed(
        `blender exited cleanly but wrote no render at ${rendered}`,
        0,
        "",
      );
    }
    report.renderPath = rendered;
  }
  return report;
}
