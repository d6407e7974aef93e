import { execFile } from "child_process";
import path from "path";
import { promisify } from "util";
import { BlenderNotFound } from "./report";

const execFileAsync = promisify(execFile);

export interface BlenderInfo {
  path: string;
  version: string;
}

/**
 * Locate the Blender executable and read its version banner.
 * Resolution order: explicit argument, then the BLENDER environment
 * variable, then `blender` on PATH.
 */
export async function findBlender(explicit?: string): Promise<BlenderInfo> {
  let candidate = explicit ?? process.env.BLENDER ?? "blender";
  if (candidate.includes(path.sep)) {
    // the runner later spawns from the script's directory, so a relative
    // path must be pinned down before the working directory changes
    candidate = path.resolve(candidate);
  }
  try {
    const { stdout } = await execFileAsync(candidate, ["--version"], {
      timeout: 30_000,
    });
    const version = stdout.split(/\r?\n/)[0]?.trim() ?? "";
    if (!version.toLowerCase().startsWith("blender")) {
      throw new BlenderNotFound(
        `${candidate} --version did not identify itself as Blender: ${version}`,
      );
    }
    return { path: candidate, version };
  } catch (err) {
    if (err instanceof BlenderNotFound) {
      throw err;
    }
    throw new BlenderNotFound(
      `could not run ${candidate} --version: ${(err as Error).message}`,
    );
  }
}
