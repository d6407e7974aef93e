import { z } from "zod";
import { Aabb, ProtocolMismatch } from "./report";

const vec3 = z.tuple([z.number(), z.number(), z.number()]);

const lineSchema = z.object({
  name: z.string().min(1),
  min: vec3,
  max: vec3,
});

/**
 * Extract the per-object AABB records from a Blender stdout capture.
 *
 * Blender interleaves its own chatter (version banner, import notices,
 * "Blender quit") with the script's output, so only lines that start with
 * "{" are treated as protocol lines. Those must parse; anything else on
 * such a line is a ProtocolMismatch. Later records win on duplicate names.
 */
export function parseProtocol(stdout: string): Map<string, Aabb> {
  const records = new Map<string, Aabb>();
  for (const rawLine of stdout.split(/\r?\n/)) {
    const line = rawLine.trim();
    if (!line.startsWith("{")) {
      continue;
    }
    let parsed: unknown;
    try {
      parsed = JSON.parse(line);
    } catch {
      throw new ProtocolMismatch(`unparseable stdout line: ${line}`);
    }
    const record = lineSchema.safeParse(parsed);
    if (!record.success) {
      const first = record.error.issues[0];
      const where = first.path.join("/") || "(root)";
      throw new ProtocolMismatch(`bad AABB record (${where}: ${first.message}): ${line}`);
    }
    records.set(record.data.name, {
      min: record.data.min,
      max: record.data.max,
    });
  }
  return records;
}
