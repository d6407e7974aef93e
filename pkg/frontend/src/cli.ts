#!/usr/bin/env node
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { runScript } from "./runner";
import {
  BlenderNotFound,
  DEVIATION_TOLERANCE,
  ProtocolMismatch,
  ScriptCrashed,
} from "./report";

// Exit codes: 0 round trip OK, 1 deviation above tolerance,
// 2 Blender not found, 3 Blender/script crash, 4 stdout protocol
// mismatch, 5 unusable inputs.

async function main(): Promise<number> {
  const argv = yargs(hideBin(process.argv))
    .scriptName("runner")
    .command("$0 <script> <scene>", "execute a scene build script in headless Blender and check the round trip", (cmd) =>
      cmd
        .positional("script", {
          describe: "emitted Blender build script (.py)",
          type: "string",
          demandOption: true,
        })
        .positional("scene", {
          describe: "scene document (.scene.json) to diff against",
          type: "string",
          demandOption: true,
        }),
    )
    .option("render", {
      type: "string",
      describe: "also save a camera-view render to this path",
    })
    .option("blender", {
      type: "string",
      describe: "Blender executable (default: $BLENDER, then PATH)",
    })
    .option("timeout", {
      type: "number",
      default: 300,
      describe: "kill Blender after this many seconds",
    })
    .strict()
    .parseSync();

  const report = await runScript(argv.script as string, argv.scene as string, {
    render: argv.render,
    blenderPath: argv.blender,
    timeoutMs: argv.timeout * 1000,
  });
  console.error(`blender: ${report.blenderVersion}`);
  console.error(`max deviation: ${report.maxDeviation} m over ${report.objects.length} objects`);
  console.log(JSON.stringify(report));
  return report.maxDeviation <= DEVIATION_TOLERANCE ? 0 : 1;
}

main()
  .then((code) => {
    process.exitCode = code;
  })
  .catch((err) => {
    if (err instanceof BlenderNotFound) {
      console.error(`error: ${err.name}: ${err.message}`);
      process.exitCode = 2;
    } else if (err instanceof ScriptCrashed) {
      console.error(`error: ${err.name}: ${err.message}`);
      if (err.stderr.trim()) {
        console.error(err.stderr.trimEnd());
      }
      process.exitCode = 3;
    } else if (err instanceof ProtocolMismatch) {
      console.error(`error: ${err.name}: ${err.message}`);
      process.exitCode = 4;
    } else {
      console.error(`error: ${(err as Error).message}`);
      process.exitCode = 5;
    }
  });
