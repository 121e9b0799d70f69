/**
 * CLI: `trainer synthetic --config file.json` / `trainer contact --config file.json`.
 *
 * Exit codes: 0 trained and gate passed, 3 accuracy gate failed (callers
 * re-roll the instance), 1 error.
 */

import * as fs from "fs";

import { train, TrainConfig } from "./train";

function usage(): never {
  console.error("usage: trainer <synthetic|contact> --config <file.json>");
  process.exit(1);
}

export async function main(argv: string[]): Promise<number> {
  const [kind, flag, configPath] = argv;
  if ((kind !== "synthetic" && kind !== "contact") || flag !== "--config" || !configPath) {
    usage();
  }
  const config = JSON.parse(fs.readFileSync(configPath, "utf-8")) as TrainConfig;
  config.kind = kind;
  const metrics = await train(config);
  console.log(JSON.stringify(metrics, null, 1));
  if (!metrics.gate_passed) {
    console.error(
      `accuracy gate failed: ${metrics.train_accuracy.toFixed(4)} <= ${metrics.gate}`,
    );
    return 3;
  }
  return 0;
}

if (require.main === module) {
  main(process.argv.slice(2)).then(
    (code) => process.exit(code),
    (err) => {
      console.error(err instanceof Error ? err.message : String(err));
      process.exit(1);
    },
  );
}
