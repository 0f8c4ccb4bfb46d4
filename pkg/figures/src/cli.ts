#!/usr/bin/env node
/** render_figures <micro|canonical|postselect> --data <dir> --out <dir> */
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { SchemaError } from "./csv";
import { Family, renderFamily } from "./render";

async function main(): Promise<number> {
  const argv = await yargs(hideBin(process.argv))
    .command("$0 <family>", "render one figure family from CSV data", (y) =>
      y.positional("family", {
        choices: ["micro", "canonical", "postselect"] as const,
        demandOption: true,
      })
    )
    .option("data", { type: "string", demandOption: true, describe: "directory with haarcode CSV outputs" })
    .option("out", { type: "string", demandOption: true, describe: "directory for rendered SVGs" })
    .strict()
    .parse();

  try {
    const out = renderFamily(argv.family as Family, argv.data, argv.out);
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

main().then((code) => {
  process.exitCode = code;
});
