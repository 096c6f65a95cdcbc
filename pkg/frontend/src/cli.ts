#!/usr/bin/env node
/**
 * simlb-plot --kind {line|bar|vm_allocation|hourly} --in CSV --out SVG
 *            [--title T]
 *
 * Exit codes: 0 success, 1 bad input (missing file, schema mismatch,
 * empty CSV).
 */

import { writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { KINDS, Kind, render } from "./plots.js";
import { EmptyInput, SchemaMismatch } from "./schema.js";

export function main(argv: string[]): number {
  const args = yargs(argv)
    .option("kind", {
      choices: KINDS as unknown as Kind[],
      demandOption: true,
      describe: "plot kind",
    })
    .option("in", {
      type: "string",
      demandOption: true,
      describe: "input CSV written by simlb",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output SVG path",
    })
    .option("title", { type: "string", describe: "chart title" })
    .strict()
    .exitProcess(false)
    .parseSync();

  try {
    const svg = render(args.kind, args.in, args.title);
    writeFileSync(args.out, svg);
  } catch (err) {
    if (err instanceof SchemaMismatch || err instanceof EmptyInput ||
        (err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }
  console.log(`${args.kind} chart written to ${args.out}`);
  return 0;
}

import { pathToFileURL } from "node:url";

if (process.argv[1] !== undefined &&
    import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(hideBin(process.argv)));
}
