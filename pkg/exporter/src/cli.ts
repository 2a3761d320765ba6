#!/usr/bin/env node
/**
 * Command-line entry point.
 *
 *   fselect-export --images <dir> --model grid-mean-8 \
 *       --features-out feats.fsel --labels-out labels.lsel \
 *       [--manifest-out manifest.json]
 *
 * The image directory must contain one subdirectory per class.  Exit
 * codes: 0 success, 2 bad usage, 1 runtime failure (model unavailable,
 * unreadable tree, I/O errors).
 */

import { parseArgs } from "node:util";

import { runExport } from "./export.js";

const USAGE =
  "usage: fselect-export --images <dir> --model <id> " +
  "--features-out <path> --labels-out <path> [--manifest-out <path>]";

export async function main(argv: string[]): Promise<number> {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        images: { type: "string" },
        model: { type: "string", default: "grid-mean-8" },
        "features-out": { type: "string" },
        "labels-out": { type: "string" },
        "manifest-out": { type: "string" },
        "batch-size": { type: "string", default: "16" },
      },
      strict: true,
    });
  } catch (err) {
    console.error(`${(err as Error).message}\n${USAGE}`);
    return 2;
  }
  const values = parsed.values;
  if (!values.images || !values["features-out"] || !values["labels-out"]) {
    console.error(USAGE);
    return 2;
  }
  try {
    const summary = await runExport({
      imageRoot: values.images,
      modelId: values.model!,
      featuresOut: values["features-out"],
      labelsOut: values["labels-out"],
      manifestOut: values["manifest-out"],
      batchSize: parseInt(values["batch-size"]!, 10),
    });
    console.log(
      `exported ${summary.rows} rows x ${summary.dim} dims over ` +
        `${summary.classNames.length} classes` +
        (summary.skipped.length ? ` (${summary.skipped.length} skipped)` : ""),
    );
    return 0;
  } catch (err) {
    console.error(`fselect-export: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
