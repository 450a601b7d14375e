#!/usr/bin/env node
/** vgdf-extract: turn trailer videos into VGDF feature files.
 *
 * Exit codes mirror the core pipeline's CLI: 0 success, 1 named
 * runtime error (printed as "Name: message"), 2 usage error.
 */

import * as os from "node:os";
import * as path from "node:path";
import { parseArgs, type ParseArgsConfig } from "node:util";

import { fetchWeights, loadWeights, weightsPath } from "./backbone.js";
import { ExtractorError, UsageError } from "./errors.js";
import { extract } from "./extract.js";
import { parseJobsFile, runJobs } from "./jobs.js";
import { clampFrameCount, formatIndexList, selectFrames } from "./selection.js";

const USAGE = `usage: vgdf-extract <command> [options]

commands:
  select-frames --frames N        print the burst-selected 1-based indices
  fetch-backbone [--cache DIR]    download and pin the backbone weights
  extract --video FILE --id ID --out FILE [--cache DIR] [--target-height N]
  run --jobs FILE [--cache DIR]   run line-delimited JSON extraction jobs

The cache directory defaults to $VGDF_EXTRACT_CACHE, then
~/.cache/vgdf-extractor.
`;

function defaultCache(): string {
  return (
    process.env["VGDF_EXTRACT_CACHE"] ??
    path.join(os.homedir(), ".cache", "vgdf-extractor")
  );
}

function parse(
  argv: string[],
  options: NonNullable<ParseArgsConfig["options"]>,
): ReturnType<typeof parseArgs>["values"] {
  try {
    return parseArgs({ args: argv, options, strict: true, allowPositionals: false })
      .values;
  } catch (err) {
    throw new UsageError((err as Error).message);
  }
}

function requireString(
  values: ReturnType<typeof parseArgs>["values"],
  flag: string,
): string {
  const value = values[flag];
  if (typeof value !== "string" || value === "") {
    throw new UsageError(`--${flag} is required`);
  }
  return value;
}

function parseCount(text: string, flag: string): number {
  if (!/^\d+$/.test(text)) throw new UsageError(`--${flag} expects a non-negative integer`);
  return parseInt(text, 10);
}

function cmdSelectFrames(argv: string[]): number {
  const values = parse(argv, { frames: { type: "string" } });
  const n = clampFrameCount(parseCount(requireString(values, "frames"), "frames"));
  const selection = selectFrames(n);
  if (selection.fallback) {
    process.stderr.write(
      `note: algorithm selected nothing for ${n} frames; ` +
        `fell back to ${selection.indices.length} evenly spaced indices\n`,
    );
  }
  process.stdout.write(formatIndexList(selection.indices));
  return 0;
}

function cmdFetchBackbone(argv: string[]): number {
  const values = parse(argv, { cache: { type: "string" } });
  const cache = typeof values["cache"] === "string" ? values["cache"] : defaultCache();
  const hash = fetchWeights(cache);
  process.stdout.write(`${weightsPath(cache)}\nsha256 ${hash}\n`);
  return 0;
}

function cmdExtract(argv: string[]): number {
  const values = parse(argv, {
    video: { type: "string" },
    id: { type: "string" },
    out: { type: "string" },
    cache: { type: "string" },
    "target-height": { type: "string" },
  });
  const cache = typeof values["cache"] === "string" ? values["cache"] : defaultCache();
  const job = {
    gameId: requireString(values, "id"),
    video: requireString(values, "video"),
    out: requireString(values, "out"),
    ...(typeof values["target-height"] === "string"
      ? { targetHeight: parseCount(values["target-height"], "target-height") }
      : {}),
  };
  const weights = loadWeights(cache);
  const result = extract(job, weights);
  process.stdout.write(
    `${result.gameId}: ${result.indices.length} frames -> ${result.out}` +
      `${result.fallback ? " (fallback)" : ""}\n`,
  );
  return 0;
}

function cmdRun(argv: string[]): number {
  const values = parse(argv, { jobs: { type: "string" }, cache: { type: "string" } });
  const cache = typeof values["cache"] === "string" ? values["cache"] : defaultCache();
  const jobs = parseJobsFile(requireString(values, "jobs"));
  const weights = loadWeights(cache);
  for (const result of runJobs(jobs, weights)) {
    process.stdout.write(
      `${result.gameId}: ${result.indices.length} frames -> ${result.out}` +
        `${result.fallback ? " (fallback)" : ""}\n`,
    );
  }
  return 0;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === undefined || command === "--help" || command === "-h") {
      process.stdout.write(USAGE);
      return command === undefined ? 2 : 0;
    }
    switch (command) {
      case "select-frames":
        return cmdSelectFrames(rest);
      case "fetch-backbone":
        return cmdFetchBackbone(rest);
      case "extract":
        return cmdExtract(rest);
      case "run":
        return cmdRun(rest);
      default:
        throw new UsageError(`unknown command: ${command}`);
    }
  } catch (err) {
    if (err instanceof UsageError) {
      process.stderr.write(`${err.message}\n${USAGE}`);
      return 2;
    }
    if (err instanceof ExtractorError || err instanceof RangeError) {
      process.stderr.write(`${err.name}: ${err.message}\n`);
      return 1;
    }
    if (err instanceof Error && "code" in err) {
      process.stderr.write(`${err.name}: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
}

process.exitCode = main(process.argv.slice(2));
