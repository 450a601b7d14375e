/** Batch driver: one JSON job per line, so manifests stream and a bad
 * line is reportable by number. */

import * as fs from "node:fs";

import { UsageError } from "./errors.js";
import { extract, type ExtractionJob, type ExtractionResult } from "./extract.js";

export function parseJobLine(line: string, lineNo: number): ExtractionJob {
  let parsed: unknown;
  try {
    parsed = JSON.parse(line);
  } catch {
    throw new UsageError(`jobs line ${lineNo}: not valid JSON`);
  }
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    throw new UsageError(`jobs line ${lineNo}: expected an object`);
  }
  const rec = parsed as Record<string, unknown>;
  for (const key of ["game_id", "video", "out"]) {
    if (typeof rec[key] !== "string" || rec[key] === "") {
      throw new UsageError(`jobs line ${lineNo}: missing string field "${key}"`);
    }
  }
  const job: ExtractionJob = {
    gameId: rec["game_id"] as string,
    video: rec["video"] as string,
    out: rec["out"] as string,
  };
  if (rec["target_height"] !== undefined) {
    if (typeof rec["target_height"] !== "number" || rec["target_height"] < 1) {
      throw new UsageError(`jobs line ${lineNo}: target_height must be a positive number`);
    }
    job.targetHeight = rec["target_height"];
  }
  return job;
}

export function parseJobsFile(jobsPath: string): ExtractionJob[] {
  const text = fs.readFileSync(jobsPath, "utf-8");
  const jobs: ExtractionJob[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i]!.trim();
    if (line === "" || line.startsWith("#")) continue;
    jobs.push(parseJobLine(line, i + 1));
  }
  return jobs;
}

export function runJobs(jobs: ExtractionJob[], weights: Float32Array): ExtractionResult[] {
  return jobs.map((job) => extract(job, weights));
}
