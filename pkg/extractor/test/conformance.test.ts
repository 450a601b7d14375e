/** Cross-component conformance: the extractor must agree byte for byte
 * with the core pipeline's CLI on frame selection, and its VGDF output
 * must load through the core reader with D=2048. The core is exercised
 * only through its public surfaces (the CLI and the file format); both
 * sides run as subprocesses, the way they meet in production.
 */

import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { writeAvi } from "../dist/avi.js";
import { fetchWeights, loadWeights } from "../dist/backbone.js";
import { extract } from "../dist/extract.js";
import { makeClip } from "./helpers.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const CLI = path.join(here, "..", "dist", "cli.js");
const FIXTURE = path.join(here, "..", "fixtures", "trailer-10s.avi");

// the core pipeline runs with its portable numerics backend so these
// spawns do not pay a JIT warmup
const CORE_ENV = { ...process.env, VGSCORE_NUMBA: "0" };

function coreSelectFrames(n: number): { stdout: string; stderr: string } {
  const got = spawnSync("python3", ["-m", "vgscore.cli", "select-frames", "--frames", `${n}`], {
    encoding: "utf-8",
    env: CORE_ENV,
  });
  expect(got.status).toBe(0);
  return { stdout: got.stdout, stderr: got.stderr };
}

function sidecarSelectFrames(n: number): { stdout: string; stderr: string } {
  const got = spawnSync("node", [CLI, "select-frames", "--frames", `${n}`], {
    encoding: "utf-8",
  });
  expect(got.status).toBe(0);
  return { stdout: got.stdout, stderr: got.stderr };
}

function coreReadVgdf(file: string): { game_id: string; indices: number[]; shape: number[] } {
  const script = [
    "import json, sys",
    "from vgscore.features import read_feature_file",
    "mat = read_feature_file(sys.argv[1])",
    'print(json.dumps({"game_id": mat.game_id,',
    '                  "indices": list(mat.frame_indices),',
    '                  "shape": list(mat.features.shape)}))',
  ].join("\n");
  const got = spawnSync("python3", ["-c", script, file], {
    encoding: "utf-8",
    env: CORE_ENV,
  });
  expect(got.stderr).toBe("");
  expect(got.status).toBe(0);
  return JSON.parse(got.stdout);
}

let dir: string;
let cache: string;
beforeAll(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "conform-"));
  cache = path.join(dir, "cache");
  fetchWeights(cache);
});
afterAll(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

describe("select-frames parity with the core CLI", () => {
  it("emits byte-identical index lists across regimes", () => {
    // covers empty, fallback, burst boundaries, cap, and over-cap clamp
    for (const n of [0, 1, 7, 40, 50, 51, 300, 719, 720, 100000]) {
      const core = coreSelectFrames(n);
      const ours = sidecarSelectFrames(n);
      expect(ours.stdout, `frames=${n}`).toBe(core.stdout);
      expect(ours.stderr.length > 0, `fallback note, frames=${n}`).toBe(
        core.stderr.length > 0,
      );
    }
  }, 120_000);
});

describe("bundled 10-second clip", () => {
  it("is the deterministic clip the helpers describe", () => {
    // fixture provenance: regenerate and compare, so the committed bytes
    // can never drift from the documented construction
    const regenerated = writeAvi(makeClip(16, 12, 24, 240));
    expect(fs.readFileSync(FIXTURE)).toEqual(Buffer.from(regenerated));
  });

  it("extracts a fallback-flagged list identical to the core CLI", () => {
    const weights = loadWeights(cache);
    const out = path.join(dir, "short.vgdf");
    const result = extract({ gameId: "short", video: FIXTURE, out }, weights);

    expect(result.fallback).toBe(true);
    const meta = JSON.parse(fs.readFileSync(`${out}.meta.json`, "utf-8"));
    expect(meta.fallback).toBe(true);

    // 240 native frames at 24 fps resample to 40 at 4 fps
    expect(meta.frames_clamped).toBe(40);
    const core = coreSelectFrames(40);
    expect(core.stderr).toContain("fell back");
    expect(result.indices.map((i) => `${i}\n`).join("")).toBe(core.stdout);

    // and the core must read the file back: same id, indices, D=2048
    const loaded = coreReadVgdf(out);
    expect(loaded.game_id).toBe("short");
    expect(loaded.indices).toEqual(result.indices);
    expect(loaded.shape).toEqual([result.indices.length, 2048]);
  }, 120_000);
});

describe("three-minute clip", () => {
  it("yields exactly 50 rows, in time, and reads back through the core", () => {
    const weights = loadWeights(cache);
    const video = path.join(dir, "long.avi");
    // 3 minutes at 24 fps: 4320 native frames resample to 720 at 4 fps
    fs.writeFileSync(video, writeAvi(makeClip(16, 12, 24, 4320)));
    const out = path.join(dir, "long.vgdf");

    const started = Date.now();
    const result = extract({ gameId: "long", video, out }, weights);
    const elapsed = Date.now() - started;

    const meta = JSON.parse(fs.readFileSync(`${out}.meta.json`, "utf-8"));
    expect(meta.frames_4fps).toBe(720);
    expect(result.fallback).toBe(false);
    expect(result.indices.length).toBe(50);
    expect(elapsed).toBeLessThan(120_000); // budget with cached weights

    const core = coreSelectFrames(720);
    expect(result.indices.map((i) => `${i}\n`).join("")).toBe(core.stdout);

    const loaded = coreReadVgdf(out);
    expect(loaded.shape).toEqual([50, 2048]);
    expect(loaded.indices).toEqual(result.indices);
  }, 180_000);

  it("re-extraction is byte-identical", () => {
    const weights = loadWeights(cache);
    const video = path.join(dir, "again.avi");
    fs.writeFileSync(video, writeAvi(makeClip(16, 12, 4, 720)));
    const outA = path.join(dir, "again-a.vgdf");
    const outB = path.join(dir, "again-b.vgdf");
    extract({ gameId: "again", video, out: outA }, weights);
    extract({ gameId: "again", video, out: outB }, weights);
    expect(fs.readFileSync(outA)).toEqual(fs.readFileSync(outB));
  }, 180_000);
});
