import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { readVgdf } from "../dist/vgdf.js";
import { makeClip, writeClip } from "./helpers.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const CLI = path.join(here, "..", "dist", "cli.js");

function run(...args: string[]) {
  return spawnSync("node", [CLI, ...args], { encoding: "utf-8" });
}

let dir: string;
let cache: string;
let video: string;
beforeAll(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "cli-"));
  cache = path.join(dir, "cache");
  video = path.join(dir, "clip.avi");
  writeClip(video, makeClip(16, 12, 4, 60));
});
afterAll(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

describe("usage errors exit 2", () => {
  it("no command prints usage", () => {
    const got = run();
    expect(got.status).toBe(2);
    expect(got.stdout).toContain("usage: vgdf-extract");
  });

  it("--help exits 0", () => {
    const got = run("--help");
    expect(got.status).toBe(0);
    expect(got.stdout).toContain("select-frames");
  });

  it("unknown command, unknown flag, bad or missing values", () => {
    expect(run("transmogrify").status).toBe(2);
    expect(run("select-frames", "--frames", "10", "--bogus").status).toBe(2);
    expect(run("select-frames", "--frames", "ten").status).toBe(2);
    expect(run("select-frames").status).toBe(2);
    expect(run("extract", "--video", video).status).toBe(2);
  });
});

describe("runtime errors exit 1 with a named message", () => {
  it("extract without cached weights", () => {
    const got = run(
      "extract",
      "--video", video,
      "--id", "g",
      "--out", path.join(dir, "g.vgdf"),
      "--cache", path.join(dir, "empty-cache"),
    );
    expect(got.status).toBe(1);
    expect(got.stderr).toMatch(/^BackboneUnavailable: /);
  });

  it("extract of a non-video", () => {
    fs.mkdirSync(cache, { recursive: true });
    expect(run("fetch-backbone", "--cache", cache).status).toBe(0);
    const garbage = path.join(dir, "garbage.avi");
    fs.writeFileSync(garbage, "nope");
    const got = run(
      "extract",
      "--video", garbage,
      "--id", "g",
      "--out", path.join(dir, "g.vgdf"),
      "--cache", cache,
    );
    expect(got.status).toBe(1);
    expect(got.stderr).toMatch(/^DecodeError: /);
  });
});

describe("happy paths", () => {
  it("select-frames prints indices only", () => {
    const got = run("select-frames", "--frames", "60");
    expect(got.status).toBe(0);
    expect(got.stdout).toBe(
      [50, 51, 52, 53, 54, 55, 56, 57, 58, 59].map((i) => `${i}\n`).join(""),
    );
    expect(got.stderr).toBe("");
  });

  it("fetch-backbone reports the pinned hash and path", () => {
    const got = run("fetch-backbone", "--cache", cache);
    expect(got.status).toBe(0);
    expect(got.stdout).toContain(cache);
    expect(got.stdout).toMatch(/sha256 [0-9a-f]{64}/);
  });

  it("extract then run produce files and summaries", () => {
    expect(run("fetch-backbone", "--cache", cache).status).toBe(0);
    const out = path.join(dir, "one.vgdf");
    const got = run("extract", "--video", video, "--id", "one", "--out", out, "--cache", cache);
    expect(got.status).toBe(0);
    expect(got.stdout).toBe(`one: 10 frames -> ${out}\n`);
    expect(readVgdf(out).gameId).toBe("one");

    const jobs = path.join(dir, "jobs.jsonl");
    const out2 = path.join(dir, "two.vgdf");
    fs.writeFileSync(
      jobs,
      `{"game_id": "two", "video": ${JSON.stringify(video)}, "out": ${JSON.stringify(out2)}}\n`,
    );
    const ran = run("run", "--jobs", jobs, "--cache", cache);
    expect(ran.status).toBe(0);
    expect(ran.stdout).toBe(`two: 10 frames -> ${out2}\n`);
    expect(fs.existsSync(`${out2}.meta.json`)).toBe(true);
  });
});
