import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { embed, generateWeights } from "../dist/backbone.js";
import { DecodeError, UsageError } from "../dist/errors.js";
import { extract } from "../dist/extract.js";
import { parseJobLine, parseJobsFile, runJobs } from "../dist/jobs.js";
import { readVgdf } from "../dist/vgdf.js";
import { reduceToHeight, toFrame } from "../dist/video.js";
import { makeClip, writeClip } from "./helpers.js";

const weights = generateWeights();

let dir: string;
beforeEach(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "extract-"));
});
afterEach(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

describe("extract", () => {
  it("flags the fallback on a 10-second clip and embeds the right frames", () => {
    // 24 fps, 10 s: 240 native frames -> 40 at 4 fps -> fallback selection
    const clip = makeClip(20, 12, 24, 240);
    const video = path.join(dir, "short.avi");
    writeClip(video, clip);
    const out = path.join(dir, "short.vgdf");

    const result = extract({ gameId: "short", video, out }, weights);
    expect(result.fallback).toBe(true);
    expect(result.framesClamped).toBe(40);
    expect(result.indices.length).toBe(10);

    const meta = JSON.parse(fs.readFileSync(`${out}.meta.json`, "utf-8"));
    expect(meta.fallback).toBe(true);
    expect(meta.game_id).toBe("short");
    expect(meta.native_frames).toBe(240);
    expect(meta.native_fps).toBe(24);
    expect(meta.frames_4fps).toBe(40);
    expect(meta.frames_clamped).toBe(40);
    expect(meta.frame_count).toBe(10);
    expect(meta.feature_dim).toBe(2048);
    expect(typeof meta.backbone_hash).toBe("string");

    const got = readVgdf(out);
    expect(got.gameId).toBe("short");
    expect(got.indices).toEqual(result.indices);
    expect(got.features.length).toBe(10 * 2048);

    // row r must be the embedding of 4 fps frame indices[r] (1-based);
    // the 4 fps stream picks native frame floor(k * 6)
    const first = result.indices[0]!;
    const native = clip.frames[(first - 1) * 6]!;
    const expected = embed(weights, reduceToHeight(toFrame(native, 20, 12), 360));
    expect(Buffer.from(got.features.slice(0, 2048).buffer)).toEqual(
      Buffer.from(expected.buffer),
    );
  });

  it("is deterministic across runs", () => {
    const video = path.join(dir, "clip.avi");
    writeClip(video, makeClip(16, 12, 4, 60));
    const outA = path.join(dir, "a.vgdf");
    const outB = path.join(dir, "b.vgdf");
    extract({ gameId: "g", video, out: outA }, weights);
    extract({ gameId: "g", video, out: outB }, weights);
    expect(fs.readFileSync(outA)).toEqual(fs.readFileSync(outB));
    expect(fs.readFileSync(`${outA}.meta.json`)).toEqual(
      fs.readFileSync(`${outB}.meta.json`),
    );
  });

  it("honors a custom target height", () => {
    const clip = makeClip(10, 40, 4, 60);
    const video = path.join(dir, "tall.avi");
    writeClip(video, clip);
    const out = path.join(dir, "tall.vgdf");
    const result = extract({ gameId: "tall", video, out, targetHeight: 20 }, weights);

    const first = result.indices[0]!;
    const expected = embed(
      weights,
      reduceToHeight(toFrame(clip.frames[first - 1]!, 10, 40), 20),
    );
    const got = readVgdf(out);
    expect(Buffer.from(got.features.slice(0, 2048).buffer)).toEqual(
      Buffer.from(expected.buffer),
    );
    expect(JSON.parse(fs.readFileSync(`${out}.meta.json`, "utf-8")).target_height).toBe(20);
  });

  it("wraps unreadable and undecodable inputs in DecodeError", () => {
    const out = path.join(dir, "x.vgdf");
    expect(() =>
      extract({ gameId: "x", video: path.join(dir, "missing.avi"), out }, weights),
    ).toThrow(DecodeError);

    const garbage = path.join(dir, "garbage.avi");
    fs.writeFileSync(garbage, Buffer.from("not a video at all"));
    expect(() => extract({ gameId: "x", video: garbage, out }, weights)).toThrow(
      DecodeError,
    );
    expect(fs.existsSync(out)).toBe(false);
  });
});

describe("jobs", () => {
  it("parses line-delimited JSON jobs, skipping blanks and comments", () => {
    const file = path.join(dir, "jobs.jsonl");
    fs.writeFileSync(
      file,
      [
        "# trailer batch",
        "",
        '{"game_id": "a", "video": "a.avi", "out": "a.vgdf"}',
        '{"game_id": "b", "video": "b.avi", "out": "b.vgdf", "target_height": 240}',
        "",
      ].join("\n"),
    );
    const jobs = parseJobsFile(file);
    expect(jobs.length).toBe(2);
    expect(jobs[0]).toEqual({ gameId: "a", video: "a.avi", out: "a.vgdf" });
    expect(jobs[1]!.targetHeight).toBe(240);
  });

  it("reports bad lines by number", () => {
    expect(() => parseJobLine("{oops", 3)).toThrow(/line 3: not valid JSON/);
    expect(() => parseJobLine("[1]", 7)).toThrow(/line 7: expected an object/);
    expect(() => parseJobLine('{"game_id": "a"}', 2)).toThrow(/missing string field "video"/);
    expect(() =>
      parseJobLine('{"game_id": "a", "video": "v", "out": "o", "target_height": -1}', 5),
    ).toThrow(UsageError);
  });

  it("runs every job in order", () => {
    const video = path.join(dir, "clip.avi");
    writeClip(video, makeClip(16, 12, 4, 60));
    const jobs = [
      { gameId: "one", video, out: path.join(dir, "one.vgdf") },
      { gameId: "two", video, out: path.join(dir, "two.vgdf") },
    ];
    const results = runJobs(jobs, weights);
    expect(results.map((r) => r.gameId)).toEqual(["one", "two"]);
    expect(readVgdf(jobs[0]!.out).gameId).toBe("one");
    expect(readVgdf(jobs[1]!.out).gameId).toBe("two");
  });
});
