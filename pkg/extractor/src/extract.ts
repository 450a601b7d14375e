/** Extraction pipeline: decode a trailer, pick burst frames, embed them,
 * and emit a VGDF file the core pipeline can consume directly.
 *
 * Preprocessing order matters for index agreement with the core CLI:
 * the native stream is resampled to 4 fps first, the frame count is
 * clamped to 3 minutes, and burst selection runs on that count. Each
 * selected frame is reduced to 360p (reduction only) before embedding.
 * A sidecar `<out>.meta.json` records the fallback flag and provenance;
 * the VGDF format itself has no room for it.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { readAvi } from "./avi.js";
import { embed, FEATURE_DIM, weightsHash } from "./backbone.js";
import { DecodeError } from "./errors.js";
import {
  clampFrameCount,
  DEFAULT_PARAMS,
  selectFrames,
  type FrameSelectionParams,
} from "./selection.js";
import { preprocess, reduceToHeight, TARGET_HEIGHT, toFrame } from "./video.js";
import { writeVgdf } from "./vgdf.js";

export interface ExtractionJob {
  gameId: string;
  /** Path to the trailer video (uncompressed AVI). */
  video: string;
  /** Destination VGDF path; `<out>.meta.json` is written next to it. */
  out: string;
  params?: FrameSelectionParams;
  targetHeight?: number;
}

export interface ExtractionResult {
  gameId: string;
  out: string;
  indices: number[];
  fallback: boolean;
  framesClamped: number;
}

export function extract(job: ExtractionJob, weights: Float32Array): ExtractionResult {
  const params = job.params ?? DEFAULT_PARAMS;
  const targetHeight = job.targetHeight ?? TARGET_HEIGHT;

  let bytes: Uint8Array;
  try {
    bytes = fs.readFileSync(job.video);
  } catch (err) {
    throw new DecodeError(`cannot read ${job.video}: ${(err as Error).message}`);
  }
  const video = readAvi(bytes);
  const clip = preprocess(video);
  const n = clampFrameCount(clip.frames4fps.length, params);
  const selection = selectFrames(n, params);

  const features = new Float32Array(selection.indices.length * FEATURE_DIM);
  for (let row = 0; row < selection.indices.length; row++) {
    const raw = clip.frames4fps[selection.indices[row]! - 1]!;
    const frame = reduceToHeight(toFrame(raw, clip.width, clip.height), targetHeight);
    features.set(embed(weights, frame), row * FEATURE_DIM);
  }

  const dir = path.dirname(job.out);
  if (dir) fs.mkdirSync(dir, { recursive: true });
  writeVgdf(job.out, job.gameId, selection.indices, features);
  writeMeta(`${job.out}.meta.json`, {
    backbone_hash: weightsHash(weights),
    fallback: selection.fallback,
    feature_dim: FEATURE_DIM,
    frame_count: selection.indices.length,
    frames_4fps: clip.frames4fps.length,
    frames_clamped: n,
    game_id: job.gameId,
    native_fps: clip.nativeFps,
    native_frames: clip.nativeFrames,
    target_height: targetHeight,
  });

  return {
    gameId: job.gameId,
    out: job.out,
    indices: selection.indices,
    fallback: selection.fallback,
    framesClamped: n,
  };
}

function writeMeta(metaPath: string, meta: Record<string, unknown>): void {
  const sorted = Object.fromEntries(
    Object.entries(meta).sort(([a], [b]) => (a < b ? -1 : 1)),
  );
  const tmp = `${metaPath}.tmp.${process.pid}`;
  fs.writeFileSync(tmp, JSON.stringify(sorted, null, 2) + "\n");
  fs.renameSync(tmp, metaPath);
}
