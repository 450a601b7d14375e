/** Deterministic stand-in for a pretrained image backbone.
 *
 * A single tanh projection from a letterboxed 16x16 RGB input to the
 * 2048-wide feature space the pipeline expects. Weights are generated
 * from a fixed seed, cached on disk, and pinned by hash: extraction
 * refuses to run if the cache is missing or its bytes do not hash to
 * the pinned value, mirroring how real backbone weights would be
 * fetched once and verified.
 */

import { createHash } from "node:crypto";
import * as fs from "node:fs";
import * as path from "node:path";

import { BackboneUnavailable } from "./errors.js";
import { letterbox, type Frame } from "./video.js";

export const FEATURE_DIM = 2048;
export const INPUT_SIZE = 16;
const INPUT_DIM = INPUT_SIZE * INPUT_SIZE * 3;
const WEIGHT_COUNT = FEATURE_DIM * INPUT_DIM + FEATURE_DIM;

export const WEIGHTS_FILE = `backbone-${INPUT_SIZE}x${INPUT_SIZE}-${FEATURE_DIM}.v1.bin`;
export const PINNED_HASH =
  "7b4ec6039823d84ec15763a0ce9313dfe930619ced16bdd448f331eb5e908abf";

/** xoshiro128** seeded by splitmix32; uint32 math only, so the stream
 * is identical on every platform. */
function makeRng(seed: number): () => number {
  let sm = seed >>> 0;
  const splitmix = () => {
    sm = (sm + 0x9e3779b9) >>> 0;
    let z = sm;
    z = Math.imul(z ^ (z >>> 16), 0x21f0aaad) >>> 0;
    z = Math.imul(z ^ (z >>> 15), 0x735a2d97) >>> 0;
    return (z ^ (z >>> 15)) >>> 0;
  };
  let s0 = splitmix();
  let s1 = splitmix();
  let s2 = splitmix();
  let s3 = splitmix();
  const rotl = (v: number, k: number) => ((v << k) | (v >>> (32 - k))) >>> 0;
  return () => {
    const result = (Math.imul(rotl(Math.imul(s1, 5) >>> 0, 7), 9) >>> 0) >>> 0;
    const t = (s1 << 9) >>> 0;
    s2 = (s2 ^ s0) >>> 0;
    s3 = (s3 ^ s1) >>> 0;
    s1 = (s1 ^ s2) >>> 0;
    s0 = (s0 ^ s3) >>> 0;
    s2 = (s2 ^ t) >>> 0;
    s3 = rotl(s3, 11);
    return result;
  };
}

export function generateWeights(): Float32Array {
  const next = makeRng(0x56474446); // "VGDF"
  const scale = Math.sqrt(6 / (INPUT_DIM + FEATURE_DIM));
  const weights = new Float32Array(WEIGHT_COUNT);
  for (let i = 0; i < FEATURE_DIM * INPUT_DIM; i++) {
    const u = next() / 0x1_0000_0000; // [0, 1)
    weights[i] = (2 * u - 1) * scale;
  }
  // biases stay zero
  return weights;
}

export function weightsHash(weights: Float32Array): string {
  const bytes = new Uint8Array(weights.buffer, weights.byteOffset, weights.byteLength);
  return createHash("sha256").update(bytes).digest("hex");
}

export function weightsPath(cacheDir: string): string {
  return path.join(cacheDir, WEIGHTS_FILE);
}

/** Generate and cache the weights; returns the pinned hash. */
export function fetchWeights(cacheDir: string): string {
  const weights = generateWeights();
  const hash = weightsHash(weights);
  fs.mkdirSync(cacheDir, { recursive: true });
  const target = weightsPath(cacheDir);
  const tmp = `${target}.tmp.${process.pid}`;
  fs.writeFileSync(tmp, new Uint8Array(weights.buffer));
  fs.renameSync(tmp, target);
  return hash;
}

export function loadWeights(cacheDir: string): Float32Array {
  const target = weightsPath(cacheDir);
  let bytes: Buffer;
  try {
    bytes = fs.readFileSync(target);
  } catch {
    throw new BackboneUnavailable(
      `backbone weights not cached at ${target}; run fetch-backbone first`,
    );
  }
  if (bytes.length !== WEIGHT_COUNT * 4) {
    throw new BackboneUnavailable(`backbone cache has wrong size: ${bytes.length} bytes`);
  }
  const weights = new Float32Array(bytes.buffer.slice(bytes.byteOffset, bytes.byteOffset + bytes.length));
  const hash = weightsHash(weights);
  if (hash !== PINNED_HASH) {
    throw new BackboneUnavailable(
      `backbone cache fails the pinned hash (got ${hash.slice(0, 12)}...)`,
    );
  }
  return weights;
}

/** Letterbox to the square input and project: tanh(W x + b). */
export function embed(weights: Float32Array, frame: Frame): Float32Array {
  const input = letterbox(frame, INPUT_SIZE).pixels;
  const out = new Float32Array(FEATURE_DIM);
  for (let o = 0; o < FEATURE_DIM; o++) {
    let acc = weights[FEATURE_DIM * INPUT_DIM + o]!;
    const row = o * INPUT_DIM;
    for (let i = 0; i < INPUT_DIM; i++) {
      acc += weights[row + i]! * input[i]!;
    }
    out[o] = Math.tanh(acc);
  }
  return out;
}
