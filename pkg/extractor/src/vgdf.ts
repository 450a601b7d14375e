/** VGDF writer (and a reader for tests), matching the core pipeline's
 * normative little-endian layout:
 *
 *   magic "VGDF" | version u32=1 | M u32 | D u32 | id_len u32
 *   | id bytes | M x u32 indices (1-based, ascending) | M x D float32
 *
 * Writes are atomic (temp file + rename).
 */

import * as fs from "node:fs";

import { DecodeError } from "./errors.js";
import { FEATURE_DIM } from "./backbone.js";

const MAGIC = "VGDF";
const VERSION = 1;

export function encodeVgdf(
  gameId: string,
  indices: number[],
  features: Float32Array,
): Uint8Array {
  const m = indices.length;
  if (features.length !== m * FEATURE_DIM) {
    throw new RangeError(
      `feature payload ${features.length} does not match ${m} x ${FEATURE_DIM}`,
    );
  }
  for (let i = 1; i < m; i++) {
    if (indices[i]! <= indices[i - 1]!) {
      throw new RangeError("frame indices must be strictly ascending");
    }
  }
  const id = new TextEncoder().encode(gameId);
  const total = 20 + id.length + 4 * m + 4 * m * FEATURE_DIM;
  const out = new Uint8Array(total);
  const view = new DataView(out.buffer);
  out.set(new TextEncoder().encode(MAGIC), 0);
  view.setUint32(4, VERSION, true);
  view.setUint32(8, m, true);
  view.setUint32(12, FEATURE_DIM, true);
  view.setUint32(16, id.length, true);
  out.set(id, 20);
  let at = 20 + id.length;
  for (const index of indices) {
    view.setUint32(at, index, true);
    at += 4;
  }
  for (let i = 0; i < features.length; i++) {
    view.setFloat32(at, features[i]!, true);
    at += 4;
  }
  return out;
}

export function writeVgdf(
  path: string,
  gameId: string,
  indices: number[],
  features: Float32Array,
): void {
  const tmp = `${path}.tmp.${process.pid}`;
  fs.writeFileSync(tmp, encodeVgdf(gameId, indices, features));
  fs.renameSync(tmp, path);
}

export interface VgdfContents {
  gameId: string;
  indices: number[];
  features: Float32Array; // M x D row-major
}

export function readVgdf(path: string): VgdfContents {
  const bytes = fs.readFileSync(path);
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  if (bytes.length < 20 || bytes.toString("latin1", 0, 4) !== MAGIC) {
    throw new DecodeError("not a VGDF file");
  }
  if (view.getUint32(4, true) !== VERSION) {
    throw new DecodeError("unsupported VGDF version");
  }
  const m = view.getUint32(8, true);
  const d = view.getUint32(12, true);
  if (d !== FEATURE_DIM) throw new DecodeError(`expected D=${FEATURE_DIM}, got ${d}`);
  const idLen = view.getUint32(16, true);
  const expected = 20 + idLen + 4 * m + 4 * m * d;
  if (bytes.length !== expected) {
    throw new DecodeError(`expected ${expected} bytes, file has ${bytes.length}`);
  }
  const gameId = bytes.toString("utf-8", 20, 20 + idLen);
  const indices: number[] = [];
  let at = 20 + idLen;
  for (let i = 0; i < m; i++) {
    indices.push(view.getUint32(at, true));
    at += 4;
  }
  const features = new Float32Array(m * d);
  for (let i = 0; i < features.length; i++) {
    features[i] = view.getFloat32(at, true);
    at += 4;
  }
  return { gameId, indices, features };
}
