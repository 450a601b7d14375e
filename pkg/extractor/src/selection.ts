/** Burst frame selection, a faithful port of the core pipeline's rule.
 *
 * Frames are 1-based. Starting at startOffset, take up to `window`
 * consecutive frames, jump `stride` forward, repeat while the burst
 * start stays strictly below n. Trailers too short for any burst fall
 * back to at most `window` evenly spaced indices over [1, n], flagged.
 * The emitted index list must match the core CLI byte for byte, so the
 * fallback mirrors numpy linspace + round-half-to-even + dedupe.
 */

export interface FrameSelectionParams {
  startOffset: number;
  window: number;
  stride: number;
  fps: number;
  maxDuration: number;
}

export const DEFAULT_PARAMS: FrameSelectionParams = {
  startOffset: 50,
  window: 10,
  stride: 150,
  fps: 4,
  maxDuration: 180,
};

export interface FrameSelection {
  indices: number[];
  fallback: boolean;
}

export function maxFrames(params: FrameSelectionParams = DEFAULT_PARAMS): number {
  return params.fps * params.maxDuration;
}

export function clampFrameCount(
  rawFrames: number,
  params: FrameSelectionParams = DEFAULT_PARAMS,
): number {
  if (rawFrames < 0) throw new RangeError("frame count must be >= 0");
  return Math.min(rawFrames, maxFrames(params));
}

/** Round half to even, like numpy rint. */
function rint(x: number): number {
  const floor = Math.floor(x);
  const diff = x - floor;
  if (diff > 0.5) return floor + 1;
  if (diff < 0.5) return floor;
  return floor % 2 === 0 ? floor : floor + 1;
}

function fallbackIndices(n: number, params: FrameSelectionParams): number[] {
  const k = Math.min(params.window, n);
  if (k === 0) return [];
  // numpy linspace: arange(k) * step + start, with the endpoint pinned
  const values = new Array<number>(k);
  if (k === 1) {
    values[0] = 1;
  } else {
    const step = (n - 1) / (k - 1);
    for (let i = 0; i < k; i++) values[i] = 1 + i * step;
    values[k - 1] = n;
  }
  const unique: number[] = [];
  for (const v of values) {
    const r = rint(v);
    if (unique.length === 0 || unique[unique.length - 1]! !== r) unique.push(r);
  }
  return unique;
}

export function selectFrames(
  n: number,
  params: FrameSelectionParams = DEFAULT_PARAMS,
): FrameSelection {
  if (n < 0) throw new RangeError("frame count must be >= 0");
  const indices: number[] = [];
  for (let fStart = params.startOffset; fStart < n; fStart += params.stride) {
    for (let j = 0; j < params.window && fStart + j <= n; j++) {
      indices.push(fStart + j);
    }
  }
  if (indices.length === 0 && n > 0) {
    return { indices: fallbackIndices(n, params), fallback: true };
  }
  return { indices, fallback: false };
}

/** One index per line with a trailing newline, the core CLI's format. */
export function formatIndexList(indices: number[]): string {
  return indices.map((i) => `${i}\n`).join("");
}
