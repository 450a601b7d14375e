/** Frame preprocessing: 4 fps resampling, 360p reduction, letterboxing.
 *
 * All pixel math runs in float64 so repeated extraction of the same
 * video is bit-identical. Resizing is bilinear with pixel-center
 * alignment; 360p is a reduction only (smaller sources pass through).
 */

import type { RawVideo } from "./avi.js";

export interface Frame {
  width: number;
  height: number;
  /** RGB in [0, 1], top-down, length width*height*3. */
  pixels: Float64Array;
}

export const TARGET_FPS = 4;
export const TARGET_HEIGHT = 360;

export function toFrame(bytes: Uint8Array, width: number, height: number): Frame {
  const pixels = new Float64Array(bytes.length);
  for (let i = 0; i < bytes.length; i++) pixels[i] = bytes[i]! / 255.0;
  return { width, height, pixels };
}

/** Indices into the native stream for a 4 fps resample: frame k sits at
 * time k/4 s, mapped to floor(k * nativeFps / 4). */
export function resampleIndices(nativeCount: number, nativeFps: number): number[] {
  if (nativeFps <= 0) throw new RangeError("fps must be positive");
  const out: number[] = [];
  const step = nativeFps / TARGET_FPS;
  for (let k = 0; ; k++) {
    const src = Math.floor(k * step);
    if (src >= nativeCount) break;
    out.push(src);
  }
  return out;
}

export function bilinearResize(frame: Frame, outWidth: number, outHeight: number): Frame {
  const { width, height, pixels } = frame;
  const out = new Float64Array(outWidth * outHeight * 3);
  const sx = width / outWidth;
  const sy = height / outHeight;
  for (let y = 0; y < outHeight; y++) {
    const fy = Math.min(Math.max((y + 0.5) * sy - 0.5, 0), height - 1);
    const y0 = Math.floor(fy);
    const y1 = Math.min(y0 + 1, height - 1);
    const wy = fy - y0;
    for (let x = 0; x < outWidth; x++) {
      const fx = Math.min(Math.max((x + 0.5) * sx - 0.5, 0), width - 1);
      const x0 = Math.floor(fx);
      const x1 = Math.min(x0 + 1, width - 1);
      const wx = fx - x0;
      for (let c = 0; c < 3; c++) {
        const p00 = pixels[(y0 * width + x0) * 3 + c]!;
        const p01 = pixels[(y0 * width + x1) * 3 + c]!;
        const p10 = pixels[(y1 * width + x0) * 3 + c]!;
        const p11 = pixels[(y1 * width + x1) * 3 + c]!;
        const top = p00 + (p01 - p00) * wx;
        const bottom = p10 + (p11 - p10) * wx;
        out[(y * outWidth + x) * 3 + c] = top + (bottom - top) * wy;
      }
    }
  }
  return { width: outWidth, height: outHeight, pixels: out };
}

/** Reduce to the target height, preserving aspect; never upscales. */
export function reduceToHeight(frame: Frame, targetHeight: number = TARGET_HEIGHT): Frame {
  if (frame.height <= targetHeight) return frame;
  const outWidth = Math.max(1, Math.round((frame.width * targetHeight) / frame.height));
  return bilinearResize(frame, outWidth, targetHeight);
}

/** Square crop-free fit: scale the long side to `size`, pad with black. */
export function letterbox(frame: Frame, size: number): Frame {
  const scale = size / Math.max(frame.width, frame.height);
  const innerW = Math.max(1, Math.round(frame.width * scale));
  const innerH = Math.max(1, Math.round(frame.height * scale));
  const inner = bilinearResize(frame, innerW, innerH);
  const out = new Float64Array(size * size * 3);
  const offX = Math.floor((size - innerW) / 2);
  const offY = Math.floor((size - innerH) / 2);
  for (let y = 0; y < innerH; y++) {
    for (let x = 0; x < innerW; x++) {
      for (let c = 0; c < 3; c++) {
        out[((y + offY) * size + (x + offX)) * 3 + c] =
          inner.pixels[(y * innerW + x) * 3 + c]!;
      }
    }
  }
  return { width: size, height: size, pixels: out };
}

export interface PreprocessedVideo {
  nativeFrames: number;
  nativeFps: number;
  /** Frames at 4 fps, original resolution kept until a frame is used. */
  frames4fps: Uint8Array[];
  width: number;
  height: number;
}

export function preprocess(video: RawVideo): PreprocessedVideo {
  const picks = resampleIndices(video.frames.length, video.fps);
  return {
    nativeFrames: video.frames.length,
    nativeFps: video.fps,
    frames4fps: picks.map((i) => video.frames[i]!),
    width: video.width,
    height: video.height,
  };
}
