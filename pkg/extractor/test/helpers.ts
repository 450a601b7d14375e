import * as fs from "node:fs";

import { writeAvi, type RawVideo } from "../dist/avi.js";

/** Deterministic little clip: every frame gets a distinct pattern. */
export function makeClip(
  width: number,
  height: number,
  fps: number,
  frameCount: number,
): RawVideo {
  const frames: Uint8Array[] = [];
  for (let k = 0; k < frameCount; k++) {
    const frame = new Uint8Array(width * height * 3);
    for (let i = 0; i < frame.length; i++) frame[i] = (i * 3 + k * 31) % 256;
    frames.push(frame);
  }
  return { width, height, fps, frames };
}

export function writeClip(path: string, video: RawVideo): void {
  fs.writeFileSync(path, writeAvi(video));
}
