import { describe, expect, it } from "vitest";

import { readAvi, writeAvi, type RawVideo } from "../dist/avi.js";
import { DecodeError } from "../dist/errors.js";

function patternFrame(width: number, height: number, salt: number): Uint8Array {
  const out = new Uint8Array(width * height * 3);
  for (let i = 0; i < out.length; i++) out[i] = (i * 7 + salt * 13) % 256;
  return out;
}

function makeVideo(width: number, height: number, fps: number, count: number): RawVideo {
  const frames: Uint8Array[] = [];
  for (let k = 0; k < count; k++) frames.push(patternFrame(width, height, k));
  return { width, height, fps, frames };
}

function find(bytes: Uint8Array, text: string): number {
  const target = [...text].map((c) => c.charCodeAt(0));
  outer: for (let i = 0; i + target.length <= bytes.length; i++) {
    for (let j = 0; j < target.length; j++) {
      if (bytes[i + j] !== target[j]) continue outer;
    }
    return i;
  }
  throw new Error(`fourcc ${text} not found`);
}

describe("writeAvi / readAvi", () => {
  it("round-trips frames exactly, including padded odd widths", () => {
    for (const [w, h] of [
      [16, 12],
      [15, 9], // stride padding path
      [32, 24],
    ] as const) {
      const video = makeVideo(w, h, 24, 5);
      const got = readAvi(writeAvi(video));
      expect(got.width).toBe(w);
      expect(got.height).toBe(h);
      expect(got.fps).toBe(24);
      expect(got.frames.length).toBe(5);
      for (let k = 0; k < 5; k++) {
        expect(Buffer.from(got.frames[k]!)).toEqual(Buffer.from(video.frames[k]!));
      }
    }
  });

  it("accepts '00dc' chunk ids as frames too", () => {
    const bytes = writeAvi(makeVideo(8, 8, 4, 2));
    const at = find(bytes, "00db");
    bytes[at + 3] = "c".charCodeAt(0);
    const got = readAvi(bytes);
    expect(got.frames.length).toBe(2);
  });

  it("rejects non-AVI bytes", () => {
    expect(() => readAvi(new Uint8Array([1, 2, 3]))).toThrow(DecodeError);
    const bytes = writeAvi(makeVideo(8, 8, 4, 2));
    bytes[0] = 0x00; // break RIFF magic
    expect(() => readAvi(bytes)).toThrow(/not a RIFF/);
  });

  it("rejects truncated files", () => {
    const bytes = writeAvi(makeVideo(8, 8, 4, 3));
    expect(() => readAvi(bytes.subarray(0, bytes.length - 40))).toThrow(DecodeError);
  });

  it("rejects compressed or non-24-bit streams", () => {
    const bytes = writeAvi(makeVideo(8, 8, 4, 2));
    const strf = find(bytes, "strf");
    const view = new DataView(bytes.buffer, bytes.byteOffset);
    view.setUint32(strf + 8 + 16, 1, true); // biCompression = BI_RLE8
    expect(() => readAvi(bytes)).toThrow(/unsupported codec/);

    const again = writeAvi(makeVideo(8, 8, 4, 2));
    const strf2 = find(again, "strf");
    new DataView(again.buffer, again.byteOffset).setUint16(strf2 + 8 + 14, 8, true);
    expect(() => readAvi(again)).toThrow(/unsupported codec/);
  });

  it("rejects an AVI without frames", () => {
    const bytes = writeAvi({ ...makeVideo(8, 8, 4, 2), frames: [] });
    expect(() => readAvi(bytes)).toThrow(/no frames/);
  });

  it("rejects bad writer inputs", () => {
    expect(() => writeAvi(makeVideo(0, 8, 4, 1))).toThrow(RangeError);
    expect(() =>
      writeAvi({ width: 8, height: 8, fps: 4, frames: [new Uint8Array(10)] }),
    ).toThrow(/frame byte length/);
  });
});
