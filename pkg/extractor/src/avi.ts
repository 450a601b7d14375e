/** Minimal AVI (RIFF) reader and writer for uncompressed 24-bit video.
 *
 * Only the subset needed for trailer decoding: one 'vids' stream of
 * BI_RGB bottom-up DIB frames in '00db'/'00dc' chunks. The writer
 * exists so tests can synthesize clips; this sandbox has no system
 * video utility to delegate to, so decoding is done in-process behind
 * the same interface a subprocess decoder would fill.
 */

import { DecodeError } from "./errors.js";

/** Frames are RGB24, top-down, tightly packed (width*height*3). */
export interface RawVideo {
  width: number;
  height: number;
  fps: number;
  frames: Uint8Array[];
}

const FOURCC = {
  RIFF: 0x46464952,
  AVI: 0x20495641,
  LIST: 0x5453494c,
  hdrl: 0x6c726468,
  avih: 0x68697661,
  strl: 0x6c727473,
  strh: 0x68727473,
  strf: 0x66727473,
  movi: 0x69766f6d,
  vids: 0x73646976,
  db00: 0x62643030, // '00db'
  dc00: 0x63643030, // '00dc'
} as const;

function fourcc(text: string): number {
  return (
    text.charCodeAt(0) |
    (text.charCodeAt(1) << 8) |
    (text.charCodeAt(2) << 16) |
    (text.charCodeAt(3) << 24)
  );
}

function rowStride(width: number): number {
  return (width * 3 + 3) & ~3; // DIB rows pad to 4 bytes
}

class Writer {
  private parts: Uint8Array[] = [];
  private length = 0;

  u32(value: number): void {
    const b = new Uint8Array(4);
    new DataView(b.buffer).setUint32(0, value >>> 0, true);
    this.push(b);
  }

  push(bytes: Uint8Array): void {
    this.parts.push(bytes);
    this.length += bytes.length;
  }

  chunk(id: string, body: Uint8Array): void {
    this.u32(fourcc(id));
    this.u32(body.length);
    this.push(body);
    if (body.length % 2 === 1) this.push(new Uint8Array(1)); // RIFF pads to even
  }

  concat(): Uint8Array {
    const out = new Uint8Array(this.length);
    let at = 0;
    for (const part of this.parts) {
      out.set(part, at);
      at += part.length;
    }
    return out;
  }
}

function u32s(...values: number[]): Uint8Array {
  const out = new Uint8Array(values.length * 4);
  const view = new DataView(out.buffer);
  values.forEach((v, i) => view.setUint32(i * 4, v >>> 0, true));
  return out;
}

function list(kind: string, body: Uint8Array): Uint8Array {
  const w = new Writer();
  w.u32(FOURCC.LIST);
  w.u32(body.length + 4);
  w.u32(fourcc(kind));
  w.push(body);
  return w.concat();
}

export function writeAvi(video: RawVideo): Uint8Array {
  const { width, height, fps, frames } = video;
  if (width <= 0 || height <= 0 || fps <= 0) throw new RangeError("bad dimensions");
  const stride = rowStride(width);
  const frameBytes = stride * height;

  const avih = u32s(
    Math.round(1_000_000 / fps), // dwMicroSecPerFrame
    frameBytes * fps, // dwMaxBytesPerSec
    0, // dwPaddingGranularity
    0, // dwFlags
    frames.length,
    0, // dwInitialFrames
    1, // dwStreams
    frameBytes, // dwSuggestedBufferSize
    width,
    height,
    0, 0, 0, 0,
  );

  const strh = new Writer();
  strh.u32(FOURCC.vids);
  strh.u32(fourcc("DIB "));
  strh.push(u32s(0, 0, 0)); // flags, priority+language, initial frames
  strh.push(u32s(1, fps)); // dwScale, dwRate -> fps = rate/scale
  strh.push(u32s(0, frames.length, frameBytes, 0xffffffff, 0)); // start, length, bufsize, quality, samplesize
  strh.push(new Uint8Array(8)); // rcFrame

  const strf = new Writer(); // BITMAPINFOHEADER
  strf.push(u32s(40, width, height)); // biSize, biWidth, biHeight (bottom-up)
  const planesBits = new Uint8Array(4);
  new DataView(planesBits.buffer).setUint16(0, 1, true);
  new DataView(planesBits.buffer).setUint16(2, 24, true);
  strf.push(planesBits);
  strf.push(u32s(0, frameBytes, 0, 0, 0, 0)); // BI_RGB, size, ppm x2, clrUsed, clrImportant

  const strlBody = new Writer();
  strlBody.chunk("strh", strh.concat());
  strlBody.chunk("strf", strf.concat());

  const hdrlBody = new Writer();
  hdrlBody.chunk("avih", avih);
  hdrlBody.push(list("strl", strlBody.concat()));

  const moviBody = new Writer();
  for (const frame of frames) {
    if (frame.length !== width * height * 3) {
      throw new RangeError("frame byte length does not match dimensions");
    }
    const dib = new Uint8Array(frameBytes);
    for (let y = 0; y < height; y++) {
      const srcRow = (height - 1 - y) * width * 3; // bottom-up
      for (let x = 0; x < width; x++) {
        const s = srcRow + x * 3;
        const d = y * stride + x * 3;
        dib[d] = frame[s + 2]!; // BGR
        dib[d + 1] = frame[s + 1]!;
        dib[d + 2] = frame[s]!;
      }
    }
    moviBody.chunk("00db", dib);
  }

  const riffBody = new Writer();
  riffBody.push(list("hdrl", hdrlBody.concat()));
  riffBody.push(list("movi", moviBody.concat()));

  const out = new Writer();
  out.u32(FOURCC.RIFF);
  const body = riffBody.concat();
  out.u32(body.length + 4);
  out.u32(FOURCC.AVI);
  out.push(body);
  return out.concat();
}

class Reader {
  readonly view: DataView;
  constructor(readonly bytes: Uint8Array) {
    this.view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  }

  u32(at: number): number {
    if (at + 4 > this.bytes.length) throw new DecodeError("truncated file");
    return this.view.getUint32(at, true);
  }

  u16(at: number): number {
    if (at + 2 > this.bytes.length) throw new DecodeError("truncated file");
    return this.view.getUint16(at, true);
  }

  slice(at: number, size: number): Uint8Array {
    if (at + size > this.bytes.length) throw new DecodeError("truncated chunk");
    return this.bytes.subarray(at, at + size);
  }
}

interface Header {
  width: number;
  height: number;
  fps: number;
}

function parseHdrl(r: Reader, at: number, end: number): Header {
  let width = 0;
  let height = 0;
  let fps = 0;
  let sawFormat = false;
  while (at + 8 <= end) {
    const id = r.u32(at);
    const size = r.u32(at + 4);
    const body = at + 8;
    if (id === FOURCC.avih) {
      width = r.u32(body + 32);
      height = r.u32(body + 36);
    } else if (id === FOURCC.LIST && r.u32(body) === FOURCC.strl) {
      let sat = body + 4;
      const send = body + size;
      let isVideo = false;
      while (sat + 8 <= send) {
        const sid = r.u32(sat);
        const ssize = r.u32(sat + 4);
        const sbody = sat + 8;
        if (sid === FOURCC.strh) {
          isVideo = r.u32(sbody) === FOURCC.vids;
          if (isVideo) {
            const scale = r.u32(sbody + 20);
            const rate = r.u32(sbody + 24);
            if (scale === 0) throw new DecodeError("zero time scale in stream header");
            fps = rate / scale;
          }
        } else if (sid === FOURCC.strf && isVideo) {
          const bits = r.u16(sbody + 14);
          const compression = r.u32(sbody + 16);
          if (bits !== 24 || compression !== 0) {
            throw new DecodeError(
              `unsupported codec: ${bits}-bit, compression ${compression} (only 24-bit BI_RGB)`,
            );
          }
          sawFormat = true;
        }
        sat = sbody + ssize + (ssize % 2);
      }
    }
    at = body + size + (size % 2);
  }
  if (width <= 0 || height <= 0) throw new DecodeError("missing or empty avih header");
  if (fps <= 0) throw new DecodeError("no video stream header");
  if (!sawFormat) throw new DecodeError("no video stream format");
  return { width, height, fps };
}

function dibToRgb(dib: Uint8Array, width: number, height: number): Uint8Array {
  const stride = rowStride(width);
  if (dib.length < stride * height) throw new DecodeError("frame chunk too short");
  const out = new Uint8Array(width * height * 3);
  for (let y = 0; y < height; y++) {
    const srcRow = (height - 1 - y) * stride;
    for (let x = 0; x < width; x++) {
      const s = srcRow + x * 3;
      const d = (y * width + x) * 3;
      out[d] = dib[s + 2]!;
      out[d + 1] = dib[s + 1]!;
      out[d + 2] = dib[s]!;
    }
  }
  return out;
}

export function readAvi(bytes: Uint8Array): RawVideo {
  const r = new Reader(bytes);
  if (bytes.length < 12 || r.u32(0) !== FOURCC.RIFF || r.u32(8) !== FOURCC.AVI) {
    throw new DecodeError("not a RIFF/AVI file");
  }
  const end = Math.min(bytes.length, 8 + r.u32(4));
  let header: Header | null = null;
  const frames: Uint8Array[] = [];
  let at = 12;
  while (at + 8 <= end) {
    const id = r.u32(at);
    const size = r.u32(at + 4);
    const body = at + 8;
    if (id === FOURCC.LIST) {
      const kind = r.u32(body);
      if (kind === FOURCC.hdrl) {
        header = parseHdrl(r, body + 4, body + size);
      } else if (kind === FOURCC.movi) {
        if (header === null) throw new DecodeError("frames before header");
        let mat = body + 4;
        const mend = body + size;
        while (mat + 8 <= mend) {
          const cid = r.u32(mat);
          const csize = r.u32(mat + 4);
          if (cid === FOURCC.db00 || cid === FOURCC.dc00) {
            frames.push(dibToRgb(r.slice(mat + 8, csize), header.width, header.height));
          }
          mat += 8 + csize + (csize % 2);
        }
      }
    }
    at = body + size + (size % 2);
  }
  if (header === null) throw new DecodeError("no header list");
  if (frames.length === 0) throw new DecodeError("no frames");
  return { width: header.width, height: header.height, fps: header.fps, frames };
}
