import { describe, expect, it } from "vitest";
import * as zlib from "node:zlib";

import { adler32, crc32, encodeGrayPng } from "../src/png.js";
import { chunkCrcs, decodeGrayPng } from "./pngDecode.js";

function randomSamples(n: number, seed: number): Uint8Array {
  // small LCG keeps the fixtures deterministic
  const out = new Uint8Array(n);
  let s = seed >>> 0;
  for (let i = 0; i < n; i++) {
    s = (s * 1664525 + 1013904223) >>> 0;
    out[i] = s >>> 24;
  }
  return out;
}

describe("crc32", () => {
  it("matches the classic IEND vector", () => {
    const iend = new Uint8Array([0x49, 0x45, 0x4e, 0x44]);
    expect(crc32(iend)).toBe(0xae426082);
  });

  it("matches the published check value for '123456789'", () => {
    const data = new TextEncoder().encode("123456789");
    expect(crc32(data)).toBe(0xcbf43926);
  });

  it("matches zlib on random buffers", () => {
    for (const seed of [1, 2, 3]) {
      const data = randomSamples(4096 + seed, seed);
      expect(crc32(data)).toBe(Number(zlib.crc32(data)));
    }
  });

  it("of the empty buffer is 0", () => {
    expect(crc32(new Uint8Array(0))).toBe(0);
  });
});

describe("adler32", () => {
  it("matches the published check value for 'Wikipedia'", () => {
    const data = new TextEncoder().encode("Wikipedia");
    expect(adler32(data)).toBe(0x11e60398);
  });

  it("of the empty buffer is 1", () => {
    expect(adler32(new Uint8Array(0))).toBe(1);
  });

  it("survives long high-valued inputs without overflow drift", () => {
    // reference: fold with the textbook per-byte mod
    const data = new Uint8Array(300000).fill(255);
    let a = 1;
    let b = 0;
    for (const v of data) {
      a = (a + v) % 65521;
      b = (b + a) % 65521;
    }
    expect(adler32(data)).toBe(((b << 16) | a) >>> 0);
  });
});

describe("encodeGrayPng", () => {
  it("round-trips samples through an independent decoder", () => {
    const samples = randomSamples(31 * 17, 9);
    const png = encodeGrayPng(31, 17, samples);
    const dec = decodeGrayPng(png);
    expect(dec.width).toBe(31);
    expect(dec.height).toBe(17);
    expect(dec.bitDepth).toBe(8);
    expect(dec.colorType).toBe(0);
    expect(Array.from(dec.samples)).toEqual(Array.from(samples));
  });

  it("starts with the PNG signature and ends with IEND", () => {
    const png = encodeGrayPng(3, 2, new Uint8Array(6));
    expect(Array.from(png.subarray(0, 8))).toEqual([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
    const types = chunkCrcs(png).map((c) => c.type);
    expect(types).toEqual(["IHDR", "IDAT", "IEND"]);
  });

  it("stores a valid CRC for every chunk", () => {
    const png = encodeGrayPng(8, 8, randomSamples(64, 4));
    for (const c of chunkCrcs(png)) {
      expect(c.stored).toBe(Number(zlib.crc32(c.body)));
    }
  });

  it("splits raw data above 65535 bytes into multiple stored blocks", () => {
    // 300x300 plus filter bytes is 90300 raw bytes, two deflate blocks
    const samples = randomSamples(300 * 300, 11);
    const dec = decodeGrayPng(encodeGrayPng(300, 300, samples));
    expect(Array.from(dec.samples)).toEqual(Array.from(samples));
  });

  it("handles 1x1 images", () => {
    const dec = decodeGrayPng(encodeGrayPng(1, 1, new Uint8Array([77])));
    expect(dec.width).toBe(1);
    expect(dec.height).toBe(1);
    expect(dec.samples[0]).toBe(77);
  });

  it("is deterministic", () => {
    const samples = randomSamples(20 * 10, 5);
    const a = encodeGrayPng(20, 10, samples);
    const b = encodeGrayPng(20, 10, samples);
    expect(Buffer.from(a).equals(Buffer.from(b))).toBe(true);
  });

  it("rejects dimension and sample-count mismatches", () => {
    expect(() => encodeGrayPng(0, 4, new Uint8Array(0))).toThrow(RangeError);
    expect(() => encodeGrayPng(4, -1, new Uint8Array(0))).toThrow(RangeError);
    expect(() => encodeGrayPng(2.5 as number, 4, new Uint8Array(10))).toThrow(RangeError);
    expect(() => encodeGrayPng(3, 3, new Uint8Array(8))).toThrow(RangeError);
  });
});
