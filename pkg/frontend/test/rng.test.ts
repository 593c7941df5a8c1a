import { describe, expect, it } from "vitest";

import { fnv1a32, SeededRng, visitRng } from "../src/rng.js";

describe("fnv1a32", () => {
  // Published FNV-1a 32-bit test vectors (offset basis and single-byte input).
  it("matches the reference vectors", () => {
    expect(fnv1a32("")).toBe(0x811c9dc5);
    expect(fnv1a32("a")).toBe(0xe40c292c);
    expect(fnv1a32("foobar")).toBe(0xbf9cf968);
  });

  it("returns an unsigned 32-bit value", () => {
    for (const input of ["", "a", "dapp-000-example-com", "ÿþ"]) {
      const h = fnv1a32(input);
      expect(Number.isInteger(h)).toBe(true);
      expect(h).toBeGreaterThanOrEqual(0);
      expect(h).toBeLessThanOrEqual(0xffffffff);
    }
  });
});

describe("SeededRng", () => {
  it("is deterministic for a given seed", () => {
    const a = new SeededRng(1234);
    const b = new SeededRng(1234);
    const seqA = Array.from({ length: 20 }, () => a.next());
    const seqB = Array.from({ length: 20 }, () => b.next());
    expect(seqA).toEqual(seqB);
  });

  it("produces different streams for different seeds", () => {
    const a = new SeededRng(1);
    const b = new SeededRng(2);
    const seqA = Array.from({ length: 8 }, () => a.next());
    const seqB = Array.from({ length: 8 }, () => b.next());
    expect(seqA).not.toEqual(seqB);
  });

  it("next() stays in [0, 1)", () => {
    const rng = new SeededRng(99);
    for (let i = 0; i < 1000; i++) {
      const v = rng.next();
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThan(1);
    }
  });

  it("int(n) stays in [0, n) and hits every residue eventually", () => {
    const rng = new SeededRng(7);
    const seen = new Set<number>();
    for (let i = 0; i < 500; i++) {
      const v = rng.int(5);
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThan(5);
      seen.add(v);
    }
    expect(seen.size).toBe(5);
  });

  it("int() rejects non-positive or fractional bounds", () => {
    const rng = new SeededRng(0);
    expect(() => rng.int(0)).toThrow(RangeError);
    expect(() => rng.int(-3)).toThrow(RangeError);
    expect(() => rng.int(2.5)).toThrow(RangeError);
  });
});

describe("visitRng", () => {
  it("same (seed, visit id) replays the same stream", () => {
    const a = visitRng(42, "extension-000-keykeeper");
    const b = visitRng(42, "extension-000-keykeeper");
    expect(Array.from({ length: 10 }, () => a.int(100))).toEqual(
      Array.from({ length: 10 }, () => b.int(100)),
    );
  });

  it("different visit ids diverge under the same seed", () => {
    const a = visitRng(42, "extension-000-keykeeper");
    const b = visitRng(42, "extension-001-other");
    expect(Array.from({ length: 10 }, () => a.int(100))).not.toEqual(
      Array.from({ length: 10 }, () => b.int(100)),
    );
  });

  it("different seeds diverge for the same visit id", () => {
    const a = visitRng(1, "extension-000-keykeeper");
    const b = visitRng(2, "extension-000-keykeeper");
    expect(Array.from({ length: 10 }, () => a.int(100))).not.toEqual(
      Array.from({ length: 10 }, () => b.int(100)),
    );
  });
});
