/**
 * Deterministic RNG for page interaction. Each visit derives its stream
 * from (global seed, visit_id), so a rerun with the same seed replays the
 * same click sequence on the same fixture.
 */

export function fnv1a32(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

export class SeededRng {
  private state: number;

  constructor(seed: number) {
    this.state = seed >>> 0;
  }

  /** Uniform float in [0, 1) (mulberry32). */
  next(): number {
    this.state = (this.state + 0x6d2b79f5) >>> 0;
    let t = this.state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  }

  /** Uniform integer in [0, n). */
  int(n: number): number {
    if (!Number.isInteger(n) || n <= 0) {
      throw new RangeError(`int() needs a positive bound, got ${n}`);
    }
    return Math.floor(this.next() * n);
  }
}

export function visitRng(globalSeed: number, visitId: string): SeededRng {
  return new SeededRng((fnv1a32(visitId) ^ (globalSeed >>> 0)) >>> 0);
}
