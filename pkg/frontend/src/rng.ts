// Deterministic 64-bit generator (splitmix64). The server simulates with
// the exact same stream, so every operation here must stay bit-identical:
// a Weyl step on the golden-gamma constant, two multiply-xorshift folds.
// BigInt keeps the 64-bit arithmetic exact.

const MASK64 = (1n << 64n) - 1n;
const GAMMA = 0x9e3779b97f4a7c15n;
const MIX1 = 0xbf58476d1ce4e5b9n;
const MIX2 = 0x94d049bb133111ebn;

export class Rng {
  state: bigint;

  constructor(state: bigint | number = 0n) {
    this.state = BigInt(state) & MASK64;
  }

  nextU64(): bigint {
    this.state = (this.state + GAMMA) & MASK64;
    let z = this.state;
    z = ((z ^ (z >> 30n)) * MIX1) & MASK64;
    z = ((z ^ (z >> 27n)) * MIX2) & MASK64;
    return z ^ (z >> 31n);
  }

  /** Next value reduced mod n (n must be positive). */
  below(n: number): number {
    if (n <= 0) {
      throw new RangeError("modulus must be positive");
    }
    return Number(this.nextU64() % BigInt(n));
  }

  choice<T>(seq: readonly T[]): T {
    if (seq.length === 0) {
      throw new RangeError("empty sequence");
    }
    return seq[this.below(seq.length)];
  }

  clone(): Rng {
    return new Rng(this.state);
  }
}

/** Fresh unpredictable 64-bit seed for runs without a fixed one. */
export function randomSeed(): bigint {
  const buf = new BigUint64Array(1);
  globalThis.crypto.getRandomValues(buf);
  return buf[0];
}
