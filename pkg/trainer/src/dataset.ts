/** TSV word datasets: `label<TAB>letter letter ...`, one example per line. */

import * as fs from "fs";

export interface Dataset {
  alphabet: string[];
  words: number[][];
  labels: number[];
}

export function parseDataset(path: string, alphabet?: string[]): Dataset {
  const text = fs.readFileSync(path, "utf-8");
  const rawWords: string[][] = [];
  const labels: number[] = [];
  const seen = new Set<string>();
  text.split("\n").forEach((line, index) => {
    if (!line) return;
    const parts = line.split("\t");
    if (parts.length !== 2) throw new Error(`${path}:${index + 1}: expected label<TAB>letters`);
    const label = Number(parts[0]);
    if (label !== 0 && label !== 1) throw new Error(`${path}:${index + 1}: bad label ${parts[0]}`);
    const letters = parts[1] === "" ? [] : parts[1].split(" ");
    letters.forEach((l) => seen.add(l));
    rawWords.push(letters);
    labels.push(label);
  });
  const letters = alphabet ?? [...seen].sort();
  const index = new Map(letters.map((l, i) => [l, i]));
  const words = rawWords.map((w, row) =>
    w.map((l) => {
      const i = index.get(l);
      if (i === undefined) throw new Error(`${path}:${row + 1}: letter ${l} not in alphabet`);
      return i;
    }),
  );
  return { alphabet: letters, words, labels };
}

/** Group example indices by word length so batches need no padding. */
export function bucketByLength(words: number[][]): Map<number, number[]> {
  const buckets = new Map<number, number[]>();
  words.forEach((w, i) => {
    const bucket = buckets.get(w.length);
    if (bucket) bucket.push(i);
    else buckets.set(w.length, [i]);
  });
  return buckets;
}

export function oneHot(word: number[], width: number): number[][] {
  return word.map((letter) => {
    const row = new Array(width).fill(0);
    row[letter] = 1;
    return row;
  });
}

/** Deterministic PRNG (mulberry32) so shuffling and sampling are seedable. */
export function makeRng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function shuffled<T>(items: T[], rng: () => number): T[] {
  const out = items.slice();
  for (let i = out.length - 1; i > 0; i--) {
    const j = Math.floor(rng() * (i + 1));
    [out[i], out[j]] = [out[j], out[i]];
  }
  return out;
}
