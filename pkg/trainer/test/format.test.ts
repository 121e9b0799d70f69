import * as tf from "@tensorflow/tfjs";
import { describe, expect, it } from "vitest";

import { makeRng, oneHot } from "../src/dataset";
import { exportModel } from "../src/export";
import { classify, logit, RnnModelFile, step, initialState, validateModel } from "../src/format";
import { buildModel } from "../src/model";

function sigmoid(z: number): number {
  return 1 / (1 + Math.exp(-z));
}

async function tfProbability(model: tf.Sequential, word: number[], width: number): Promise<number> {
  const xs = tf.tensor3d([oneHot(word, width)], [1, word.length, width]);
  try {
    const out = model.predict(xs) as tf.Tensor;
    const value = (await out.data())[0];
    out.dispose();
    return value;
  } finally {
    xs.dispose();
  }
}

function randomWords(rng: () => number, width: number, count: number, maxLen: number): number[][] {
  return Array.from({ length: count }, () => {
    const length = 1 + Math.floor(rng() * maxLen);
    return Array.from({ length }, () => Math.floor(rng() * width));
  });
}

describe("exported weights reproduce tfjs inference", () => {
  it("elman stack", async () => {
    const model = buildModel("elman", 3, 4, 2, 11);
    const doc = await exportModel(model, "elman", ["a", "b", "c"]);
    const rng = makeRng(1);
    for (const word of randomWords(rng, 3, 60, 12)) {
      const expected = await tfProbability(model, word, 3);
      const ours = sigmoid(logit(doc, word));
      expect(Math.abs(ours - expected)).toBeLessThan(2e-5);
    }
  });

  it("lstm with sigmoid gates", async () => {
    const model = buildModel("lstm", 2, 3, 1, 7);
    const doc = await exportModel(model, "lstm", ["a", "b"]);
    const rng = makeRng(2);
    for (const word of randomWords(rng, 2, 60, 12)) {
      const expected = await tfProbability(model, word, 2);
      const ours = sigmoid(logit(doc, word));
      expect(Math.abs(ours - expected)).toBeLessThan(2e-5);
    }
  });

  it("classifications agree away from the threshold", async () => {
    const model = buildModel("lstm", 2, 3, 2, 13);
    const doc = await exportModel(model, "lstm", ["a", "b"]);
    const rng = makeRng(3);
    for (const word of randomWords(rng, 2, 80, 15)) {
      const p = await tfProbability(model, word, 2);
      if (Math.abs(p - 0.5) > 1e-4) {
        expect(classify(doc, word)).toBe(p >= 0.5);
      }
    }
  });
});

describe("reference forward pass", () => {
  const tiny: RnnModelFile = {
    format: "rnn v1",
    cell: "elman",
    alphabet: ["a"],
    layers: [{ w_in: [[1.0]], w_rec: [[0.5]], b: [0.0] }],
    h0: [[0.0]],
    readout: { w: [1.0], b: -0.5, threshold: 0.5 },
  };

  it("hand-computed elman values", () => {
    const s1 = step(tiny, initialState(tiny), 0);
    expect(s1.h[0][0]).toBeCloseTo(Math.tanh(1.0), 12);
    const s2 = step(tiny, s1, 0);
    expect(s2.h[0][0]).toBeCloseTo(Math.tanh(0.5 * Math.tanh(1.0) + 1.0), 12);
  });

  it("empty word uses the initial state", () => {
    expect(logit(tiny, [])).toBeCloseTo(-0.5, 12);
    expect(classify(tiny, [])).toBe(false);
    expect(classify(tiny, [0])).toBe(true);
  });

  it("validate rejects shape mismatches", () => {
    const broken = JSON.parse(JSON.stringify(tiny)) as RnnModelFile;
    broken.layers[0].w_rec = [[0.5, 0.1]];
    expect(() => validateModel(broken)).toThrow(/layer 0/);
  });

  it("validate rejects non-finite weights", () => {
    const broken = JSON.parse(JSON.stringify(tiny)) as RnnModelFile;
    broken.readout.b = Number.NaN;
    expect(() => validateModel(broken)).toThrow(/non-finite/);
  });
});
