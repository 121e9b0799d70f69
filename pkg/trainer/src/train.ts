/**
 * Training loop: length-bucketed batches (no padding), an accuracy gate that
 * is evaluated on the exported weights via the reference forward pass, and
 * metrics/golden-set emission.
 */

import * as fs from "fs";
import * as path from "path";
import * as tf from "@tensorflow/tfjs";

import { bucketByLength, Dataset, makeRng, oneHot, parseDataset, shuffled } from "./dataset";
import { classify, logit, RnnModelFile } from "./format";
import { buildModel, contactHidden, contactLayers, syntheticHidden, syntheticLayers } from "./model";
import { exportModel, writeModel } from "./export";

export interface TrainConfig {
  kind: "synthetic" | "contact";
  train: string;
  test: string;
  cell: "elman" | "lstm";
  hidden?: number; // explicit override; otherwise derived below
  layers?: number;
  dfa_states?: number; // synthetic sizing input
  vertices?: number; // contact sizing input
  accuracy_gate?: number; // default 0.95 synthetic, 0.99 contact
  max_seconds?: number;
  max_epochs?: number;
  learning_rate?: number;
  batch_size?: number;
  seed: number;
  out_model: string;
  out_metrics: string;
  golden?: { out: string; count: number; max_len: number };
}

export interface Metrics {
  train_accuracy: number;
  test_accuracy: number;
  epochs: number;
  wall_seconds: number;
  gate: number;
  gate_passed: boolean;
  hidden: number;
  layers: number;
  cell: string;
}

export function resolveSizing(config: TrainConfig): { hidden: number; layers: number } {
  if (config.hidden !== undefined && config.layers !== undefined) {
    return { hidden: config.hidden, layers: config.layers };
  }
  if (config.kind === "synthetic") {
    if (config.dfa_states === undefined)
      throw new Error("synthetic sizing needs dfa_states (or explicit hidden+layers)");
    return {
      hidden: config.hidden ?? syntheticHidden(config.dfa_states),
      layers: config.layers ?? syntheticLayers(config.dfa_states),
    };
  }
  if (config.vertices === undefined)
    throw new Error("contact sizing needs vertices (or explicit hidden+layers)");
  return {
    hidden: config.hidden ?? contactHidden(config.vertices),
    layers: config.layers ?? contactLayers(config.vertices),
  };
}

function accuracy(doc: RnnModelFile, data: Dataset): number {
  let correct = 0;
  for (let i = 0; i < data.words.length; i++) {
    if (classify(doc, data.words[i]) === (data.labels[i] === 1)) correct++;
  }
  return data.words.length ? correct / data.words.length : 1;
}

async function fitEpoch(
  model: tf.Sequential,
  data: Dataset,
  order: number[],
  batchSize: number,
  rng: () => number,
): Promise<void> {
  const buckets = bucketByLength(order.map((i) => data.words[i]));
  // batches are per word length so no padding or masking is needed; the
  // empty word carries no gradient signal through the recurrence and is
  // skipped (its classification is still gated via the exported weights)
  const batches: number[][] = [];
  for (const [length, positions] of buckets) {
    if (length === 0) continue;
    for (let start = 0; start < positions.length; start += batchSize) {
      batches.push(positions.slice(start, start + batchSize).map((p) => order[p]));
    }
  }
  for (const chunk of shuffled(batches, rng)) {
    const length = data.words[chunk[0]].length;
    const xs = tf.tensor3d(
      chunk.map((i) => oneHot(data.words[i], data.alphabet.length)),
      [chunk.length, length, data.alphabet.length],
    );
    const ys = tf.tensor2d(chunk.map((i) => [data.labels[i]]), [chunk.length, 1]);
    try {
      await model.trainOnBatch(xs, ys);
    } finally {
      xs.dispose();
      ys.dispose();
    }
  }
}

export async function train(config: TrainConfig): Promise<Metrics> {
  const t0 = Date.now();
  const trainData = parseDataset(config.train);
  const testData = parseDataset(config.test, trainData.alphabet);
  const { hidden, layers } = resolveSizing(config);
  const gate = config.accuracy_gate ?? (config.kind === "synthetic" ? 0.95 : 0.99);
  const maxSeconds = config.max_seconds ?? 600;
  const maxEpochs = config.max_epochs ?? 200;
  const batchSize = config.batch_size ?? 32;

  const model = buildModel(config.cell, trainData.alphabet.length, hidden, layers, config.seed);
  model.compile({
    optimizer: tf.train.adam(config.learning_rate ?? 0.02),
    loss: "binaryCrossentropy",
  });

  const rng = makeRng(config.seed * 2654435761 + 1);
  const indices = trainData.words.map((_, i) => i);
  let epochs = 0;
  let exported = await exportModel(model, config.cell, trainData.alphabet);
  let trainAcc = accuracy(exported, trainData);
  while (
    trainAcc <= gate &&
    epochs < maxEpochs &&
    (Date.now() - t0) / 1000 < maxSeconds
  ) {
    await fitEpoch(model, trainData, shuffled(indices, rng), batchSize, rng);
    epochs++;
    exported = await exportModel(model, config.cell, trainData.alphabet);
    trainAcc = accuracy(exported, trainData);
  }

  fs.mkdirSync(path.dirname(path.resolve(config.out_model)), { recursive: true });
  writeModel(exported, config.out_model);
  const metrics: Metrics = {
    train_accuracy: trainAcc,
    test_accuracy: accuracy(exported, testData),
    epochs,
    wall_seconds: (Date.now() - t0) / 1000,
    gate,
    gate_passed: trainAcc > gate,
    hidden,
    layers,
    cell: config.cell,
  };
  fs.mkdirSync(path.dirname(path.resolve(config.out_metrics)), { recursive: true });
  fs.writeFileSync(config.out_metrics, JSON.stringify(metrics, null, 1) + "\n");
  if (config.golden) emitGolden(exported, config.golden, config.seed);
  return metrics;
}

/**
 * Golden classification set for cross-implementation checks: distinct words,
 * trainer-side label and logit, and a fragility flag for |logit| < 1e-6
 * where summation-order differences could legitimately flip the sign.
 */
export function emitGolden(
  doc: RnnModelFile,
  golden: { out: string; count: number; max_len: number },
  seed: number,
): void {
  const rng = makeRng(seed ^ 0x5eed);
  const words: number[][] = [];
  const seen = new Set<string>();
  if (doc.alphabet.length === 1) {
    for (let n = 0; n < golden.count; n++) words.push(new Array(n).fill(0));
  } else {
    while (words.length < golden.count) {
      const length = Math.floor(rng() * (golden.max_len + 1));
      const word = Array.from({ length }, () => Math.floor(rng() * doc.alphabet.length));
      const key = word.join(",");
      if (!seen.has(key)) {
        seen.add(key);
        words.push(word);
      }
    }
  }
  const lines = words.map((word) => {
    const value = logit(doc, word);
    const label = classify(doc, word) ? 1 : 0;
    const fragile = Math.abs(value) < 1e-6 ? 1 : 0;
    const letters = word.map((i) => doc.alphabet[i]).join(" ");
    return `${label}\t${letters}\t${value}\t${fragile}`;
  });
  fs.mkdirSync(path.dirname(path.resolve(golden.out)), { recursive: true });
  fs.writeFileSync(golden.out, lines.join("\n") + "\n");
}
