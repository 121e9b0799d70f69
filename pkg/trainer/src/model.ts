/** tfjs model construction and the paper-derived sizing formulas. */

import * as tf from "@tensorflow/tfjs";

import { CellKind } from "./format";

/** Synthetic instances: hidden dimension scales with the DFA state count. */
export function syntheticHidden(dfaStates: number): number {
  return 20 * dfaStates;
}

export function syntheticLayers(dfaStates: number): number {
  return 1 + Math.floor(dfaStates / 10);
}

/** Contact networks: hidden dimension follows the vertex count, min 100. */
export function contactHidden(vertices: number): number {
  return Math.max(vertices, 100);
}

export function contactLayers(vertices: number): number {
  return Math.floor(2 + vertices / 100);
}

export function buildModel(
  cell: CellKind,
  alphabetSize: number,
  hidden: number,
  layers: number,
  seed: number,
): tf.Sequential {
  const model = tf.sequential();
  for (let l = 0; l < layers; l++) {
    const common = {
      units: hidden,
      returnSequences: l < layers - 1,
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 2 * l }),
      // orthogonal recurrent init preserves long-range signal, which cyclic
      // languages need; seeded for reproducible runs
      recurrentInitializer: tf.initializers.orthogonal({ seed: seed + 2 * l + 1 }),
      inputShape: l === 0 ? ([null, alphabetSize] as [null, number]) : undefined,
    };
    if (cell === "elman") {
      model.add(tf.layers.simpleRNN({ ...common, activation: "tanh" }));
    } else {
      // explicit sigmoid recurrent activation: the exported format uses
      // standard gates, not the hardSigmoid tfjs default
      model.add(
        tf.layers.lstm({ ...common, activation: "tanh", recurrentActivation: "sigmoid" }),
      );
    }
  }
  model.add(
    tf.layers.dense({
      units: 1,
      activation: "sigmoid",
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1000 }),
    }),
  );
  return model;
}
