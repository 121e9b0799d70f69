/** Extract tfjs layer weights into the portable `rnn v1` JSON layout. */

import * as fs from "fs";
import * as tf from "@tensorflow/tfjs";

import { CellKind, LayerWeights, RnnModelFile, validateModel } from "./format";

function transpose(m: number[][]): number[][] {
  return m[0].map((_, j) => m.map((row) => row[j]));
}

export async function exportModel(
  model: tf.Sequential,
  cell: CellKind,
  alphabet: string[],
): Promise<RnnModelFile> {
  const layers: LayerWeights[] = [];
  const h0: number[][] = [];
  const c0: number[][] = [];
  for (const layer of model.layers.slice(0, -1)) {
    const [kernel, recurrent, bias] = layer.getWeights();
    // tfjs kernels are (input, gates*hidden); rows become gate blocks after
    // transposition, already in the format's i, f, g, o order
    const w_in = transpose((await kernel.array()) as number[][]);
    const w_rec = transpose((await recurrent.array()) as number[][]);
    const b = (await bias.array()) as number[];
    layers.push({ w_in, w_rec, b });
    const hidden = cell === "lstm" ? w_rec[0].length : w_rec.length;
    h0.push(new Array(hidden).fill(0));
    c0.push(new Array(hidden).fill(0));
  }
  const dense = model.layers[model.layers.length - 1];
  const [denseKernel, denseBias] = dense.getWeights();
  const kernelRows = (await denseKernel.array()) as number[][];
  const doc: RnnModelFile = {
    format: "rnn v1",
    cell,
    alphabet,
    layers,
    h0,
    readout: {
      w: kernelRows.map((row) => row[0]),
      b: ((await denseBias.array()) as number[])[0],
      threshold: 0.5,
    },
  };
  if (cell === "lstm") doc.c0 = c0;
  validateModel(doc);
  return doc;
}

export function writeModel(doc: RnnModelFile, path: string): void {
  fs.writeFileSync(path, JSON.stringify(doc, null, 1) + "\n");
}
