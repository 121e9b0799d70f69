/**
 * The portable `rnn v1` model format and a reference float64 forward pass.
 *
 * The JSON layout is the binding contract with the verification toolkit:
 * matrices are row-major; LSTM layers stack the four gates in row blocks
 * ordered input, forget, candidate, output.  Weights are trained in 32-bit
 * and serialized as JSON numbers from float64 upcasts, which round-trip the
 * exact float32 values.
 */

export type CellKind = "elman" | "lstm";

export interface LayerWeights {
  w_in: number[][]; // (gates*hidden, input)
  w_rec: number[][]; // (gates*hidden, hidden)
  b: number[]; // (gates*hidden)
}

export interface RnnModelFile {
  format: "rnn v1";
  cell: CellKind;
  alphabet: string[];
  layers: LayerWeights[];
  h0: number[][];
  c0?: number[][];
  readout: { w: number[]; b: number; threshold: number };
  embedding?: number[][];
}

export function hiddenSize(layer: LayerWeights, cell: CellKind): number {
  return cell === "lstm" ? layer.w_rec[0].length : layer.w_rec.length;
}

function matVec(m: number[][], v: number[]): number[] {
  const out = new Array(m.length);
  for (let i = 0; i < m.length; i++) {
    let acc = 0;
    const row = m[i];
    for (let j = 0; j < row.length; j++) acc += row[j] * v[j];
    out[i] = acc;
  }
  return out;
}

function sigmoid(z: number): number {
  return z >= 0 ? 1 / (1 + Math.exp(-z)) : Math.exp(z) / (1 + Math.exp(z));
}

export interface HiddenState {
  h: number[][];
  c: number[][]; // empty rows for elman
}

export function initialState(model: RnnModelFile): HiddenState {
  return {
    h: model.h0.map((v) => v.slice()),
    c:
      model.cell === "lstm"
        ? (model.c0 ?? model.h0.map((v) => v.map(() => 0))).map((v) => v.slice())
        : model.h0.map(() => []),
  };
}

export function step(model: RnnModelFile, state: HiddenState, letter: number): HiddenState {
  let x: number[];
  if (model.embedding) {
    x = model.embedding[letter].slice();
  } else {
    x = new Array(model.alphabet.length).fill(0);
    x[letter] = 1;
  }
  const next: HiddenState = { h: [], c: [] };
  for (let l = 0; l < model.layers.length; l++) {
    const layer = model.layers[l];
    const z = matVec(layer.w_in, x);
    const r = matVec(layer.w_rec, state.h[l]);
    for (let i = 0; i < z.length; i++) z[i] += r[i] + layer.b[i];
    if (model.cell === "elman") {
      const h = z.map(Math.tanh);
      next.h.push(h);
      next.c.push([]);
      x = h;
    } else {
      const n = hiddenSize(layer, "lstm");
      const h = new Array(n);
      const c = new Array(n);
      for (let i = 0; i < n; i++) {
        const ig = sigmoid(z[i]);
        const fg = sigmoid(z[n + i]);
        const g = Math.tanh(z[2 * n + i]);
        const og = sigmoid(z[3 * n + i]);
        c[i] = fg * state.c[l][i] + ig * g;
        h[i] = og * Math.tanh(c[i]);
      }
      next.h.push(h);
      next.c.push(c);
      x = h;
    }
  }
  return next;
}

export function logit(model: RnnModelFile, word: number[]): number {
  let state = initialState(model);
  for (const letter of word) state = step(model, state, letter);
  const h = state.h[state.h.length - 1];
  let acc = model.readout.b;
  for (let i = 0; i < h.length; i++) acc += model.readout.w[i] * h[i];
  return acc;
}

export function classify(model: RnnModelFile, word: number[]): boolean {
  const t = model.readout.threshold;
  return logit(model, word) >= Math.log(t / (1 - t));
}

export function validateModel(model: RnnModelFile): void {
  if (model.format !== "rnn v1") throw new Error(`bad format ${model.format}`);
  const gates = model.cell === "lstm" ? 4 : 1;
  let input = model.embedding ? model.embedding[0].length : model.alphabet.length;
  model.layers.forEach((layer, i) => {
    const hidden = hiddenSize(layer, model.cell);
    if (layer.w_in.length !== gates * hidden || layer.w_in[0].length !== input)
      throw new Error(`layer ${i}: w_in shape mismatch`);
    if (layer.w_rec.length !== gates * hidden || layer.w_rec[0].length !== hidden)
      throw new Error(`layer ${i}: w_rec shape mismatch`);
    if (layer.b.length !== gates * hidden) throw new Error(`layer ${i}: b shape mismatch`);
    if (model.h0[i].length !== hidden) throw new Error(`layer ${i}: h0 shape mismatch`);
    input = hidden;
  });
  if (model.readout.w.length !== input) throw new Error("readout shape mismatch");
  const everything = [
    ...model.layers.flatMap((l) => [...l.b, ...l.w_in.flat(), ...l.w_rec.flat()]),
    ...model.h0.flat(),
    ...model.readout.w,
    model.readout.b,
  ];
  if (everything.some((v) => !Number.isFinite(v))) throw new Error("non-finite weight");
}
