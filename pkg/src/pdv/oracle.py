"""Black-box membership oracles: exact DFA, fault-injected DFA, and RNN
forward inference from portable weight files.

All RNN arithmetic is 64-bit; weight files trained in 32-bit upcast exactly.
"""

from __future__ import annotations

import json
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .automata import Alphabet, Dfa, Word, accepts

MODEL_FORMAT = "rnn v1"


class ModelFormatError(ValueError):
    """Malformed or inconsistent RNN model file."""


class NumericError(ArithmeticError):
    """Non-finite value encountered during inference; reported, not clamped."""


class LanguageOracle:
    """Membership interface with query accounting.

    Implementations must be deterministic: repeated queries on the same word
    return the same answer.  `num_queries` increases by exactly one per
    membership call; concurrent workers should each own an oracle instance
    and sum counters afterwards.
    """

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.num_queries = 0

    def membership(self, word: Sequence[int]) -> bool:
        k = len(self.alphabet)
        for a in word:
            if not 0 <= a < k:
                raise ValueError(f"letter index {a} outside alphabet of size {k}")
        self.num_queries += 1
        return self._classify(tuple(word))

    def _classify(self, word: Word) -> bool:
        raise NotImplementedError


class DfaOracle(LanguageOracle):
    def __init__(self, dfa: Dfa):
        super().__init__(dfa.alphabet)
        self.dfa = dfa

    def _classify(self, word: Word) -> bool:
        return accepts(self.dfa, word)


class FaultInjectedOracle(LanguageOracle):
    """Answers membership as the symmetric difference of a base DFA and a
    fault DFA: a controlled stand-in for a classifier with known errors."""

    def __init__(self, base: Dfa, fault: Dfa):
        if base.alphabet.letters != fault.alphabet.letters:
            raise ValueError("base and fault DFAs must share an alphabet")
        super().__init__(base.alphabet)
        self.base = base
        self.fault = fault

    def _classify(self, word: Word) -> bool:
        return accepts(self.base, word) != accepts(self.fault, word)


# --- RNN models ---


@dataclass
class ElmanLayer:
    w_in: np.ndarray  # (hidden, input)
    w_rec: np.ndarray  # (hidden, hidden)
    b: np.ndarray  # (hidden,)

    @property
    def hidden(self) -> int:
        return self.w_rec.shape[0]


@dataclass
class LstmLayer:
    """Stacked 4-gate weights; row blocks ordered input, forget, candidate,
    output (i, f, g, o)."""

    w_in: np.ndarray  # (4*hidden, input)
    w_rec: np.ndarray  # (4*hidden, hidden)
    b: np.ndarray  # (4*hidden,)

    @property
    def hidden(self) -> int:
        return self.w_rec.shape[1]


@dataclass
class RnnModel:
    cell: str  # "elman" | "lstm"
    alphabet: Alphabet
    layers: list[ElmanLayer] | list[LstmLayer]
    h0: list[np.ndarray]
    readout_w: np.ndarray
    readout_b: float
    threshold: float = 0.5
    c0: list[np.ndarray] | None = None  # lstm cell states; zeros when omitted
    embedding: np.ndarray | None = None  # (|alphabet|, emb_dim), row per letter

    def __post_init__(self):
        _validate_model(self)

    def input_dim(self) -> int:
        if self.embedding is not None:
            return self.embedding.shape[1]
        return len(self.alphabet)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RnnModel):
            return NotImplemented
        if (self.cell, self.alphabet.letters, self.threshold) != (
            other.cell,
            other.alphabet.letters,
            other.threshold,
        ):
            return False
        if self.readout_b != other.readout_b:
            return False
        if not np.array_equal(self.readout_w, other.readout_w):
            return False
        if len(self.layers) != len(other.layers):
            return False
        for a, b in zip(self.layers, other.layers):
            if not (
                np.array_equal(a.w_in, b.w_in)
                and np.array_equal(a.w_rec, b.w_rec)
                and np.array_equal(a.b, b.b)
            ):
                return False
        for mine, theirs in ((self.h0, other.h0), (self.c0 or [], other.c0 or [])):
            if len(mine) != len(theirs):
                return False
            if not all(np.array_equal(x, y) for x, y in zip(mine, theirs)):
                return False
        if (self.embedding is None) != (other.embedding is None):
            return False
        if self.embedding is not None and not np.array_equal(
            self.embedding, other.embedding
        ):
            return False
        return True


def _validate_model(model: RnnModel) -> None:
    if model.cell not in ("elman", "lstm"):
        raise ModelFormatError(f"unknown cell kind {model.cell!r}")
    if not model.layers:
        raise ModelFormatError("model needs at least one layer")
    if not 0.0 < model.threshold < 1.0:
        raise ModelFormatError(f"threshold {model.threshold} outside (0, 1)")
    gates = 1 if model.cell == "elman" else 4
    expect_in = model.input_dim()
    if model.embedding is not None:
        if model.embedding.ndim != 2 or model.embedding.shape[0] != len(model.alphabet):
            raise ModelFormatError(
                f"embedding has shape {model.embedding.shape}, expected "
                f"({len(model.alphabet)}, emb_dim)"
            )
        _require_finite(model.embedding, "embedding")
    if len(model.h0) != len(model.layers):
        raise ModelFormatError(
            f"h0 has {len(model.h0)} vectors for {len(model.layers)} layers"
        )
    if model.cell == "lstm":
        if model.c0 is None:
            model.c0 = [np.zeros(layer.hidden) for layer in model.layers]
        if len(model.c0) != len(model.layers):
            raise ModelFormatError(
                f"c0 has {len(model.c0)} vectors for {len(model.layers)} layers"
            )
    elif model.c0 is not None:
        raise ModelFormatError("c0 is only meaningful for lstm models")
    for i, layer in enumerate(model.layers):
        h = layer.hidden
        where = f"layer {i}"
        if layer.w_in.shape != (gates * h, expect_in):
            raise ModelFormatError(
                f"{where}: w_in has shape {layer.w_in.shape}, expected "
                f"({gates * h}, {expect_in})"
            )
        if layer.w_rec.shape != (gates * h, h):
            raise ModelFormatError(
                f"{where}: w_rec has shape {layer.w_rec.shape}, expected "
                f"({gates * h}, {h})"
            )
        if layer.b.shape != (gates * h,):
            raise ModelFormatError(
                f"{where}: b has shape {layer.b.shape}, expected ({gates * h},)"
            )
        if model.h0[i].shape != (h,):
            raise ModelFormatError(
                f"{where}: h0 has shape {model.h0[i].shape}, expected ({h},)"
            )
        if model.cell == "lstm" and model.c0[i].shape != (h,):
            raise ModelFormatError(
                f"{where}: c0 has shape {model.c0[i].shape}, expected ({h},)"
            )
        for name in ("w_in", "w_rec", "b"):
            _require_finite(getattr(layer, name), f"{where}.{name}")
        _require_finite(model.h0[i], f"{where}.h0")
        expect_in = h
    if model.readout_w.shape != (model.layers[-1].hidden,):
        raise ModelFormatError(
            f"readout w has shape {model.readout_w.shape}, expected "
            f"({model.layers[-1].hidden},)"
        )
    _require_finite(model.readout_w, "readout.w")
    if not math.isfinite(model.readout_b):
        raise ModelFormatError("readout.b is not finite")


def _require_finite(arr: np.ndarray, name: str) -> None:
    if not np.isfinite(arr).all():
        raise ModelFormatError(f"{name} contains a non-finite weight")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # split by sign for numerical stability on large |z|
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


# A hidden state is one entry per layer: (h,) for elman, (h, c) for lstm.
HiddenState = list


def initial_state(model: RnnModel) -> HiddenState:
    if model.cell == "elman":
        return [h.copy() for h in model.h0]
    return [(h.copy(), c.copy()) for h, c in zip(model.h0, model.c0)]


def _input_vector(model: RnnModel, letter: int) -> np.ndarray:
    if model.embedding is not None:
        return model.embedding[letter]
    x = np.zeros(len(model.alphabet))
    x[letter] = 1.0
    return x


def rnn_step(model: RnnModel, state: HiddenState, letter: int) -> HiddenState:
    """One transition: one-hot (or embedded) input through every layer."""
    if not 0 <= letter < len(model.alphabet):
        raise ValueError(f"letter index {letter} outside alphabet")
    x = _input_vector(model, letter)
    new_state: HiddenState = []
    for i, layer in enumerate(model.layers):
        if model.cell == "elman":
            h = state[i]
            h_new = np.tanh(layer.w_in @ x + layer.w_rec @ h + layer.b)
            if not np.isfinite(h_new).all():
                raise NumericError(f"non-finite hidden state in layer {i}")
            new_state.append(h_new)
            x = h_new
        else:
            h, c = state[i]
            n = layer.hidden
            z = layer.w_in @ x + layer.w_rec @ h + layer.b
            i_gate = _sigmoid(z[:n])
            f_gate = _sigmoid(z[n : 2 * n])
            g = np.tanh(z[2 * n : 3 * n])
            o_gate = _sigmoid(z[3 * n :])
            c_new = f_gate * c + i_gate * g
            h_new = o_gate * np.tanh(c_new)
            if not (np.isfinite(h_new).all() and np.isfinite(c_new).all()):
                raise NumericError(f"non-finite hidden state in layer {i}")
            new_state.append((h_new, c_new))
            x = h_new
    return new_state


def _final_hidden(model: RnnModel, state: HiddenState) -> np.ndarray:
    last = state[-1]
    return last if model.cell == "elman" else last[0]


def rnn_logit(model: RnnModel, state: HiddenState) -> float:
    logit = float(model.readout_w @ _final_hidden(model, state) + model.readout_b)
    if not math.isfinite(logit):
        raise NumericError("non-finite readout logit")
    return logit


def _logit_threshold(model: RnnModel) -> float:
    # sigmoid(logit) >= threshold, evaluated exactly in logit space
    return math.log(model.threshold / (1.0 - model.threshold))


def rnn_classify(model: RnnModel, word: Sequence[int]) -> bool:
    state = initial_state(model)
    for letter in word:
        state = rnn_step(model, state, letter)
    return rnn_logit(model, state) >= _logit_threshold(model)


class RnnOracle(LanguageOracle):
    """Membership via forward inference, with a prefix cache of hidden states.

    Caching exploits the prefix structure of learner queries and cannot change
    any answer: re-running the same fold from a cached prefix state is
    bit-identical to running it from scratch.
    """

    def __init__(self, model: RnnModel, cache_limit: int = 500_000):
        super().__init__(model.alphabet)
        self.model = model
        self.cache_limit = cache_limit
        self._threshold = _logit_threshold(model)
        self._cache: dict[Word, HiddenState] = {(): initial_state(model)}

    def _classify(self, word: Word) -> bool:
        start = len(word)
        while start > 0 and word[:start] not in self._cache:
            start -= 1
        if len(self._cache) > self.cache_limit:
            self._cache = {(): initial_state(self.model)}
            start = 0
        state = self._cache[word[:start]]
        for i in range(start, len(word)):
            state = rnn_step(self.model, state, word[i])
            self._cache[word[: i + 1]] = state
        return rnn_logit(self.model, state) >= self._threshold


# --- model files ---


def _matrix(value, name: str, shape_hint: str = "matrix") -> np.ndarray:
    try:
        arr = np.array(
            [[float(x) for x in row] for row in value], dtype=np.float64
        )
    except (TypeError, ValueError):
        raise ModelFormatError(f"{name}: expected a numeric {shape_hint}") from None
    if arr.ndim != 2:
        raise ModelFormatError(f"{name}: rows have inconsistent lengths")
    return arr


def _vector(value, name: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in value], dtype=np.float64)
    except (TypeError, ValueError):
        raise ModelFormatError(f"{name}: expected a numeric vector") from None


def load_rnn_model(path) -> RnnModel:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"expected format {MODEL_FORMAT!r}")
    try:
        cell = doc["cell"]
        alphabet = Alphabet(tuple(doc["alphabet"]))
        raw_layers = doc["layers"]
        raw_h0 = doc["h0"]
        readout = doc["readout"]
    except KeyError as exc:
        raise ModelFormatError(f"missing field {exc.args[0]!r}") from None
    layer_cls = ElmanLayer if cell == "elman" else LstmLayer
    layers = []
    for i, raw in enumerate(raw_layers):
        try:
            layers.append(
                layer_cls(
                    w_in=_matrix(raw["w_in"], f"layer {i}: w_in"),
                    w_rec=_matrix(raw["w_rec"], f"layer {i}: w_rec"),
                    b=_vector(raw["b"], f"layer {i}: b"),
                )
            )
        except KeyError as exc:
            raise ModelFormatError(f"layer {i}: missing field {exc.args[0]!r}") from None
    h0 = [_vector(v, f"h0[{i}]") for i, v in enumerate(raw_h0)]
    c0 = None
    if "c0" in doc:
        c0 = [_vector(v, f"c0[{i}]") for i, v in enumerate(doc["c0"])]
    embedding = None
    if doc.get("embedding") is not None:
        embedding = _matrix(doc["embedding"], "embedding")
    try:
        readout_w = _vector(readout["w"], "readout.w")
        readout_b = float(readout["b"])
    except KeyError as exc:
        raise ModelFormatError(f"readout: missing field {exc.args[0]!r}") from None
    threshold = float(readout.get("threshold", 0.5))
    return RnnModel(
        cell=cell,
        alphabet=alphabet,
        layers=layers,
        h0=h0,
        readout_w=readout_w,
        readout_b=readout_b,
        threshold=threshold,
        c0=c0,
        embedding=embedding,
    )


def save_rnn_model(model: RnnModel, path) -> None:
    doc: dict = {
        "format": MODEL_FORMAT,
        "cell": model.cell,
        "alphabet": list(model.alphabet.letters),
        "layers": [
            {
                "w_in": layer.w_in.tolist(),
                "w_rec": layer.w_rec.tolist(),
                "b": layer.b.tolist(),
            }
            for layer in model.layers
        ],
        "h0": [h.tolist() for h in model.h0],
        "readout": {
            "w": model.readout_w.tolist(),
            "b": model.readout_b,
            "threshold": model.threshold,
        },
    }
    if model.cell == "lstm":
        doc["c0"] = [c.tolist() for c in model.c0]
    if model.embedding is not None:
        doc["embedding"] = model.embedding.tolist()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
