"""Synthetic benchmark generation: random ground-truth DFAs, derived
specifications, labeled word datasets, and optional structured loop faults
for fault-injected oracles."""

from __future__ import annotations

import json
import os
import random
from collections import deque
from dataclasses import dataclass

from ..automata import (
    Alphabet,
    Dfa,
    Word,
    accepts,
    ascii_alphabet,
    complement,
    derive_specs,
    minimize,
    product,
    random_dfa,
    reach,
    save_dfa,
    shortest_accepted,
)
from ..faultyflow import find_loops
from ..sampling import WordDistribution, sample_word, spawn_rng, uniform_distribution
from .temporal import write_dataset_line

DEFAULT_TRAIN_SIZE = 5_000
DEFAULT_TEST_SIZE = 1_000


def pattern_dfa(alphabet: Alphabet, prefix: Word, loop: Word, suffix: Word) -> Dfa:
    """DFA of the language {prefix loop^n suffix : n >= 0}.

    Determinizes the chain-with-backedge NFA, so overlaps between the loop
    and the suffix are handled exactly.
    """
    if not loop:
        raise ValueError("loop must be nonempty")
    k = len(alphabet)
    m = len(prefix)
    hub = m
    # NFA states: prefix chain 0..m, loop intermediates m+1..m+|loop|-1,
    # suffix chain m+|loop| .. m+|loop|+|suffix|-1.
    first_suffix = m + len(loop)
    accept_state = first_suffix + len(suffix) - 1 if suffix else hub

    def nfa_next(state: int, letter: int) -> list[int]:
        out = []
        if state < m:
            if prefix[state] == letter:
                out.append(state + 1)
        elif state == hub:
            if loop[0] == letter:
                out.append(hub + 1 if len(loop) > 1 else hub)
            if suffix and suffix[0] == letter:
                out.append(first_suffix)
        elif state < first_suffix:
            pos = state - hub  # letters of the loop consumed so far
            if loop[pos] == letter:
                out.append(state + 1 if pos < len(loop) - 1 else hub)
        else:
            pos = state - first_suffix + 1  # letters of the suffix consumed
            if pos < len(suffix) and suffix[pos] == letter:
                out.append(state + 1)
        return out

    start = frozenset({0})
    index = {start: 0}
    order = [start]
    rows = []
    queue = deque([start])
    while queue:
        subset = queue.popleft()
        row = []
        for a in range(k):
            nxt = frozenset(t for s in subset for t in nfa_next(s, a))
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            row.append(index[nxt])
        rows.append(tuple(row))
    accepting = frozenset(i for i, subset in enumerate(order) if accept_state in subset)
    return Dfa(alphabet, len(order), 0, accepting, tuple(rows))


def _min_len_dfa(alphabet: Alphabet, k: int) -> Dfa:
    rows = tuple((min(i + 1, k),) * len(alphabet) for i in range(k + 1))
    return Dfa(alphabet, k + 1, 0, frozenset({k}), rows)


def make_loop_fault(
    spec: Dfa, rng: random.Random, loop_max_len: int = 6, min_word_len: int = 0
) -> tuple[Dfa, Word, Word, Word] | None:
    """Structured fault rejected by the spec: take the shortest spec-rejected
    word u (of length >= min_word_len, to control how rare the fault is under
    sampling), a cycle of the spec automaton at a state on u's path, and
    build the DFA of prefix loop* suffix (u = prefix suffix).

    Every pumped variant lands in the same rejecting spec state, so the whole
    fault language violates the spec.  None if the spec is universal or u's
    path touches no cycle.
    """
    rejected = complement(spec)
    if min_word_len > 0:
        rejected = product(
            rejected, _min_len_dfa(spec.alphabet, min_word_len), lambda x, y: x and y
        )
    u = shortest_accepted(rejected)
    if u is None:
        return None
    candidates = []
    for cut in range(len(u) + 1):
        state = reach(spec, u[:cut])
        loops = find_loops(spec, state, loop_max_len)
        if loops:
            candidates.append((cut, loops[0]))
    if not candidates:
        return None
    cut, loop = candidates[rng.randrange(len(candidates))]
    prefix, suffix = u[:cut], u[cut:]
    fault = pattern_dfa(spec.alphabet, prefix, loop, suffix)
    return fault, prefix, loop, suffix


def write_dataset(
    dfa: Dfa, dist: WordDistribution, size: int, rng: random.Random, path
) -> None:
    """Sampled words labeled by DFA acceptance, one `label<TAB>letters` line each."""
    with open(path, "w", encoding="utf-8") as fh:
        for _ in range(size):
            w = sample_word(dist, rng)
            write_dataset_line(fh, int(accepts(dfa, w)), dfa.alphabet.render(w))


def read_dataset(path, alphabet: Alphabet) -> list[tuple[int, Word]]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'label<TAB>letters'")
            label = int(parts[0])
            word = alphabet.word(parts[1].split()) if parts[1] else ()
            rows.append((label, word))
    return rows


@dataclass
class GenParams:
    count: int
    n_max: int = 30
    alphabet_size: int = 5
    specs_per_dfa: int = 5
    stop_prob: float = 0.05
    train_size: int = DEFAULT_TRAIN_SIZE
    test_size: int = DEFAULT_TEST_SIZE
    fault: str = "none"  # none | loop


def gen_benchmark(params: GenParams, seed: int, out_dir) -> dict:
    """Emit `count` benchmark instances plus a manifest.

    Each instance gets a random ground-truth DFA, up to `specs_per_dfa`
    derived specification DFAs, and sampled train/test datasets labeled by
    the DFA.  In fault mode a structured loop fault rejected by the (single)
    spec is added and the oracle descriptor becomes an xor over truth and
    fault.  Instances that yield no usable spec or fault are re-rolled.
    Deterministic: same seed, byte-identical files.
    """
    if params.count < 1 or params.n_max < 1 or not 1 <= params.specs_per_dfa <= 5:
        raise ValueError("bad generation parameters")
    if params.fault not in ("none", "loop"):
        raise ValueError(f"unknown fault style {params.fault!r}")
    alphabet = ascii_alphabet(params.alphabet_size)
    dist = uniform_distribution(params.alphabet_size, params.stop_prob)
    os.makedirs(out_dir, exist_ok=True)
    instances = []
    rerolls = 0
    attempt = 0
    while len(instances) < params.count:
        index = len(instances)
        rng = spawn_rng(seed, "instance", attempt)
        attempt += 1
        dfa = random_dfa(params.n_max, alphabet, rng)
        specs = derive_specs(dfa, params.specs_per_dfa, rng)
        oracle: dict = {"kind": "dfa"}
        fault_artifacts = None
        if params.fault == "loop":
            specs = [s for s in specs if shortest_accepted(complement(s)) is not None][:1]
            if specs:
                fault_artifacts = make_loop_fault(specs[0], rng)
            if fault_artifacts is None:
                rerolls += 1
                continue
        if not specs:
            rerolls += 1
            continue
        if fault_artifacts is not None:
            fault, prefix, loop, suffix = fault_artifacts
            fault_path = os.path.join(out_dir, f"inst{index:03d}_fault.dfa")
            save_dfa(fault, fault_path)
            oracle = {
                "kind": "xor",
                "fault": os.path.basename(fault_path),
                "decomposition": {
                    "prefix": list(prefix),
                    "loop": list(loop),
                    "suffix": list(suffix),
                },
            }
        dfa_path = os.path.join(out_dir, f"inst{index:03d}_truth.dfa")
        save_dfa(dfa, dfa_path)
        spec_paths = []
        for j, spec in enumerate(specs):
            p = os.path.join(out_dir, f"inst{index:03d}_spec{j}.dfa")
            save_dfa(spec, p)
            spec_paths.append(os.path.basename(p))
        train_path = os.path.join(out_dir, f"inst{index:03d}_train.tsv")
        test_path = os.path.join(out_dir, f"inst{index:03d}_test.tsv")
        write_dataset(dfa, dist, params.train_size, spawn_rng(seed, "train", attempt), train_path)
        write_dataset(dfa, dist, params.test_size, spawn_rng(seed, "test", attempt), test_path)
        instances.append(
            {
                "id": f"inst{index:03d}",
                "dfa": os.path.basename(dfa_path),
                "minimized_states": minimize(dfa).n_states,
                "oracle": oracle,
                "specs": spec_paths,
                "train": os.path.basename(train_path),
                "test": os.path.basename(test_path),
            }
        )
    manifest = {
        "format": "pdv benchmark manifest v1",
        "seed": seed,
        "alphabet": list(alphabet.letters),
        "parameters": {
            "count": params.count,
            "n_max": params.n_max,
            "alphabet_size": params.alphabet_size,
            "specs_per_dfa": params.specs_per_dfa,
            "stop_prob": params.stop_prob,
            "train_size": params.train_size,
            "test_size": params.test_size,
            "fault": params.fault,
        },
        "rerolls": rerolls,
        "instances": instances,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return manifest
