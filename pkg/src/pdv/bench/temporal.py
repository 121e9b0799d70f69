"""Temporal networks: parsing, time-respecting paths, contact-sequence
datasets, and the static-path specification DFA."""

from __future__ import annotations

import math
import os
import random
from bisect import bisect_right
from collections.abc import Sequence
from dataclasses import dataclass, field

from ..automata import Alphabet, Dfa


@dataclass(frozen=True)
class TemporalNetwork:
    """Undirected graph with integer-timestamped edges.

    Vertex names are normalized to dense indices in order of first
    appearance; `edges` keeps the parsed (timestamp, u, v) triples.
    """

    names: tuple[str, ...]
    edges: tuple[tuple[int, int, int], ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)
    _times: dict[tuple[int, int], tuple[int, ...]] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.names)})
        times: dict[tuple[int, int], list[int]] = {}
        for t, u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on vertex {self.names[u]!r}")
            key = (min(u, v), max(u, v))
            times.setdefault(key, []).append(t)
        object.__setattr__(
            self, "_times", {k: tuple(sorted(ts)) for k, ts in times.items()}
        )

    @property
    def n_vertices(self) -> int:
        return len(self.names)

    def vertex(self, name_or_index) -> int:
        if isinstance(name_or_index, str):
            try:
                return self._index[name_or_index]
            except KeyError:
                raise ValueError(f"unknown vertex {name_or_index!r}") from None
        i = int(name_or_index)
        if not 0 <= i < len(self.names):
            raise ValueError(f"vertex index {i} out of range")
        return i

    def timestamps(self, u: int, v: int) -> tuple[int, ...]:
        return self._times.get((min(u, v), max(u, v)), ())

    def neighbors(self, u: int) -> list[int]:
        out = set()
        for a, b in self._times:
            if a == u:
                out.add(b)
            elif b == u:
                out.add(a)
        return sorted(out)


def parse_temporal_network(path) -> TemporalNetwork:
    """Read whitespace-separated `t u v` lines; `#` starts a comment."""
    names: list[str] = []
    index: dict[str, int] = {}
    edges: list[tuple[int, int, int]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 't u v', got {raw.strip()!r}")
            try:
                t = int(parts[0])
            except ValueError:
                raise ValueError(f"line {lineno}: bad timestamp {parts[0]!r}") from None
            if t < 0:
                raise ValueError(f"line {lineno}: negative timestamp {t}")
            u_name, v_name = parts[1], parts[2]
            if u_name == v_name:
                raise ValueError(f"line {lineno}: self-loop on {u_name!r}")
            for name in (u_name, v_name):
                if name not in index:
                    index[name] = len(names)
                    names.append(name)
            edges.append((t, index[u_name], index[v_name]))
    return TemporalNetwork(tuple(names), tuple(edges))


def time_respecting(net: TemporalNetwork, path: Sequence) -> bool:
    """True iff consecutive vertices are adjacent and their edges admit a
    strictly increasing timestamp assignment.

    Greedily taking the earliest feasible timestamp per edge is exact:
    replacing any valid assignment's choice with the earliest feasible one
    never removes options for later edges (exchange argument).
    """
    idx = [net.vertex(v) for v in path]
    last = -math.inf
    for u, v in zip(idx, idx[1:]):
        stamps = net.timestamps(u, v)
        if not stamps:
            return False
        i = bisect_right(stamps, last)
        if i == len(stamps):
            return False
        last = stamps[i]
    return True


def _random_walk(
    net: TemporalNetwork, rng: random.Random, length: int
) -> list[int] | None:
    """One attempt at a time-respecting walk with `length` vertices."""
    current = rng.randrange(net.n_vertices)
    path = [current]
    last = -math.inf
    while len(path) < length:
        options = []
        for v in net.neighbors(current):
            for t in net.timestamps(current, v):
                if t > last:
                    options.append((v, t))
        if not options:
            return None
        current, last = rng.choice(sorted(options))
        path.append(current)
    return path


MIN_WALK_LEN = 5
MAX_WALK_LEN = 15


def _positive(net: TemporalNetwork, rng: random.Random, attempts: int = 5_000) -> list[int]:
    for _ in range(attempts):
        length = rng.randint(MIN_WALK_LEN, MAX_WALK_LEN)
        walk = _random_walk(net, rng, length)
        if walk is not None:
            return walk
    raise ValueError(
        f"network admits no time-respecting path of length >= {MIN_WALK_LEN}; "
        "too small for dataset generation"
    )


def _negative(net: TemporalNetwork, rng: random.Random, positive: list[int]) -> list[int]:
    """Copy a positive and replace one interior vertex so the result is no
    longer time-respecting (rejection sampling keeps labels exact)."""
    for _ in range(10_000):
        broken = list(positive)
        pos = rng.randrange(1, len(broken) - 1)
        broken[pos] = rng.randrange(net.n_vertices)
        if not time_respecting(net, broken):
            return broken
    raise ValueError("could not break a path; network too permissive")


def write_dataset_line(fh, label: int, letters: Sequence[str]) -> None:
    fh.write(f"{label}\t{' '.join(letters)}\n")


def gen_contact_dataset(
    net: TemporalNetwork, seed: int, out_dir, rng: random.Random | None = None
) -> tuple[str, str]:
    """Emit balanced train/test TSV files of contact sequences.

    Training size is twice the number of timestamped edges; test size is a
    fifth of that (rounded up).  Every label is re-verified before writing.
    """
    rng = rng if rng is not None else random.Random(seed)
    train_size = 2 * len(net.edges)
    test_size = math.ceil(train_size / 5)
    if train_size < 2:
        raise ValueError("network has too few edges for a dataset")
    os.makedirs(out_dir, exist_ok=True)
    paths = (
        os.path.join(out_dir, "train.tsv"),
        os.path.join(out_dir, "test.tsv"),
    )
    for path, size in zip(paths, (train_size, test_size)):
        n_pos = math.ceil(size / 2)
        with open(path, "w", encoding="utf-8") as fh:
            for i in range(size):
                if i < n_pos:
                    walk = _positive(net, rng)
                    assert time_respecting(net, walk)
                    label = 1
                else:
                    walk = _negative(net, rng, _positive(net, rng))
                    assert not time_respecting(net, walk)
                    label = 0
                write_dataset_line(fh, label, [net.names[v] for v in walk])
    return paths


def build_path_spec_dfa(net: TemporalNetwork) -> Dfa:
    """DFA over the vertex alphabet accepting all static walks (timestamps
    disregarded); |V| + 2 states: one per vertex plus start and dead."""
    n = net.n_vertices
    alphabet = Alphabet(net.names)
    start, dead = n, n + 1
    transitions = []
    for u in range(n):
        transitions.append(
            tuple(v if net.timestamps(u, v) else dead for v in range(n))
        )
    transitions.append(tuple(range(n)))  # start: any first vertex
    transitions.append((dead,) * n)
    accepting = frozenset(range(n)) | {start}
    return Dfa(alphabet, n + 2, start, accepting, tuple(transitions))
