"""Deterministic finite automata and the algebra used for model checking.

Words are tuples of letter indices into an :class:`Alphabet`.  All values are
immutable after construction; operations are pure functions except for the
seeded random generators, which are explicit parameters.
"""

from __future__ import annotations

import random
from collections import deque
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field

Word = tuple[int, ...]

EPSILON: Word = ()


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of distinct letters; order fixes the canonical indices."""

    letters: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(str(a) for a in self.letters))
        if not self.letters:
            raise ValueError("alphabet must be nonempty")
        if len(set(self.letters)) != len(self.letters):
            raise ValueError(f"duplicate letters in alphabet: {self.letters}")
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(self.letters)})

    def __len__(self) -> int:
        return len(self.letters)

    def index(self, letter: str) -> int:
        try:
            return self._index[letter]
        except KeyError:
            raise ValueError(f"letter {letter!r} not in alphabet {self.letters}") from None

    def word(self, letters: Iterable[str]) -> Word:
        """Encode a sequence of letters as a word of indices."""
        return tuple(self.index(a) for a in letters)

    def render(self, word: Sequence[int]) -> tuple[str, ...]:
        """Decode a word back to its letters."""
        return tuple(self.letters[i] for i in word)


def ascii_alphabet(size: int) -> Alphabet:
    """Alphabet a, b, c, ... (falls back to s26, s27, ... past 'z')."""
    if size < 1:
        raise ValueError("alphabet size must be >= 1")
    names = [chr(ord("a") + i) if i < 26 else f"s{i}" for i in range(size)]
    return Alphabet(tuple(names))


@dataclass(frozen=True)
class Dfa:
    """Complete DFA: ``transitions[state][letter]`` is total by construction."""

    alphabet: Alphabet
    n_states: int
    initial: int
    accepting: frozenset[int]
    transitions: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(
            self, "transitions", tuple(tuple(row) for row in self.transitions)
        )
        if self.n_states < 1:
            raise ValueError("DFA needs at least one state")
        if not 0 <= self.initial < self.n_states:
            raise ValueError(f"initial state {self.initial} out of range")
        if not all(0 <= q < self.n_states for q in self.accepting):
            raise ValueError("accepting state out of range")
        if len(self.transitions) != self.n_states:
            raise ValueError(
                f"transition table has {len(self.transitions)} rows, "
                f"expected {self.n_states}"
            )
        k = len(self.alphabet)
        for s, row in enumerate(self.transitions):
            if len(row) != k:
                raise ValueError(f"state {s}: {len(row)} transitions, expected {k}")
            for a, t in enumerate(row):
                if not 0 <= t < self.n_states:
                    raise ValueError(f"transition {s} --{a}--> {t} out of range")

    def step(self, state: int, letter: int) -> int:
        return self.transitions[state][letter]


def _check_word(dfa: Dfa, word: Sequence[int]) -> None:
    k = len(dfa.alphabet)
    for a in word:
        if not 0 <= a < k:
            raise ValueError(f"letter index {a} outside alphabet of size {k}")


def reach(dfa: Dfa, word: Sequence[int]) -> int:
    """State reached from the initial state on `word` (the extended delta)."""
    _check_word(dfa, word)
    state = dfa.initial
    for a in word:
        state = dfa.transitions[state][a]
    return state


def accepts(dfa: Dfa, word: Sequence[int]) -> bool:
    return reach(dfa, word) in dfa.accepting


def complement(dfa: Dfa) -> Dfa:
    """Same structure, accepting set inverted."""
    return Dfa(
        dfa.alphabet,
        dfa.n_states,
        dfa.initial,
        frozenset(range(dfa.n_states)) - dfa.accepting,
        dfa.transitions,
    )


def product(d1: Dfa, d2: Dfa, combine: Callable[[bool, bool], bool]) -> Dfa:
    """Reachable product; accepts w iff combine(d1 accepts w, d2 accepts w)."""
    if d1.alphabet.letters != d2.alphabet.letters:
        raise ValueError(
            f"alphabet mismatch: {d1.alphabet.letters} vs {d2.alphabet.letters}"
        )
    k = len(d1.alphabet)
    start = (d1.initial, d2.initial)
    index = {start: 0}
    pairs = [start]
    rows = []
    queue = deque([start])
    while queue:
        s1, s2 = queue.popleft()
        row = []
        for a in range(k):
            t = (d1.transitions[s1][a], d2.transitions[s2][a])
            if t not in index:
                index[t] = len(pairs)
                pairs.append(t)
                queue.append(t)
            row.append(index[t])
        rows.append(tuple(row))
    accepting = frozenset(
        i
        for i, (s1, s2) in enumerate(pairs)
        if combine(s1 in d1.accepting, s2 in d2.accepting)
    )
    return Dfa(d1.alphabet, len(pairs), 0, accepting, tuple(rows))


def shortest_accepted(dfa: Dfa) -> Word | None:
    """Shortest accepted word, lexicographically smallest among shortest.

    BFS expanding letters in canonical order discovers each state with
    exactly that word.  Returns None when the language is empty.
    """
    if dfa.initial in dfa.accepting:
        return EPSILON
    k = len(dfa.alphabet)
    seen = {dfa.initial}
    queue: deque[tuple[int, Word]] = deque([(dfa.initial, EPSILON)])
    while queue:
        state, word = queue.popleft()
        for a in range(k):
            t = dfa.transitions[state][a]
            if t in seen:
                continue
            seen.add(t)
            extended = word + (a,)
            if t in dfa.accepting:
                return extended
            queue.append((t, extended))
    return None


def check_inclusion(d1: Dfa, d2: Dfa) -> Word | None:
    """None iff L(d1) is a subset of L(d2); otherwise the shortest witness
    in L(d1) \\ L(d2) (ties broken lexicographically)."""
    return shortest_accepted(product(d1, complement(d2), lambda x, y: x and y))


def _trim(dfa: Dfa) -> Dfa:
    """Drop unreachable states; relabel by BFS discovery order."""
    k = len(dfa.alphabet)
    index = {dfa.initial: 0}
    order = [dfa.initial]
    queue = deque([dfa.initial])
    while queue:
        s = queue.popleft()
        for a in range(k):
            t = dfa.transitions[s][a]
            if t not in index:
                index[t] = len(order)
                order.append(t)
                queue.append(t)
    rows = tuple(
        tuple(index[dfa.transitions[s][a]] for a in range(k)) for s in order
    )
    accepting = frozenset(index[s] for s in order if s in dfa.accepting)
    return Dfa(dfa.alphabet, len(order), 0, accepting, rows)


def minimize(dfa: Dfa) -> Dfa:
    """Language-equivalent DFA with minimal state count (Hopcroft refinement
    after trimming unreachable states)."""
    d = _trim(dfa)
    n, k = d.n_states, len(d.alphabet)

    preimage = [[[] for _ in range(n)] for _ in range(k)]
    for s in range(n):
        for a in range(k):
            preimage[a][d.transitions[s][a]].append(s)

    final = set(d.accepting)
    nonfinal = set(range(n)) - final
    blocks: list[set[int]] = [b for b in (final, nonfinal) if b]
    block_of = {}
    for i, b in enumerate(blocks):
        for s in b:
            block_of[s] = i
    worklist = {0} if len(blocks) == 1 or len(blocks[0]) <= len(blocks[1]) else {1}

    while worklist:
        splitter = blocks[worklist.pop()].copy()
        for a in range(k):
            x = set()
            for t in splitter:
                x.update(preimage[a][t])
            touched = {}
            for s in x:
                touched.setdefault(block_of[s], set()).add(s)
            for i, inter in touched.items():
                if len(inter) == len(blocks[i]):
                    continue
                rest = blocks[i] - inter
                blocks[i] = inter
                blocks.append(rest)
                j = len(blocks) - 1
                for s in rest:
                    block_of[s] = j
                if i in worklist:
                    worklist.add(j)
                else:
                    worklist.add(i if len(inter) <= len(rest) else j)

    rep = [min(b) for b in blocks]
    rows = tuple(
        tuple(block_of[d.transitions[rep[i]][a]] for a in range(k))
        for i in range(len(blocks))
    )
    quotient = Dfa(
        d.alphabet,
        len(blocks),
        block_of[d.initial],
        frozenset(i for i, b in enumerate(blocks) if rep[i] in final),
        rows,
    )
    # trim again for a canonical BFS labelling of the result
    return _trim(quotient)


def _as_rng(rng: random.Random | int) -> random.Random:
    if isinstance(rng, random.Random):
        return rng
    return random.Random(rng)


def random_dfa(n_max: int, alphabet: Alphabet, rng: random.Random | int) -> Dfa:
    """Random DFA: state count uniform in [1, n_max], uniform transitions,
    each state accepting with probability 1/2; unreachable states trimmed."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    r = _as_rng(rng)
    n = r.randint(1, n_max)
    transitions = tuple(
        tuple(r.randrange(n) for _ in range(len(alphabet))) for _ in range(n)
    )
    accepting = frozenset(s for s in range(n) if r.random() < 0.5)
    return _trim(Dfa(alphabet, n, 0, accepting, transitions))


def derive_specs(
    dfa: Dfa, k: int, rng: random.Random | int, literal: bool = False
) -> list[Dfa]:
    """Up to k specification DFAs obtained by enlarging the accepting set with
    distinct random nonempty subsets of the rejecting states, so the source
    language is included in each spec by construction.

    `literal=True` switches to the degenerate reading where the whole
    rejecting set is added, which yields a single universal-language spec.
    """
    if not 1 <= k <= 5:
        raise ValueError("k must be in [1, 5]")
    rejecting = sorted(set(range(dfa.n_states)) - dfa.accepting)
    if not rejecting:
        return []
    if literal:
        return [
            Dfa(
                dfa.alphabet,
                dfa.n_states,
                dfa.initial,
                frozenset(range(dfa.n_states)),
                dfa.transitions,
            )
        ]
    r = _as_rng(rng)
    chosen: list[frozenset[int]] = []
    specs = []
    for _ in range(k):
        extra = None
        for _attempt in range(20):
            size = r.randint(1, len(rejecting))
            candidate = frozenset(r.sample(rejecting, size))
            if candidate not in chosen:
                extra = candidate
                break
        if extra is None:
            continue
        chosen.append(extra)
        specs.append(
            Dfa(
                dfa.alphabet,
                dfa.n_states,
                dfa.initial,
                dfa.accepting | extra,
                dfa.transitions,
            )
        )
    return specs


# --- textual file format (versioned) and GraphViz export ---

FORMAT_HEADER = "dfa v1"


def format_dfa(dfa: Dfa) -> str:
    lines = [
        FORMAT_HEADER,
        "alphabet: " + " ".join(dfa.alphabet.letters),
        f"states: {dfa.n_states}",
        f"initial: {dfa.initial}",
        "accepting: " + " ".join(str(q) for q in sorted(dfa.accepting)),
    ]
    for s in range(dfa.n_states):
        for a, letter in enumerate(dfa.alphabet.letters):
            lines.append(f"{s} {letter} {dfa.transitions[s][a]}")
    return "\n".join(lines) + "\n"


def parse_dfa(text: str) -> Dfa:
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(no, ln) for no, ln in lines if ln]
    if not lines or lines[0][1] != FORMAT_HEADER:
        raise ValueError(f"expected header {FORMAT_HEADER!r}")
    lines.pop(0)

    def take(prefix: str) -> tuple[int, str]:
        if not lines:
            raise ValueError(f"unexpected end of file, expected '{prefix}: ...'")
        no, ln = lines.pop(0)
        if not ln.startswith(prefix + ":"):
            raise ValueError(f"line {no}: expected '{prefix}: ...'")
        return no, ln[len(prefix) + 1 :].strip()

    _, alpha = take("alphabet")
    alphabet = Alphabet(tuple(alpha.split()))
    lineno, n_text = take("states")
    try:
        n = int(n_text)
    except ValueError:
        raise ValueError(f"line {lineno}: bad state count {n_text!r}") from None
    lineno, init_text = take("initial")
    try:
        initial = int(init_text)
    except ValueError:
        raise ValueError(f"line {lineno}: bad initial state {init_text!r}") from None
    lineno, acc_text = take("accepting")
    try:
        accepting = frozenset(int(tok) for tok in acc_text.split())
    except ValueError:
        raise ValueError(f"line {lineno}: bad accepting state list") from None

    table: list[list[int | None]] = [[None] * len(alphabet) for _ in range(n)]
    for lineno, ln in lines:
        parts = ln.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'src letter dst'")
        try:
            src, dst = int(parts[0]), int(parts[2])
        except ValueError:
            raise ValueError(f"line {lineno}: bad state id") from None
        a = alphabet.index(parts[1])
        if not 0 <= src < n or not 0 <= dst < n:
            raise ValueError(f"line {lineno}: state id out of range")
        if table[src][a] is not None:
            raise ValueError(
                f"line {lineno}: duplicate transition for state {src} "
                f"letter {parts[1]!r}"
            )
        table[src][a] = dst
    for s in range(n):
        for a, letter in enumerate(alphabet.letters):
            if table[s][a] is None:
                raise ValueError(f"missing transition for state {s} letter {letter!r}")
    return Dfa(alphabet, n, initial, accepting, tuple(tuple(row) for row in table))  # type: ignore[arg-type]


def save_dfa(dfa: Dfa, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_dfa(dfa))


def load_dfa(path) -> Dfa:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_dfa(fh.read())


def to_dot(dfa: Dfa, name: str = "dfa") -> str:
    """GraphViz rendering for reports; display only, not re-parsed."""
    out = [f"digraph {name} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for s in range(dfa.n_states):
        shape = "doublecircle" if s in dfa.accepting else "circle"
        out.append(f"  q{s} [shape={shape}, label=\"{s}\"];")
    out.append(f"  __start -> q{dfa.initial};")
    for s in range(dfa.n_states):
        by_target: dict[int, list[str]] = {}
        for a, letter in enumerate(dfa.alphabet.letters):
            by_target.setdefault(dfa.transitions[s][a], []).append(letter)
        for t, letters in sorted(by_target.items()):
            out.append(f"  q{s} -> q{t} [label=\"{','.join(letters)}\"];")
    out.append("}")
    return "\n".join(out) + "\n"
