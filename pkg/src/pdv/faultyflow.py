"""Generalize one confirmed counterexample into a faulty flow by pumping
loops of the specification x hypothesis product automaton."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .automata import Dfa, Word, accepts, product, reach
from .oracle import LanguageOracle

DEFAULT_PUMP_MAX = 100
DEFAULT_THRESHOLD = 20
DEFAULT_LOOP_MAX_LEN = 12


@dataclass(frozen=True)
class FaultyFlow:
    prefix: Word
    loop: Word
    suffix: Word
    hits: int


@dataclass
class FaultyFlowReport:
    word: Word
    found: bool
    flow: FaultyFlow | None
    best_hits: int
    pump_max: int
    threshold: int
    loop_max_len: int
    flows: list[FaultyFlow] | None = None  # exhaustive mode only

    def to_record(self) -> dict:
        doc = {
            "found": self.found,
            "best_hits": self.best_hits,
            "pump_max": self.pump_max,
            "threshold": self.threshold,
            "loop_max_len": self.loop_max_len,
        }
        if self.flow is not None:
            doc["prefix"] = list(self.flow.prefix)
            doc["loop"] = list(self.flow.loop)
            doc["suffix"] = list(self.flow.suffix)
            doc["hits"] = self.flow.hits
        if self.flows is not None:
            doc["flows"] = [
                {
                    "prefix": list(f.prefix),
                    "loop": list(f.loop),
                    "suffix": list(f.suffix),
                    "hits": f.hits,
                }
                for f in self.flows
            ]
        return doc


def find_loops(dfa: Dfa, at: int, max_len: int) -> list[Word]:
    """Label words of cycles through `at` of length <= max_len, shortest
    first, ties in canonical letter order.

    Cycles may revisit intermediate states but never reuse a transition edge
    and never pass through `at` itself - so self-loops along the way count
    (the common shape of pumped faults) while the enumeration stays finite
    without a length cap doing all the work.
    """
    if not 0 <= at < dfa.n_states:
        raise ValueError(f"state {at} out of range")
    if max_len < 1:
        return []
    k = len(dfa.alphabet)

    # distance from every state back to `at`, for pruning dead branches
    predecessors: list[set[int]] = [set() for _ in range(dfa.n_states)]
    for src in range(dfa.n_states):
        for a in range(k):
            predecessors[dfa.transitions[src][a]].add(src)
    dist_to_at: dict[int, int] = {}
    queue = deque([(at, 0)])
    while queue:
        s, d = queue.popleft()
        for src in predecessors[s]:
            if src not in dist_to_at:
                dist_to_at[src] = d + 1
                queue.append((src, d + 1))

    results: list[Word] = []
    used: set[tuple[int, int]] = set()

    def walk(state: int, path: Word) -> None:
        for a in range(k):
            edge = (state, a)
            if edge in used:
                continue
            t = dfa.transitions[state][a]
            if t == at:
                results.append(path + (a,))
                continue
            remaining = max_len - len(path) - 1
            if remaining >= 1 and dist_to_at.get(t, max_len + 1) <= remaining:
                used.add(edge)
                walk(t, path + (a,))
                used.discard(edge)

    walk(at, ())
    results.sort(key=lambda w: (len(w), w))
    return results


def detect(
    oracle: LanguageOracle,
    spec: Dfa,
    hyp: Dfa,
    word: Word,
    pump_max: int = DEFAULT_PUMP_MAX,
    threshold: int = DEFAULT_THRESHOLD,
    loop_max_len: int = DEFAULT_LOOP_MAX_LEN,
    exhaustive: bool = False,
) -> FaultyFlowReport:
    """Scan prefix splits of a confirmed counterexample, pump every product
    loop at the split state, and report the first decomposition whose pumped
    words are counterexamples more than `threshold` times out of `pump_max`.

    Both conditions - oracle membership and spec rejection - are re-checked
    per pumped word; the product structure alone is not trusted.
    """
    word = tuple(word)
    if not oracle.membership(word) or accepts(spec, word):
        raise ValueError(
            "word is not a confirmed counterexample (needs oracle membership "
            "true and specification rejection)"
        )
    prod = product(spec, hyp, lambda x, y: x and y)
    best_hits = 0
    flows: list[FaultyFlow] = []
    for cut in range(len(word) + 1):
        prefix, suffix = word[:cut], word[cut:]
        state = reach(prod, prefix)
        for loop in find_loops(prod, state, loop_max_len):
            hits = 0
            for n in range(1, pump_max + 1):
                pumped = prefix + loop * n + suffix
                if oracle.membership(pumped) and not accepts(spec, pumped):
                    hits += 1
            best_hits = max(best_hits, hits)
            if hits > threshold:
                flow = FaultyFlow(prefix, loop, suffix, hits)
                if not exhaustive:
                    return FaultyFlowReport(
                        word, True, flow, best_hits, pump_max, threshold, loop_max_len
                    )
                flows.append(flow)
    if flows:
        return FaultyFlowReport(
            word, True, flows[0], best_hits, pump_max, threshold, loop_max_len, flows
        )
    return FaultyFlowReport(
        word, False, None, best_hits, pump_max, threshold, loop_max_len,
        flows if exhaustive else None,
    )
