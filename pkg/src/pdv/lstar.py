"""Angluin-style active learning over a membership oracle.

The observation table uses the classic add-all-prefixes counterexample
processing; hypotheses are built from distinct rows.  Budgets on membership
queries and hypothesis size bound non-termination on non-regular targets.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

from .automata import Alphabet, Dfa, Word, accepts
from .oracle import LanguageOracle

DEFAULT_MAX_QUERIES = 10_000_000
DEFAULT_MAX_STATES = 5_000


class QueryBudgetExceeded(RuntimeError):
    """Membership-query budget ran out; carries the partial table."""

    def __init__(self, budget: int, table: "ObservationTable"):
        super().__init__(f"membership-query budget of {budget} exceeded")
        self.budget = budget
        self.table = table


class HypothesisSizeExceeded(RuntimeError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"hypothesis has {size} states, cap is {cap}")
        self.size = size
        self.cap = cap


@dataclass
class Hypothesis:
    dfa: Dfa
    generation: int  # completed equivalence rounds when this was built


class ObservationTable:
    """Prefix-closed rows S, suffix-closed columns E, and cached answers.

    `entries` doubles as the deduplicating MQ cache: the oracle is asked at
    most once per distinct word, so its counter reports distinct queries.
    """

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.prefixes: list[Word] = [()]
        self._prefix_set: set[Word] = {()}
        self.suffixes: list[Word] = [()]
        self._suffix_set: set[Word] = {()}
        self.entries: dict[Word, bool] = {}

    def query(
        self, oracle: LanguageOracle, word: Word, max_queries: int | None = None
    ) -> bool:
        try:
            return self.entries[word]
        except KeyError:
            pass
        if max_queries is not None and oracle.num_queries >= max_queries:
            raise QueryBudgetExceeded(max_queries, self)
        answer = oracle.membership(word)
        self.entries[word] = answer
        return answer

    def add_prefix(self, word: Word) -> None:
        for i in range(len(word) + 1):
            p = word[:i]
            if p not in self._prefix_set:
                self._prefix_set.add(p)
                self.prefixes.append(p)

    def add_suffix(self, word: Word) -> None:
        if word not in self._suffix_set:
            self._suffix_set.add(word)
            self.suffixes.append(word)

    def row(self, prefix: Word) -> tuple[bool, ...]:
        return tuple(self.entries[prefix + e] for e in self.suffixes)

    def boundary(self) -> list[Word]:
        """S·A rows that are not themselves in S."""
        k = len(self.alphabet)
        return [
            s + (a,)
            for s in self.prefixes
            for a in range(k)
            if s + (a,) not in self._prefix_set
        ]

    def fill(self, oracle: LanguageOracle, max_queries: int | None = None) -> None:
        for s in self.prefixes + self.boundary():
            for e in self.suffixes:
                self.query(oracle, s + e, max_queries)


def close_and_make_consistent(
    table: ObservationTable,
    oracle: LanguageOracle,
    max_queries: int | None = None,
) -> ObservationTable:
    """Add prefixes (closedness) and suffixes (consistency) until the table
    supports a hypothesis.  Terminates on regular targets because every step
    increases the number of distinct rows, bounded by the target's index."""
    k = len(table.alphabet)
    while True:
        table.fill(oracle, max_queries)

        rows_in_s = {table.row(s) for s in table.prefixes}
        unclosed = next(
            (t for t in table.boundary() if table.row(t) not in rows_in_s), None
        )
        if unclosed is not None:
            table.add_prefix(unclosed)
            continue

        by_row: dict[tuple[bool, ...], Word] = {}
        new_suffix = None
        for s in table.prefixes:
            r = table.row(s)
            if r not in by_row:
                by_row[r] = s
                continue
            s0 = by_row[r]
            for a in range(k):
                if table.row(s0 + (a,)) != table.row(s + (a,)):
                    for i, e in enumerate(table.suffixes):
                        if table.entries[s0 + (a,) + e] != table.entries[s + (a,) + e]:
                            new_suffix = (a,) + e
                            break
                    break
            if new_suffix is not None:
                break
        if new_suffix is not None:
            table.add_suffix(new_suffix)
            continue
        return table


def build_hypothesis(table: ObservationTable, generation: int = 0) -> Hypothesis:
    """DFA over distinct rows; requires a closed and consistent table."""
    row_ids: dict[tuple[bool, ...], int] = {}
    reps: list[Word] = []
    for s in table.prefixes:
        r = table.row(s)
        if r not in row_ids:
            row_ids[r] = len(reps)
            reps.append(s)
    n = len(reps)
    k = len(table.alphabet)
    transitions = []
    for s in reps:
        dest = []
        for a in range(k):
            r = table.row(s + (a,))
            assert r in row_ids, "table is not closed"
            dest.append(row_ids[r])
        transitions.append(tuple(dest))
    accepting = frozenset(i for i, s in enumerate(reps) if table.entries[s])
    dfa = Dfa(table.alphabet, n, row_ids[table.row(())], accepting, tuple(transitions))
    return Hypothesis(dfa, generation)


def refine(
    table: ObservationTable,
    counterexample: Word,
    oracle: LanguageOracle,
    max_queries: int | None = None,
) -> ObservationTable:
    """Feed back a word on which the current hypothesis and the oracle
    disagree; raises if it does not actually distinguish them."""
    counterexample = tuple(counterexample)
    hyp = build_hypothesis(table)
    expected = table.query(oracle, counterexample, max_queries)
    if accepts(hyp.dfa, counterexample) == expected:
        raise ValueError(
            "counterexample does not distinguish hypothesis from oracle: "
            f"{counterexample}"
        )
    table.add_prefix(counterexample)
    return close_and_make_consistent(table, oracle, max_queries)


class Learner:
    """Stateful wrapper driving the table; one instance per learning run."""

    def __init__(
        self,
        oracle: LanguageOracle,
        max_queries: int = DEFAULT_MAX_QUERIES,
        max_states: int = DEFAULT_MAX_STATES,
    ):
        self.oracle = oracle
        self.max_queries = max_queries
        self.max_states = max_states
        self.table = ObservationTable(oracle.alphabet)
        self.eq_rounds = 0

    def hypothesis(self) -> Hypothesis:
        close_and_make_consistent(self.table, self.oracle, self.max_queries)
        hyp = build_hypothesis(self.table, self.eq_rounds)
        if hyp.dfa.n_states > self.max_states:
            raise HypothesisSizeExceeded(hyp.dfa.n_states, self.max_states)
        return hyp

    def refine(self, counterexample: Sequence[int]) -> None:
        refine(self.table, tuple(counterexample), self.oracle, self.max_queries)


def pac_sample_count(epsilon: float, gamma: float, n: int) -> int:
    """Samples for the n-th PAC equivalence test:
    ceil((1/epsilon) * (ln(1/gamma) + ln(2) * (n + 1))).

    Logarithms are natural, consistent with the Hoeffding-style derivation;
    the base is a fixed constant so reported counts stay comparable.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon {epsilon} outside (0, 1)")
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma {gamma} outside (0, 1]")
    if n < 0:
        raise ValueError("completed equivalence-query count must be >= 0")
    return math.ceil((math.log(1.0 / gamma) + math.log(2.0) * (n + 1)) / epsilon)
