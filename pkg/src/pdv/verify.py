"""The three verification algorithms: statistical model checking, automaton
abstraction with model checking, and property-directed verification.

Every run returns a Verdict carrying full run statistics.  Counterexamples
are re-checked against the oracle and the specification immediately before
being returned, so a CounterexampleFound is always sound.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

from . import lstar
from .automata import Dfa, Word, accepts, check_inclusion
from .oracle import LanguageOracle
from .sampling import DEFAULT_MAX_LEN, WordDistribution, sample_word

COUNTEREXAMPLE = "counterexample"
SATISFIED = "satisfied"
BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass
class RunStats:
    wall_time: float = 0.0
    membership_queries: int = 0
    eq_rounds: int = 0
    hypothesis_sizes: list[int] = field(default_factory=list)
    sampled_words: int = 0
    truncated_samples: int = 0
    counterexample_length: int | None = None
    final_hypothesis_size: int | None = None
    spurious_counterexample: Word | None = None


@dataclass
class Verdict:
    outcome: str
    stats: RunStats
    counterexample: Word | None = None
    confirmed: bool = False
    epsilon: float | None = None
    gamma: float | None = None
    reason: str | None = None
    hypothesis: Dfa | None = None  # final hypothesis of aamc/pdv runs

    @classmethod
    def found(cls, word: Word, stats: RunStats) -> "Verdict":
        stats.counterexample_length = len(word)
        return cls(COUNTEREXAMPLE, stats, counterexample=word, confirmed=True)

    @classmethod
    def satisfied(cls, epsilon: float, gamma: float, stats: RunStats) -> "Verdict":
        return cls(SATISFIED, stats, epsilon=epsilon, gamma=gamma)

    @classmethod
    def exhausted(cls, reason: str, stats: RunStats) -> "Verdict":
        return cls(BUDGET_EXHAUSTED, stats, reason=reason)


@dataclass(frozen=True)
class Budgets:
    """Paper-style defaults: ten-minute wall clock, 1e7 MQs, 200 rounds."""

    max_seconds: float = 600.0
    max_queries: int = lstar.DEFAULT_MAX_QUERIES
    max_rounds: int = 200
    max_states: int = lstar.DEFAULT_MAX_STATES


class _Deadline:
    def __init__(self, seconds: float):
        self.t0 = time.perf_counter()
        self.limit = seconds

    def exceeded(self) -> bool:
        return time.perf_counter() - self.t0 > self.limit

    def elapsed(self) -> float:
        return time.perf_counter() - self.t0


def smc_sample_count(epsilon: float, gamma: float, mode: str = "paper") -> int:
    """Sample count for one statistical run.

    `paper` follows the published loop bound ceil(ln(2/epsilon)/(2*gamma^2));
    `hoeffding` swaps the roles of the parameters per the standard bound
    derivation.  The two coincide whenever epsilon == gamma.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon {epsilon} outside (0, 1)")
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma {gamma} outside (0, 1)")
    if mode == "paper":
        return math.ceil(math.log(2.0 / epsilon) / (2.0 * gamma * gamma))
    if mode == "hoeffding":
        return math.ceil(math.log(2.0 / gamma) / (2.0 * epsilon * epsilon))
    raise ValueError(f"unknown mode {mode!r}")


def _confirm(oracle: LanguageOracle, spec: Dfa, word: Word) -> None:
    # Verdict invariant: re-check both sides right before returning.
    if not oracle.membership(word):
        raise RuntimeError(f"oracle retracted counterexample {word}; nondeterministic?")
    if accepts(spec, word):
        raise RuntimeError(f"word {word} is not rejected by the specification")


def _draw(
    dist: WordDistribution, rng: random.Random, max_len: int, stats: RunStats
) -> Word:
    w = sample_word(dist, rng, max_len)
    stats.sampled_words += 1
    if len(w) == max_len:
        stats.truncated_samples += 1
    return w


def smc_check(
    oracle: LanguageOracle,
    spec: Dfa,
    dist: WordDistribution,
    epsilon: float,
    gamma: float,
    rng: random.Random,
    mode: str = "paper",
    max_len: int = DEFAULT_MAX_LEN,
    budgets: Budgets = Budgets(),
) -> Verdict:
    """Random testing: sample words, report the first sampled word the oracle
    accepts but the specification rejects.  A pass means the oracle language
    is epsilon-approximately included in the specification with probability
    at least 1 - gamma under the sampling distribution."""
    stats = RunStats()
    deadline = _Deadline(budgets.max_seconds)
    q0 = oracle.num_queries
    n = smc_sample_count(epsilon, gamma, mode)
    verdict = None
    for i in range(n):
        if i % 256 == 0 and deadline.exceeded():
            verdict = Verdict.exhausted("wall-clock budget", stats)
            break
        w = _draw(dist, rng, max_len, stats)
        if oracle.membership(w) and not accepts(spec, w):
            _confirm(oracle, spec, w)
            verdict = Verdict.found(w, stats)
            break
    if verdict is None:
        verdict = Verdict.satisfied(epsilon, gamma, stats)
    stats.membership_queries = oracle.num_queries - q0
    stats.wall_time = deadline.elapsed()
    return verdict


def smc_inclusion(
    oracle: LanguageOracle,
    hyp: Dfa,
    dist: WordDistribution,
    n_samples: int,
    rng: random.Random,
    max_len: int = DEFAULT_MAX_LEN,
    stats: RunStats | None = None,
    deadline: _Deadline | None = None,
) -> Word | None:
    """Sampled test of L(oracle) included in L(hyp): returns the first sampled
    word the oracle accepts and the hypothesis rejects, None if none found."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    stats = stats if stats is not None else RunStats()
    for i in range(n_samples):
        if deadline is not None and i % 256 == 0 and deadline.exceeded():
            raise _WallClockExceeded()
        w = _draw(dist, rng, max_len, stats)
        if oracle.membership(w) and not accepts(hyp, w):
            return w
    return None


def _sampled_equivalence(
    oracle: LanguageOracle,
    hyp: Dfa,
    dist: WordDistribution,
    n_samples: int,
    rng: random.Random,
    max_len: int,
    stats: RunStats,
    deadline: _Deadline,
) -> Word | None:
    """PAC equivalence test: first sampled word where oracle and hypothesis
    disagree, in either direction."""
    for i in range(n_samples):
        if deadline is not None and i % 256 == 0 and deadline.exceeded():
            raise _WallClockExceeded()
        w = _draw(dist, rng, max_len, stats)
        if oracle.membership(w) != accepts(hyp, w):
            return w
    return None


class _WallClockExceeded(Exception):
    pass


def aamc(
    oracle: LanguageOracle,
    spec: Dfa,
    dist: WordDistribution,
    epsilon: float,
    gamma: float,
    rng: random.Random,
    budgets: Budgets = Budgets(),
    max_len: int = DEFAULT_MAX_LEN,
) -> Verdict:
    """Extract-then-check: run PAC learning to completion, then model-check
    the extracted automaton against the specification once.

    A model-checking witness is confirmed on the oracle; an unconfirmed one
    is reported as spurious (this variant does not loop back - the looping
    variant is pdv)."""
    stats = RunStats()
    deadline = _Deadline(budgets.max_seconds)
    q0 = oracle.num_queries
    learner = lstar.Learner(oracle, budgets.max_queries, budgets.max_states)
    extracted: Dfa | None = None
    verdict: Verdict | None = None
    try:
        while True:
            if deadline.exceeded():
                verdict = Verdict.exhausted("wall-clock budget", stats)
                break
            if stats.eq_rounds >= budgets.max_rounds:
                verdict = Verdict.exhausted("equivalence-round budget", stats)
                break
            hyp = learner.hypothesis()
            stats.hypothesis_sizes.append(hyp.dfa.n_states)
            n_samples = lstar.pac_sample_count(epsilon, gamma, learner.eq_rounds)
            cex = _sampled_equivalence(
                oracle, hyp.dfa, dist, n_samples, rng, max_len, stats, deadline
            )
            learner.eq_rounds += 1
            stats.eq_rounds += 1
            if cex is None:
                extracted = hyp.dfa
                break
            learner.refine(cex)
    except lstar.QueryBudgetExceeded:
        verdict = Verdict.exhausted("membership-query budget", stats)
    except lstar.HypothesisSizeExceeded:
        verdict = Verdict.exhausted("hypothesis-size budget", stats)
    except _WallClockExceeded:
        verdict = Verdict.exhausted("wall-clock budget", stats)

    if extracted is not None:
        stats.final_hypothesis_size = extracted.n_states
        witness = check_inclusion(extracted, spec)
        if witness is None:
            verdict = Verdict.satisfied(epsilon, gamma, stats)
        elif oracle.membership(witness):
            _confirm(oracle, spec, witness)
            verdict = Verdict.found(witness, stats)
        else:
            stats.spurious_counterexample = witness
            verdict = Verdict.exhausted("spurious counterexample", stats)
        verdict.hypothesis = extracted
    stats.membership_queries = oracle.num_queries - q0
    stats.wall_time = deadline.elapsed()
    return verdict


def pdv(
    oracle: LanguageOracle,
    spec: Dfa,
    dist: WordDistribution,
    epsilon: float,
    gamma: float,
    rng: random.Random,
    budgets: Budgets = Budgets(),
    max_len: int = DEFAULT_MAX_LEN,
    pac_schedule: bool = True,
    mode: str = "paper",
) -> Verdict:
    """Property-directed verification: interleave learning with model
    checking of every hypothesis against the specification.

    Model-checking witnesses confirmed by the oracle are returned as real
    counterexamples; rejected witnesses and sampled inclusion failures refine
    the hypothesis.  A sampled inclusion pass yields the statistical
    correctness guarantee."""
    stats = RunStats()
    deadline = _Deadline(budgets.max_seconds)
    q0 = oracle.num_queries
    learner = lstar.Learner(oracle, budgets.max_queries, budgets.max_states)
    verdict: Verdict | None = None
    last_dfa: Dfa | None = None
    rounds = 0
    try:
        while True:
            if deadline.exceeded():
                verdict = Verdict.exhausted("wall-clock budget", stats)
                break
            if rounds >= budgets.max_rounds:
                verdict = Verdict.exhausted("refinement-round budget", stats)
                break
            rounds += 1
            hyp = learner.hypothesis()
            last_dfa = hyp.dfa
            stats.hypothesis_sizes.append(hyp.dfa.n_states)
            stats.final_hypothesis_size = hyp.dfa.n_states
            witness = check_inclusion(hyp.dfa, spec)
            if witness is not None:
                if oracle.membership(witness):
                    _confirm(oracle, spec, witness)
                    verdict = Verdict.found(witness, stats)
                    break
                learner.refine(witness)
                continue
            if pac_schedule:
                n_samples = lstar.pac_sample_count(epsilon, gamma, learner.eq_rounds)
            else:
                n_samples = smc_sample_count(epsilon, gamma, mode)
            cex = smc_inclusion(
                oracle, hyp.dfa, dist, n_samples, rng, max_len, stats, deadline
            )
            learner.eq_rounds += 1
            stats.eq_rounds += 1
            if cex is None:
                verdict = Verdict.satisfied(epsilon, gamma, stats)
                break
            learner.refine(cex)
    except lstar.QueryBudgetExceeded:
        verdict = Verdict.exhausted("membership-query budget", stats)
    except lstar.HypothesisSizeExceeded:
        verdict = Verdict.exhausted("hypothesis-size budget", stats)
    except _WallClockExceeded:
        verdict = Verdict.exhausted("wall-clock budget", stats)
    verdict.hypothesis = last_dfa
    stats.membership_queries = oracle.num_queries - q0
    stats.wall_time = deadline.elapsed()
    return verdict
