"""Random word sampling: per-letter distribution plus geometric termination.

A draw emits letters until a stop coin with probability `stop_prob` succeeds,
so word length is geometric with expectation (1/stop_prob) - 1.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass, field

from .automata import Word

DEFAULT_STOP_PROB = 0.05
DEFAULT_MAX_LEN = 10_000


@dataclass(frozen=True)
class WordDistribution:
    letter_probs: tuple[float, ...]
    stop_prob: float = DEFAULT_STOP_PROB
    _cumulative: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "letter_probs", tuple(float(p) for p in self.letter_probs))
        if not self.letter_probs:
            raise ValueError("letter_probs must be nonempty")
        if any(p < 0 for p in self.letter_probs):
            raise ValueError("letter probabilities must be nonnegative")
        total = sum(self.letter_probs)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"letter probabilities sum to {total}, expected 1")
        if not 0.0 < self.stop_prob <= 1.0:
            raise ValueError(f"stop_prob {self.stop_prob} outside (0, 1]")
        object.__setattr__(
            self, "_cumulative", tuple(itertools.accumulate(self.letter_probs))
        )


def uniform_distribution(n_letters: int, stop_prob: float = DEFAULT_STOP_PROB) -> WordDistribution:
    return WordDistribution((1.0 / n_letters,) * n_letters, stop_prob)


def sample_word(
    dist: WordDistribution, rng: random.Random, max_len: int = DEFAULT_MAX_LEN
) -> Word:
    """Draw one word.

    Sampling stops unconditionally once `max_len` letters have been emitted,
    so a returned word of length exactly `max_len` is a truncated draw (the
    final stop coin was never flipped); callers count those in run stats.
    """
    letters: list[int] = []
    cumulative = dist._cumulative
    while len(letters) < max_len:
        if rng.random() < dist.stop_prob:
            break
        u = rng.random()
        for i, c in enumerate(cumulative):
            if u < c:
                letters.append(i)
                break
        else:
            letters.append(len(cumulative) - 1)
    return tuple(letters)


def word_probability(dist: WordDistribution, word: Word) -> float:
    """P(w) = p_a1 * ... * p_an * (1 - stop)^n * stop."""
    p = dist.stop_prob
    keep = 1.0 - dist.stop_prob
    for a in word:
        if not 0 <= a < len(dist.letter_probs):
            raise ValueError(f"letter index {a} outside alphabet")
        p *= dist.letter_probs[a] * keep
    return p


def spawn_rng(master_seed: int, *tags) -> random.Random:
    """Deterministic per-worker/per-run generator derived from a master seed.

    Hash-based so the derivation is independent of PYTHONHASHSEED and stable
    across platforms.
    """
    digest = hashlib.sha256(repr((master_seed,) + tags).encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))
