import itertools

import pytest

from pdv.automata import Alphabet, Dfa, accepts, ascii_alphabet


def words_up_to(n_letters: int, max_len: int):
    """All words over an alphabet of n_letters, lengths 0..max_len."""
    for length in range(max_len + 1):
        yield from itertools.product(range(n_letters), repeat=length)


def language_equal(d1: Dfa, d2: Dfa, max_len: int) -> bool:
    return all(
        accepts(d1, w) == accepts(d2, w)
        for w in words_up_to(len(d1.alphabet), max_len)
    )


def brute_inclusion_witness(d1: Dfa, d2: Dfa, max_len: int):
    """Shortest-then-lex word in L(d1) \\ L(d2) up to max_len, else None."""
    for w in words_up_to(len(d1.alphabet), max_len):
        if accepts(d1, w) and not accepts(d2, w):
            return w
    return None


@pytest.fixture(scope="session")
def fig2_dfa() -> Dfa:
    """Five-state automaton with the (a,b,c,e) cycle through its initial
    state; used by the reach/loop fixtures."""
    alpha = ascii_alphabet(5)
    edges = {
        0: {"e": 1, "a": 3, "c": 3, "b": 4, "d": 4},
        1: {"a": 0, "b": 4, "c": 4, "d": 4, "e": 4},
        2: {"e": 0, "b": 2, "c": 2, "d": 2, "a": 3},
        3: {"b": 2, "a": 4, "c": 4, "d": 4, "e": 4},
        4: {"a": 3, "c": 3, "b": 4, "d": 4, "e": 4},
    }
    rows = tuple(tuple(edges[s][l] for l in alpha.letters) for s in range(5))
    return Dfa(alpha, 5, 0, frozenset({0}), rows)


@pytest.fixture(scope="session")
def parity_dfa() -> Dfa:
    """Two-state automaton over {a} accepting odd-length words."""
    return Dfa(Alphabet(("a",)), 2, 0, frozenset({1}), ((1,), (0,)))


def universal_dfa(alphabet: Alphabet) -> Dfa:
    return Dfa(alphabet, 1, 0, frozenset({0}), ((0,) * len(alphabet),))


def empty_dfa(alphabet: Alphabet) -> Dfa:
    return Dfa(alphabet, 1, 0, frozenset(), ((0,) * len(alphabet),))


@pytest.fixture(scope="session")
def ab_alphabet() -> Alphabet:
    return Alphabet(("a", "b"))
