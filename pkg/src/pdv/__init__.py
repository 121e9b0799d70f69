"""Verification toolkit for black-box sequence classifiers against regular
specifications: DFA algebra, active learning, statistical model checking,
property-directed verification, and counterexample generalization."""

from .automata import (
    Alphabet,
    Dfa,
    Word,
    accepts,
    ascii_alphabet,
    check_inclusion,
    complement,
    derive_specs,
    load_dfa,
    minimize,
    product,
    random_dfa,
    reach,
    save_dfa,
    shortest_accepted,
)
from .faultyflow import FaultyFlowReport, detect, find_loops
from .lstar import Learner, ObservationTable, pac_sample_count
from .oracle import (
    DfaOracle,
    FaultInjectedOracle,
    LanguageOracle,
    RnnModel,
    RnnOracle,
    load_rnn_model,
    rnn_classify,
    save_rnn_model,
)
from .sampling import WordDistribution, sample_word, uniform_distribution, word_probability
from .verify import Budgets, RunStats, Verdict, aamc, pdv, smc_check, smc_sample_count

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "Budgets",
    "Dfa",
    "DfaOracle",
    "FaultInjectedOracle",
    "FaultyFlowReport",
    "LanguageOracle",
    "Learner",
    "ObservationTable",
    "RnnModel",
    "RnnOracle",
    "RunStats",
    "Verdict",
    "Word",
    "WordDistribution",
    "aamc",
    "accepts",
    "ascii_alphabet",
    "check_inclusion",
    "complement",
    "derive_specs",
    "detect",
    "find_loops",
    "load_dfa",
    "load_rnn_model",
    "minimize",
    "pac_sample_count",
    "pdv",
    "product",
    "random_dfa",
    "reach",
    "rnn_classify",
    "sample_word",
    "save_dfa",
    "save_rnn_model",
    "shortest_accepted",
    "smc_check",
    "smc_sample_count",
    "uniform_distribution",
    "word_probability",
]
