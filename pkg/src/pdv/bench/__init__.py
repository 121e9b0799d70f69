"""Experiment harness: benchmark generation, suite execution, reporting."""

from .suite import (
    ALGORITHMS,
    SuiteParams,
    aggregate,
    build_oracle,
    format_report,
    load_records,
    report_csv,
    run_one,
    run_suite,
)
from .synthetic import GenParams, gen_benchmark, make_loop_fault, pattern_dfa, read_dataset, write_dataset
from .temporal import (
    TemporalNetwork,
    build_path_spec_dfa,
    gen_contact_dataset,
    parse_temporal_network,
    time_respecting,
)

__all__ = [
    "ALGORITHMS",
    "GenParams",
    "SuiteParams",
    "TemporalNetwork",
    "aggregate",
    "build_oracle",
    "build_path_spec_dfa",
    "format_report",
    "gen_benchmark",
    "gen_contact_dataset",
    "load_records",
    "make_loop_fault",
    "parse_temporal_network",
    "pattern_dfa",
    "read_dataset",
    "report_csv",
    "run_one",
    "run_suite",
    "time_respecting",
    "write_dataset",
]
