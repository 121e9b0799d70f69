"""Suite execution across SMC/AAMC/PDV and Table-style reporting.

One JSON run record per execution, appended to a newline-delimited results
file with per-record fsync so a crashing run never corrupts earlier records.
"""

from __future__ import annotations

import csv
import io
import json
import os
import traceback
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass

from .. import verify
from ..automata import Dfa, load_dfa
from ..faultyflow import detect
from ..oracle import DfaOracle, FaultInjectedOracle, LanguageOracle, RnnOracle, load_rnn_model
from ..sampling import WordDistribution, spawn_rng, uniform_distribution
from ..verify import Budgets, Verdict

ALGORITHMS = ("smc", "aamc", "pdv")


@dataclass
class SuiteParams:
    epsilon: float = 0.001
    gamma: float = 0.001
    stop_prob: float = 0.05
    letter_probs: tuple[float, ...] | None = None  # None: uniform
    max_len: int = 10_000
    timeout: float = 600.0
    max_queries: int = 10_000_000
    max_rounds: int = 200
    mode: str = "paper"
    faulty_flow: bool = False

    def distribution(self, n_letters: int) -> WordDistribution:
        if self.letter_probs is not None:
            if len(self.letter_probs) != n_letters:
                raise ValueError(
                    f"letter_probs has {len(self.letter_probs)} entries for an "
                    f"alphabet of {n_letters}"
                )
            return WordDistribution(self.letter_probs, self.stop_prob)
        return uniform_distribution(n_letters, self.stop_prob)


def build_oracle(descriptor: dict, base_dir: str, truth_path: str) -> LanguageOracle:
    kind = descriptor.get("kind")
    truth = load_dfa(os.path.join(base_dir, truth_path))
    if kind == "dfa":
        return DfaOracle(truth)
    if kind == "xor":
        fault = load_dfa(os.path.join(base_dir, descriptor["fault"]))
        return FaultInjectedOracle(truth, fault)
    if kind == "rnn":
        model = load_rnn_model(os.path.join(base_dir, descriptor["model"]))
        return RnnOracle(model)
    raise ValueError(f"unknown oracle kind {kind!r}")


def run_one(
    oracle: LanguageOracle,
    spec: Dfa,
    algorithm: str,
    params: SuiteParams,
    seed: int,
) -> Verdict:
    dist = params.distribution(len(oracle.alphabet))
    rng = spawn_rng(seed, algorithm)
    budgets = Budgets(
        max_seconds=params.timeout,
        max_queries=params.max_queries,
        max_rounds=params.max_rounds,
    )
    if algorithm == "smc":
        return verify.smc_check(
            oracle, spec, dist, params.epsilon, params.gamma, rng,
            mode=params.mode, max_len=params.max_len, budgets=budgets,
        )
    if algorithm == "aamc":
        return verify.aamc(
            oracle, spec, dist, params.epsilon, params.gamma, rng,
            budgets=budgets, max_len=params.max_len,
        )
    if algorithm == "pdv":
        return verify.pdv(
            oracle, spec, dist, params.epsilon, params.gamma, rng,
            budgets=budgets, max_len=params.max_len,
        )
    raise ValueError(f"unknown algorithm {algorithm!r}")


def verdict_record(
    verdict: Verdict,
    instance_id: str,
    spec_name: str,
    algorithm: str,
    params: SuiteParams,
    seed: int,
    letters,
) -> dict:
    s = verdict.stats
    record = {
        "instance": instance_id,
        "spec": spec_name,
        "algorithm": algorithm,
        "parameters": {
            "epsilon": params.epsilon,
            "gamma": params.gamma,
            "stop_prob": params.stop_prob,
            "letter_probs": (
                list(params.letter_probs) if params.letter_probs is not None else None
            ),
            "max_len": params.max_len,
            "timeout": params.timeout,
            "mode": params.mode,
        },
        "seed": seed,
        "outcome": verdict.outcome,
        "confirmed": verdict.confirmed,
        "counterexample": (
            list(letters(verdict.counterexample))
            if verdict.counterexample is not None
            else None
        ),
        "reason": verdict.reason,
        "stats": {
            "wall_time": s.wall_time,
            "membership_queries": s.membership_queries,
            "eq_rounds": s.eq_rounds,
            "hypothesis_sizes": s.hypothesis_sizes,
            "sampled_words": s.sampled_words,
            "truncated_samples": s.truncated_samples,
            "counterexample_length": s.counterexample_length,
            "final_hypothesis_size": s.final_hypothesis_size,
            "spurious_counterexample": (
                list(letters(s.spurious_counterexample))
                if s.spurious_counterexample is not None
                else None
            ),
        },
    }
    return record


def _execute(task) -> dict:
    base_dir, instance, spec_name, algorithm, params, seed = task
    spec = load_dfa(os.path.join(base_dir, spec_name))
    oracle = build_oracle(instance["oracle"], base_dir, instance["dfa"])
    try:
        verdict = run_one(oracle, spec, algorithm, params, seed)
        record = verdict_record(
            verdict, instance["id"], spec_name, algorithm, params, seed,
            spec.alphabet.render,
        )
        if (
            params.faulty_flow
            and algorithm == "pdv"
            and verdict.outcome == verify.COUNTEREXAMPLE
            and verdict.hypothesis is not None
        ):
            report = detect(oracle, spec, verdict.hypothesis, verdict.counterexample)
            record["faulty_flow"] = report.to_record()
        return record
    except Exception:
        return {
            "instance": instance["id"],
            "spec": spec_name,
            "algorithm": algorithm,
            "seed": seed,
            "error": traceback.format_exc(limit=5),
        }


def run_suite(
    manifest_path: str,
    algorithms,
    params: SuiteParams,
    out_path: str,
    seed: int,
    workers: int = 1,
) -> list[dict]:
    with open(manifest_path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    base_dir = os.path.dirname(os.path.abspath(manifest_path))
    for algorithm in algorithms:
        if algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algorithm!r}")
    tasks = []
    for instance in manifest["instances"]:
        for spec_name in instance["specs"]:
            for algorithm in algorithms:
                run_seed = _run_seed(seed, instance["id"], spec_name, algorithm)
                tasks.append((base_dir, instance, spec_name, algorithm, params, run_seed))
    records = []
    with open(out_path, "a", encoding="utf-8") as fh:
        def emit(record: dict) -> None:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
            records.append(record)

        if workers <= 1:
            for task in tasks:
                emit(_execute(task))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_execute, t) for t in tasks]
                for future in as_completed(futures):
                    emit(future.result())
            records.sort(key=lambda r: (r["instance"], r.get("spec", ""), r["algorithm"]))
    return records


def _run_seed(master: int, instance_id: str, spec_name: str, algorithm: str) -> int:
    return spawn_rng(master, instance_id, spec_name, algorithm).randrange(2**63)


def load_records(path: str) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


REPORT_COLUMNS = (
    "algorithm", "runs", "avg_time_s", "avg_cex_len", "mistakes", "avg_mqs",
    "avg_dfa_size",
)


def aggregate(records: list[dict]) -> list[dict]:
    """Per-algorithm means mirroring the benchmark table layout: average wall
    time, average counterexample length, number of runs with a confirmed
    mistake, average membership queries, average final/extracted DFA size."""
    rows = []
    by_algorithm: dict[str, list[dict]] = {}
    for record in records:
        if "error" in record:
            continue
        by_algorithm.setdefault(record["algorithm"], []).append(record)
    for algorithm in sorted(by_algorithm):
        group = by_algorithm[algorithm]
        lens = [
            r["stats"]["counterexample_length"]
            for r in group
            if r["stats"].get("counterexample_length") is not None
        ]
        sizes = [
            r["stats"]["final_hypothesis_size"]
            for r in group
            if r["stats"].get("final_hypothesis_size") is not None
        ]
        rows.append(
            {
                "algorithm": algorithm,
                "runs": len(group),
                "avg_time_s": _mean(r["stats"]["wall_time"] for r in group),
                "avg_cex_len": _mean(lens) if lens else None,
                "mistakes": sum(1 for r in group if r["outcome"] == "counterexample"),
                "avg_mqs": _mean(r["stats"]["membership_queries"] for r in group),
                "avg_dfa_size": _mean(sizes) if sizes else None,
            }
        )
    return rows


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values)


def format_report(rows: list[dict]) -> str:
    header = ("Type", "Runs", "Avg time (s)", "Avg len", "# Mistakes", "Avg MQs", "Avg DFA size")
    table = [header]
    for row in rows:
        table.append(
            (
                row["algorithm"],
                str(row["runs"]),
                f"{row['avg_time_s']:.2f}",
                "-" if row["avg_cex_len"] is None else f"{row['avg_cex_len']:.1f}",
                str(row["mistakes"]),
                f"{row['avg_mqs']:.0f}",
                "-" if row["avg_dfa_size"] is None else f"{row['avg_dfa_size']:.1f}",
            )
        )
    widths = [max(len(r[c]) for r in table) for c in range(len(header))]
    lines = []
    for r in table:
        lines.append("  ".join(cell.rjust(w) for cell, w in zip(r, widths)))
    return "\n".join(lines) + "\n"


def report_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
