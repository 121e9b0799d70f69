"""Command-line entry point: benchmark generation, contact datasets,
verification runs, faulty-flow analysis, and reporting.

All parameters can also come from a TOML config file; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from ..automata import load_dfa
from ..faultyflow import detect
from ..oracle import DfaOracle, FaultInjectedOracle, RnnOracle, load_rnn_model
from . import suite as suite_mod
from . import synthetic, temporal
from .suite import SuiteParams


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _config_get(config: dict, dotted: str, default):
    node = config
    *heads, leaf = dotted.split(".")
    for head in heads:
        node = node.get(head, {}) if isinstance(node, dict) else {}
    if isinstance(node, dict) and leaf in node:
        return node[leaf]
    return default


def _suite_params(args, config: dict) -> SuiteParams:
    def pick(flag_value, key, default):
        if flag_value is not None:
            return flag_value
        return _config_get(config, key, default)

    letter_probs = _config_get(config, "sampling.letter_probs", None)
    return SuiteParams(
        epsilon=float(pick(args.epsilon, "verify.epsilon", 0.001)),
        gamma=float(pick(args.gamma, "verify.gamma", 0.001)),
        stop_prob=float(pick(args.stop_prob, "sampling.stop_prob", 0.05)),
        letter_probs=tuple(letter_probs) if letter_probs is not None else None,
        max_len=int(pick(args.max_len, "sampling.max_len", 10_000)),
        timeout=float(pick(args.timeout, "verify.timeout", 600.0)),
        max_queries=int(pick(args.max_queries, "verify.max_queries", 10_000_000)),
        max_rounds=int(pick(args.max_rounds, "verify.max_rounds", 200)),
        mode=str(pick(args.mode, "verify.mode", "paper")),
        faulty_flow=bool(getattr(args, "faulty_flow", False)),
    )


def _seed(args, config: dict, required: bool) -> int | None:
    seed = args.seed if args.seed is not None else _config_get(config, "seed", None)
    if seed is None and required:
        raise SystemExit("error: --seed is required for suite runs")
    return int(seed) if seed is not None else None


def _add_verify_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--epsilon", type=float, default=None)
    parser.add_argument("--gamma", type=float, default=None)
    parser.add_argument("--stop-prob", dest="stop_prob", type=float, default=None)
    parser.add_argument("--max-len", dest="max_len", type=int, default=None)
    parser.add_argument("--timeout", type=float, default=None)
    parser.add_argument("--max-queries", dest="max_queries", type=int, default=None)
    parser.add_argument("--max-rounds", dest="max_rounds", type=int, default=None)
    parser.add_argument("--mode", choices=("paper", "hoeffding"), default=None)


def _build_cli_oracle(args):
    if args.oracle == "dfa":
        if args.dfa is None:
            raise SystemExit("error: --oracle dfa needs --dfa FILE")
        return DfaOracle(load_dfa(args.dfa))
    if args.oracle == "xor":
        if args.base is None or args.fault is None:
            raise SystemExit("error: --oracle xor needs --base FILE and --fault FILE")
        return FaultInjectedOracle(load_dfa(args.base), load_dfa(args.fault))
    if args.oracle == "rnn":
        if args.model is None:
            raise SystemExit("error: --oracle rnn needs --model FILE")
        return RnnOracle(load_rnn_model(args.model))
    raise SystemExit(f"error: unknown oracle {args.oracle!r}")


def cmd_gen_bench(args) -> int:
    config = _load_config(args.config)
    seed = _seed(args, config, required=True)
    params = synthetic.GenParams(
        count=args.count,
        n_max=args.n_max,
        alphabet_size=args.alphabet_size,
        specs_per_dfa=args.specs_per_dfa,
        stop_prob=(
            args.stop_prob
            if args.stop_prob is not None
            else _config_get(config, "sampling.stop_prob", 0.05)
        ),
        train_size=args.train_size,
        test_size=args.test_size,
        fault=args.fault,
    )
    manifest = synthetic.gen_benchmark(params, seed, args.out)
    print(
        f"wrote {len(manifest['instances'])} instances to {args.out} "
        f"({manifest['rerolls']} re-rolls)"
    )
    return 0


def cmd_gen_contact(args) -> int:
    config = _load_config(args.config)
    seed = _seed(args, config, required=True)
    net = temporal.parse_temporal_network(args.network)
    train, test = temporal.gen_contact_dataset(net, seed, args.out)
    spec = temporal.build_path_spec_dfa(net)
    spec_path = os.path.join(args.out, "path_spec.dfa")
    from ..automata import save_dfa

    save_dfa(spec, spec_path)
    print(f"vertices: {net.n_vertices}, edges: {len(net.edges)}")
    print(f"wrote {train}, {test}, {spec_path}")
    return 0


def cmd_verify(args) -> int:
    config = _load_config(args.config)
    params = _suite_params(args, config)
    if args.manifest is not None:
        seed = _seed(args, config, required=True)
        methods = [m.strip() for m in args.method.split(",")] if args.method else list(
            suite_mod.ALGORITHMS
        )
        records = suite_mod.run_suite(
            args.manifest, methods, params, args.out, seed, workers=args.workers
        )
        failures = sum(1 for r in records if "error" in r)
        print(f"{len(records)} runs appended to {args.out} ({failures} failed)")
        return 0
    if args.spec is None:
        raise SystemExit("error: single-run mode needs --spec FILE")
    if args.method is None or "," in args.method:
        raise SystemExit("error: single-run mode needs exactly one --method")
    seed = _seed(args, config, required=False)
    if seed is None:
        seed = 0
    spec = load_dfa(args.spec)
    oracle = _build_cli_oracle(args)
    verdict = suite_mod.run_one(oracle, spec, args.method, params, seed)
    record = suite_mod.verdict_record(
        verdict, args.instance_id, os.path.basename(args.spec), args.method,
        params, seed, spec.alphabet.render,
    )
    print(json.dumps(record, indent=1, sort_keys=True))
    if args.out:
        with open(args.out, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    return 0


def cmd_faulty_flow(args) -> int:
    spec = load_dfa(args.spec)
    hyp = load_dfa(args.hypothesis)
    oracle = _build_cli_oracle(args)
    word = spec.alphabet.word(args.word.replace(",", " ").split())
    report = detect(
        oracle, spec, hyp, word,
        pump_max=args.pump_max, threshold=args.threshold,
        loop_max_len=args.loop_max_len, exhaustive=args.exhaustive,
    )
    doc = report.to_record()
    doc["word"] = list(spec.alphabet.render(word))
    if report.flow is not None:
        for key in ("prefix", "loop", "suffix"):
            doc[key] = list(spec.alphabet.render(getattr(report.flow, key)))
    print(json.dumps(doc, indent=1, sort_keys=True))
    return 0


def cmd_report(args) -> int:
    records = suite_mod.load_records(args.results)
    rows = suite_mod.aggregate(records)
    print(suite_mod.format_report(rows), end="")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(suite_mod.report_csv(rows))
        print(f"csv written to {args.csv}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdv",
        description=(
            "Verify black-box sequence classifiers against DFA specifications "
            "via statistical model checking, automaton extraction, or "
            "property-directed verification."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-bench", help="generate a synthetic benchmark")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--n-max", dest="n_max", type=int, default=30)
    p.add_argument("--alphabet-size", dest="alphabet_size", type=int, default=5)
    p.add_argument("--specs-per-dfa", dest="specs_per_dfa", type=int, default=5)
    p.add_argument("--train-size", dest="train_size", type=int, default=synthetic.DEFAULT_TRAIN_SIZE)
    p.add_argument("--test-size", dest="test_size", type=int, default=synthetic.DEFAULT_TEST_SIZE)
    p.add_argument("--fault", choices=("none", "loop"), default="none")
    p.add_argument("--stop-prob", dest="stop_prob", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_gen_bench)

    p = sub.add_parser("gen-contact", help="contact-sequence dataset from a temporal network")
    p.add_argument("--network", required=True, help="edge list: t u v per line")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_gen_contact)

    p = sub.add_parser("verify", help="run SMC/AAMC/PDV on an instance or a manifest")
    p.add_argument("--method", default=None, help="smc|aamc|pdv (comma list in suite mode)")
    p.add_argument("--manifest", default=None, help="suite mode: benchmark manifest")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--oracle", choices=("dfa", "xor", "rnn"), default="dfa")
    p.add_argument("--dfa", default=None, help="oracle DFA (oracle=dfa)")
    p.add_argument("--base", default=None, help="base DFA (oracle=xor)")
    p.add_argument("--fault", default=None, help="fault DFA (oracle=xor)")
    p.add_argument("--model", default=None, help="rnn v1 model file (oracle=rnn)")
    p.add_argument("--spec", default=None, help="specification DFA")
    p.add_argument("--instance-id", dest="instance_id", default="cli")
    p.add_argument("--faulty-flow", dest="faulty_flow", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="append run records here")
    p.add_argument("--config", default=None)
    _add_verify_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("faulty-flow", help="generalize a counterexample by pumping")
    p.add_argument("--spec", required=True)
    p.add_argument("--hypothesis", required=True)
    p.add_argument("--oracle", choices=("dfa", "xor", "rnn"), default="dfa")
    p.add_argument("--dfa", default=None)
    p.add_argument("--base", default=None)
    p.add_argument("--fault", default=None)
    p.add_argument("--model", default=None)
    p.add_argument("--word", required=True, help="letters, space or comma separated")
    p.add_argument("--pump-max", dest="pump_max", type=int, default=100)
    p.add_argument("--threshold", type=int, default=20)
    p.add_argument("--loop-max-len", dest="loop_max_len", type=int, default=12)
    p.add_argument("--exhaustive", action="store_true")
    p.set_defaults(func=cmd_faulty_flow)

    p = sub.add_parser("report", help="aggregate a results file")
    p.add_argument("--results", required=True)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
