import filecmp
import json
import math
import os
import random

import pytest

from pdv.automata import accepts, ascii_alphabet, check_inclusion, complement, load_dfa, shortest_accepted
from pdv.bench import (
    GenParams,
    SuiteParams,
    aggregate,
    build_path_spec_dfa,
    format_report,
    gen_benchmark,
    gen_contact_dataset,
    load_records,
    make_loop_fault,
    parse_temporal_network,
    pattern_dfa,
    read_dataset,
    report_csv,
    run_suite,
    time_respecting,
)
from pdv.bench.cli import main as cli_main
from pdv.bench.temporal import TemporalNetwork
from pdv.oracle import FaultInjectedOracle

from conftest import words_up_to

FIG3_EDGES = "14 A B\n10 B C\n9 C D\n10 A D\n12 B D\n"


@pytest.fixture
def fig3_net(tmp_path) -> TemporalNetwork:
    path = tmp_path / "fig3.txt"
    path.write_text("# office contacts\n" + FIG3_EDGES)
    return parse_temporal_network(path)


def dense_network(tmp_path, n=8, stamps=3, seed=5) -> TemporalNetwork:
    """Every pair connected with a few random timestamps; admits long walks."""
    rng = random.Random(seed)
    lines = []
    names = [chr(ord("A") + i) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            for t in rng.sample(range(1, 60), stamps):
                lines.append(f"{t} {names[i]} {names[j]}")
    path = tmp_path / "dense.txt"
    path.write_text("\n".join(lines) + "\n")
    return parse_temporal_network(path)


class TestParseTemporalNetwork:
    def test_fig3_counts(self, fig3_net):
        assert fig3_net.n_vertices == 4
        assert len(fig3_net.edges) == 5

    def test_empty_file_is_valid(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("")
        net = parse_temporal_network(path)
        assert net.n_vertices == 0 and net.edges == ()

    def test_self_loop_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3 A A\n")
        with pytest.raises(ValueError, match="line 1.*self-loop"):
            parse_temporal_network(path)

    def test_malformed_line_number(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1 A B\nnot a line\n")
        with pytest.raises(ValueError, match="line 2"):
            parse_temporal_network(path)

    def test_comments_ignored(self, tmp_path):
        path = tmp_path / "c.txt"
        path.write_text("# header\n1 A B # trailing\n")
        assert len(parse_temporal_network(path).edges) == 1


class TestTimeRespecting:
    def test_fig3_cdab_true(self, fig3_net):
        assert time_respecting(fig3_net, ["C", "D", "A", "B"])

    def test_fig3_abcd_false(self, fig3_net):
        assert not time_respecting(fig3_net, ["A", "B", "C", "D"])

    def test_single_vertex(self, fig3_net):
        assert time_respecting(fig3_net, ["B"])

    def test_unknown_vertex(self, fig3_net):
        with pytest.raises(ValueError, match="unknown vertex"):
            time_respecting(fig3_net, ["A", "Z"])

    def test_non_adjacent_pair(self, fig3_net):
        assert not time_respecting(fig3_net, ["A", "C"])

    def test_strictness(self, tmp_path):
        # both edges share timestamp 5: no strictly increasing assignment
        path = tmp_path / "eq.txt"
        path.write_text("5 A B\n5 B C\n")
        net = parse_temporal_network(path)
        assert not time_respecting(net, ["A", "B", "C"])


def brute_force_time_respecting(net: TemporalNetwork, path) -> bool:
    idx = [net.vertex(v) for v in path]

    def extend(pos: int, last) -> bool:
        if pos == len(idx) - 1:
            return True
        stamps = net.timestamps(idx[pos], idx[pos + 1])
        return any(extend(pos + 1, t) for t in stamps if t > last)

    return extend(0, -math.inf)


class TestGreedyExactness:
    def test_greedy_brute_force(self, tmp_path):
        net = dense_network(tmp_path, n=5, stamps=2, seed=9)
        rng = random.Random(2)
        for _ in range(300):
            length = rng.randint(1, 6)
            path = [rng.randrange(net.n_vertices) for _ in range(length)]
            assert time_respecting(net, path) == brute_force_time_respecting(net, path)


class TestGenContactDataset:
    def test_sizes_and_labels(self, tmp_path):
        net = dense_network(tmp_path)
        out = tmp_path / "data"
        train_path, test_path = gen_contact_dataset(net, seed=4, out_dir=out)
        n_edges = len(net.edges)
        train = _read_raw(train_path)
        test = _read_raw(test_path)
        assert len(train) == 2 * n_edges
        assert len(test) == math.ceil(len(train) / 5)
        for label, path in train + test:
            assert time_respecting(net, path) == bool(label)
            assert 5 <= len(path) <= 15

    def test_balance(self, tmp_path):
        net = dense_network(tmp_path)
        out = tmp_path / "data"
        train_path, _ = gen_contact_dataset(net, seed=4, out_dir=out)
        train = _read_raw(train_path)
        positives = sum(label for label, _ in train)
        assert positives == len(train) // 2

    def test_seeded_determinism(self, tmp_path):
        net = dense_network(tmp_path)
        a = tmp_path / "a"
        b = tmp_path / "b"
        gen_contact_dataset(net, seed=11, out_dir=a)
        gen_contact_dataset(net, seed=11, out_dir=b)
        assert (a / "train.tsv").read_text() == (b / "train.tsv").read_text()
        assert (a / "test.tsv").read_text() == (b / "test.tsv").read_text()

    def test_too_small_network(self, fig3_net, tmp_path):
        # Fig. 3 has no 5-vertex time-respecting path at all
        with pytest.raises(ValueError, match="length >= 5"):
            gen_contact_dataset(fig3_net, seed=1, out_dir=tmp_path / "x")


def _read_raw(path):
    rows = []
    with open(path) as fh:
        for line in fh:
            label, text = line.rstrip("\n").split("\t")
            rows.append((int(label), text.split()))
    return rows


class TestPathSpecDfa:
    def test_fig3_accepts_static_path(self, fig3_net):
        spec = build_path_spec_dfa(fig3_net)
        assert accepts(spec, spec.alphabet.word(["A", "B", "C", "D"]))

    def test_rejects_non_adjacent(self, fig3_net):
        spec = build_path_spec_dfa(fig3_net)
        assert not accepts(spec, spec.alphabet.word(["A", "C"]))
        for w in words_up_to(4, 3):
            names = [fig3_net.names[i] for i in w]
            ok = all(
                fig3_net.timestamps(fig3_net.vertex(u), fig3_net.vertex(v))
                for u, v in zip(names, names[1:])
            )
            assert accepts(spec, w) == ok

    def test_state_count(self, fig3_net):
        assert build_path_spec_dfa(fig3_net).n_states == fig3_net.n_vertices + 2


class TestPatternDfa:
    def test_language_matches_brute_force(self):
        alpha = ascii_alphabet(2)
        prefix, loop, suffix = (0,), (0, 1), (1,)
        d = pattern_dfa(alpha, prefix, loop, suffix)
        expected = {prefix + loop * n + suffix for n in range(6)}
        for w in words_up_to(2, 10):
            assert accepts(d, w) == (w in expected)

    def test_loop_suffix_overlap(self):
        # suffix starts like the loop: determinization must not conflate them
        alpha = ascii_alphabet(2)
        d = pattern_dfa(alpha, (), (0, 1), (0,))
        expected = {(0, 1) * n + (0,) for n in range(6)}
        for w in words_up_to(2, 11):
            assert accepts(d, w) == (w in expected)

    def test_empty_prefix_suffix(self):
        alpha = ascii_alphabet(2)
        d = pattern_dfa(alpha, (), (0,), ())
        for w in words_up_to(2, 6):
            assert accepts(d, w) == all(a == 0 for a in w)


class TestMakeLoopFault:
    def test_fault_violates_spec_everywhere(self):
        rng = random.Random(50)
        hits = 0
        for seed in range(40):
            from pdv.automata import derive_specs, random_dfa

            inst_rng = random.Random(seed)
            base = random_dfa(8, ascii_alphabet(3), inst_rng)
            specs = [
                s
                for s in derive_specs(base, 3, inst_rng)
                if shortest_accepted(complement(s)) is not None
            ]
            if not specs:
                continue
            made = make_loop_fault(specs[0], rng)
            if made is None:
                continue
            hits += 1
            fault, prefix, loop, suffix = made
            for n in range(8):
                w = prefix + loop * n + suffix
                assert accepts(fault, w)
                assert not accepts(specs[0], w)
            assert check_inclusion(fault, complement(specs[0])) is None
        assert hits >= 10  # the construction succeeds often enough to matter


class TestGenBenchmark:
    def test_deterministic_byte_identical(self, tmp_path):
        params = GenParams(count=2, n_max=6, alphabet_size=3, specs_per_dfa=2,
                           train_size=50, test_size=10)
        a, b = tmp_path / "a", tmp_path / "b"
        gen_benchmark(params, seed=3, out_dir=a)
        gen_benchmark(params, seed=3, out_dir=b)
        names = sorted(os.listdir(a))
        assert names == sorted(os.listdir(b))
        for name in names:
            assert filecmp.cmp(a / name, b / name, shallow=False), name

    def test_specs_include_ground_truth(self, tmp_path):
        params = GenParams(count=3, n_max=8, alphabet_size=3, specs_per_dfa=3,
                           train_size=20, test_size=5)
        manifest = gen_benchmark(params, seed=9, out_dir=tmp_path)
        for inst in manifest["instances"]:
            truth = load_dfa(tmp_path / inst["dfa"])
            for spec_name in inst["specs"]:
                assert check_inclusion(truth, load_dfa(tmp_path / spec_name)) is None

    def test_dataset_labels_recheck(self, tmp_path):
        params = GenParams(count=1, n_max=6, alphabet_size=3, specs_per_dfa=2,
                           train_size=200, test_size=40)
        manifest = gen_benchmark(params, seed=13, out_dir=tmp_path)
        inst = manifest["instances"][0]
        truth = load_dfa(tmp_path / inst["dfa"])
        for name in (inst["train"], inst["test"]):
            rows = read_dataset(tmp_path / name, truth.alphabet)
            assert rows
            for label, word in rows:
                assert label == int(accepts(truth, word))

    def test_loop_fault_mode(self, tmp_path):
        params = GenParams(count=2, n_max=8, alphabet_size=4, specs_per_dfa=3,
                           train_size=20, test_size=5, fault="loop")
        manifest = gen_benchmark(params, seed=21, out_dir=tmp_path)
        for inst in manifest["instances"]:
            assert inst["oracle"]["kind"] == "xor"
            truth = load_dfa(tmp_path / inst["dfa"])
            fault = load_dfa(tmp_path / inst["oracle"]["fault"])
            spec = load_dfa(tmp_path / inst["specs"][0])
            # the fault is disjoint from the spec, so every fault word is a
            # genuine violation of the xor oracle
            assert check_inclusion(fault, complement(spec)) is None
            oracle = FaultInjectedOracle(truth, fault)
            witness = shortest_accepted(fault)
            assert oracle.membership(witness) and not accepts(spec, witness)


class TestSuiteAndReport:
    @pytest.fixture
    def small_manifest(self, tmp_path):
        params = GenParams(count=2, n_max=5, alphabet_size=2, specs_per_dfa=2,
                           train_size=10, test_size=5)
        gen_benchmark(params, seed=17, out_dir=tmp_path)
        return tmp_path / "manifest.json"

    def test_dfa_suite_all_satisfied(self, small_manifest, tmp_path):
        out = tmp_path / "results.jsonl"
        params = SuiteParams(epsilon=0.05, gamma=0.05, stop_prob=0.2, timeout=60)
        records = run_suite(str(small_manifest), ["smc", "pdv"], params, str(out), seed=1)
        assert records
        for r in records:
            assert "error" not in r
            assert r["outcome"] == "satisfied"

    def test_records_roundtrip(self, small_manifest, tmp_path):
        out = tmp_path / "results.jsonl"
        params = SuiteParams(epsilon=0.05, gamma=0.05, stop_prob=0.2, timeout=60)
        records = run_suite(str(small_manifest), ["pdv"], params, str(out), seed=2)
        assert load_records(str(out)) == records

    def test_xor_suite_finds_counterexamples(self, tmp_path):
        params = GenParams(count=2, n_max=6, alphabet_size=3, specs_per_dfa=2,
                           train_size=10, test_size=5, fault="loop")
        gen_benchmark(params, seed=23, out_dir=tmp_path)
        out = tmp_path / "results.jsonl"
        sp = SuiteParams(epsilon=0.005, gamma=0.005, stop_prob=0.1, timeout=120,
                         faulty_flow=True)
        records = run_suite(str(tmp_path / "manifest.json"), ["pdv"], sp, str(out), seed=3)
        found = [r for r in records if r["outcome"] == "counterexample"]
        assert found
        for r in found:
            assert r["confirmed"]

    def test_report_aggregation_hand_computed(self):
        records = [
            _fake_record("pdv", "counterexample", wall=2.0, mqs=100, cex_len=5, size=3),
            _fake_record("pdv", "satisfied", wall=4.0, mqs=300, cex_len=None, size=7),
            _fake_record("smc", "counterexample", wall=1.0, mqs=50, cex_len=9, size=None),
        ]
        rows = aggregate(records)
        by_alg = {r["algorithm"]: r for r in rows}
        assert by_alg["pdv"]["avg_time_s"] == pytest.approx(3.0)
        assert by_alg["pdv"]["avg_cex_len"] == pytest.approx(5.0)
        assert by_alg["pdv"]["mistakes"] == 1
        assert by_alg["pdv"]["avg_mqs"] == pytest.approx(200.0)
        assert by_alg["pdv"]["avg_dfa_size"] == pytest.approx(5.0)
        assert by_alg["smc"]["avg_cex_len"] == pytest.approx(9.0)

    def test_report_columns(self):
        text = format_report(aggregate([_fake_record("smc", "satisfied", 1.0, 10, None, None)]))
        for column in ("Type", "Avg time (s)", "Avg len", "# Mistakes", "Avg MQs", "Avg DFA size"):
            assert column in text

    def test_empty_results_gives_headers(self):
        text = format_report(aggregate([]))
        assert "Avg MQs" in text
        csv_text = report_csv(aggregate([]))
        assert csv_text.startswith("algorithm,")


def _fake_record(algorithm, outcome, wall, mqs, cex_len, size):
    return {
        "instance": "i",
        "spec": "s",
        "algorithm": algorithm,
        "outcome": outcome,
        "confirmed": outcome == "counterexample",
        "stats": {
            "wall_time": wall,
            "membership_queries": mqs,
            "counterexample_length": cex_len,
            "final_hypothesis_size": size,
        },
    }


class TestCli:
    def test_gen_bench_and_suite_and_report(self, tmp_path, capsys):
        bench_dir = tmp_path / "bench"
        rc = cli_main([
            "gen-bench", "--count", "1", "--n-max", "4", "--alphabet-size", "2",
            "--specs-per-dfa", "2", "--train-size", "10", "--test-size", "5",
            "--seed", "7", "--out", str(bench_dir),
        ])
        assert rc == 0
        results = tmp_path / "r.jsonl"
        rc = cli_main([
            "verify", "--manifest", str(bench_dir / "manifest.json"),
            "--method", "pdv", "--seed", "5", "--out", str(results),
            "--epsilon", "0.05", "--gamma", "0.05", "--stop-prob", "0.3",
        ])
        assert rc == 0
        rc = cli_main(["report", "--results", str(results), "--csv", str(tmp_path / "r.csv")])
        assert rc == 0
        out = capsys.readouterr().out
        assert "Avg MQs" in out
        assert (tmp_path / "r.csv").exists()

    def test_seed_required_for_suite(self, tmp_path):
        with pytest.raises(SystemExit, match="seed"):
            cli_main(["gen-bench", "--count", "1", "--out", str(tmp_path / "x")])

    def test_single_run_verify(self, tmp_path, capsys):
        from pdv.automata import save_dfa, random_dfa as rd, derive_specs as ds

        rng = random.Random(33)
        d = rd(6, ascii_alphabet(2), rng)
        specs = ds(d, 2, rng)
        save_dfa(d, tmp_path / "d.dfa")
        save_dfa(specs[0], tmp_path / "s.dfa")
        rc = cli_main([
            "verify", "--method", "pdv", "--oracle", "dfa",
            "--dfa", str(tmp_path / "d.dfa"), "--spec", str(tmp_path / "s.dfa"),
            "--seed", "1", "--epsilon", "0.05", "--gamma", "0.05",
        ])
        assert rc == 0
        record = json.loads(capsys.readouterr().out)
        assert record["outcome"] == "satisfied"

    def test_gen_contact_cli(self, tmp_path, capsys):
        net_path = tmp_path / "net.txt"
        rng = random.Random(5)
        lines = []
        names = ["A", "B", "C", "D", "E", "F"]
        for i in range(6):
            for j in range(i + 1, 6):
                for t in rng.sample(range(1, 40), 3):
                    lines.append(f"{t} {names[i]} {names[j]}")
        net_path.write_text("\n".join(lines) + "\n")
        rc = cli_main([
            "gen-contact", "--network", str(net_path), "--seed", "2",
            "--out", str(tmp_path / "contact"),
        ])
        assert rc == 0
        assert (tmp_path / "contact" / "train.tsv").exists()
        assert (tmp_path / "contact" / "path_spec.dfa").exists()

    def test_faulty_flow_cli(self, tmp_path, capsys):
        from pdv.automata import save_dfa

        alpha = ascii_alphabet(5)
        fault = pattern_dfa(alpha, (), alpha.word(["a", "b", "c", "e"]), alpha.word(["e"]))
        spec = complement(fault)
        from conftest import empty_dfa

        save_dfa(spec, tmp_path / "spec.dfa")
        save_dfa(fault, tmp_path / "hyp.dfa")
        save_dfa(empty_dfa(alpha), tmp_path / "base.dfa")
        save_dfa(fault, tmp_path / "fault.dfa")
        rc = cli_main([
            "faulty-flow", "--spec", str(tmp_path / "spec.dfa"),
            "--hypothesis", str(tmp_path / "hyp.dfa"),
            "--oracle", "xor", "--base", str(tmp_path / "base.dfa"),
            "--fault", str(tmp_path / "fault.dfa"),
            "--word", "a b c e e",
        ])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["found"] is True
        assert doc["loop"] == ["a", "b", "c", "e"]

    def test_config_file_defaults(self, tmp_path, capsys):
        from pdv.automata import save_dfa, random_dfa as rd, derive_specs as ds

        rng = random.Random(33)
        d = rd(6, ascii_alphabet(2), rng)
        specs = ds(d, 2, rng)
        save_dfa(d, tmp_path / "d.dfa")
        save_dfa(specs[0], tmp_path / "s.dfa")
        config = tmp_path / "pdv.toml"
        config.write_text(
            "seed = 4\n[verify]\nepsilon = 0.05\ngamma = 0.05\n"
            "[sampling]\nstop_prob = 0.3\nmax_len = 500\n"
        )
        rc = cli_main([
            "verify", "--method", "pdv", "--oracle", "dfa",
            "--dfa", str(tmp_path / "d.dfa"), "--spec", str(tmp_path / "s.dfa"),
            "--config", str(config),
        ])
        assert rc == 0
        record = json.loads(capsys.readouterr().out)
        assert record["parameters"]["epsilon"] == 0.05
        assert record["parameters"]["stop_prob"] == 0.3
        assert record["seed"] == 4
