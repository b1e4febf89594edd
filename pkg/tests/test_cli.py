"""CLI subcommands: exit codes, report files, determinism."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import pytest

from patrolsched import (Schedule, held_karp_tsp, load_instance,
                         minmax_tree_cover, partition_tree_cover_oracle,
                         plan, point_cost, serialize_instance,
                         weighted_objective)
from patrolsched.cli import main


@pytest.fixture
def triangle_file(tmp_path, unit_triangle):
    path = tmp_path / "triangle.json"
    path.write_text(serialize_instance(unit_triangle))
    return path


@pytest.fixture
def triangle_schedule_file(tmp_path):
    path = tmp_path / "sched.json"
    path.write_text(json.dumps({"visits": ["a", "b", "a", "c"]}))
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def stripped(path):
    doc = read_json(path)
    doc.pop("timings")
    return json.dumps(doc, sort_keys=True)


class TestValidate:
    def test_valid_instance(self, tmp_path, triangle_file):
        out = tmp_path / "report.json"
        assert main(["validate", str(triangle_file), "--out", str(out)]) == 0
        report = read_json(out)
        assert report["command"] == "validate"
        assert report["result"]["ok"] is True
        assert report["result"]["violations"] == []
        assert len(report["instance"]["sha256"]) == 64

    def test_triangle_violation_exits_1_with_witness(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({
            "labels": ["a", "b", "c"], "weights": [1, 1, 1],
            "metric": {"type": "explicit",
                       "dist": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]}}))
        out = tmp_path / "report.json"
        assert main(["validate", str(bad), "--out", str(out)]) == 1
        report = read_json(out)
        assert report["result"]["ok"] is False
        kinds = {v["kind"] for v in report["result"]["violations"]}
        assert kinds == {"triangle"}
        assert [0, 1, 2] in [v["where"] for v in report["result"]["violations"]]

    def test_missing_file_exits_2(self, tmp_path):
        assert main(["validate", str(tmp_path / "nope.json")]) == 2

    def test_unparsable_file_exits_1(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["validate", str(bad)]) == 1


class TestGen:
    def test_writes_valid_instance(self, tmp_path):
        out = tmp_path / "inst.json"
        assert main(["gen", "--n", "8", "--seed", "3", "--out", str(out)]) == 0
        inst = load_instance(out.read_text())
        assert inst.n == 8

    def test_deterministic_bytes_for_fixed_seed(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["gen", "--n", "6", "--seed", "11", "--weight-law", "pareto"]
        assert main([*args, "--out", str(a)]) == 0
        assert main([*args, "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_bad_n_exits_1(self, tmp_path):
        assert main(["gen", "--n", "2", "--out", str(tmp_path / "x.json")]) == 1


class TestPlan:
    def test_triangle_report(self, tmp_path, triangle_file, unit_triangle):
        out = tmp_path / "plan.json"
        sched_out = tmp_path / "sched.json"
        assert main(["plan", str(triangle_file), "--out", str(out),
                     "--schedule-out", str(sched_out)]) == 0
        report = read_json(out)
        assert report["result"]["schedule"]["visits"] == ["a", "b", "a", "c"]
        assert report["result"]["objective_inf"] == 2.0
        assert report["result"]["lower_bound"] == 1.5
        assert report["result"]["envelope_limit"] == 36.0
        assert all(report["invariants"].values())
        assert read_json(sched_out) == {"visits": ["a", "b", "a", "c"]}

    def test_reports_byte_identical_without_timings(self, tmp_path, triangle_file):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["plan", str(triangle_file), "--out", str(a)]) == 0
        assert main(["plan", str(triangle_file), "--out", str(b)]) == 0
        assert stripped(a) == stripped(b)


class TestEval:
    def test_objectives_match_library(self, tmp_path, triangle_file,
                                      triangle_schedule_file, unit_triangle):
        out = tmp_path / "eval.json"
        assert main(["eval", str(triangle_file), str(triangle_schedule_file),
                     "--p", "2", "--p", "inf", "--out", str(out)]) == 0
        per_p = read_json(out)["result"]["per_p"]
        s = Schedule((0, 1, 0, 2))
        assert per_p["2"]["objective"] == weighted_objective(s, unit_triangle, 2.0)
        assert per_p["inf"]["objective"] == weighted_objective(s, unit_triangle, math.inf)
        assert per_p["2"]["objective"] <= per_p["inf"]["objective"]
        assert per_p["inf"]["point_costs"]["b"] == 4.0

    def test_missing_point_reports_unbounded(self, tmp_path, triangle_file):
        sched = tmp_path / "partial.json"
        sched.write_text(json.dumps({"visits": ["a", "b"]}))
        out = tmp_path / "eval.json"
        assert main(["eval", str(triangle_file), str(sched),
                     "--p", "inf", "--out", str(out)]) == 0
        res = read_json(out)["result"]
        assert res["per_p"]["inf"]["objective"] == "unbounded"
        assert res["per_p"]["inf"]["point_costs"]["c"] == "unbounded"

    def test_bad_p_exits_1(self, triangle_file, triangle_schedule_file):
        assert main(["eval", str(triangle_file), str(triangle_schedule_file),
                     "--p", "1.5"]) == 1

    def test_unknown_label_exits_1(self, tmp_path, triangle_file):
        sched = tmp_path / "bad.json"
        sched.write_text(json.dumps({"visits": ["a", "zz"]}))
        assert main(["eval", str(triangle_file), str(sched)]) == 1


class TestOracles:
    def test_oracle_tsp(self, tmp_path, triangle_file, unit_triangle):
        out = tmp_path / "tsp.json"
        assert main(["oracle-tsp", str(triangle_file), "--out", str(out)]) == 0
        report = read_json(out)
        assert report["result"]["value"] == held_karp_tsp(unit_triangle).value

    def test_oracle_tsp_subset(self, tmp_path, triangle_file):
        out = tmp_path / "tsp.json"
        assert main(["oracle-tsp", str(triangle_file),
                     "--subset", "a,b", "--out", str(out)]) == 0
        assert read_json(out)["result"]["value"] == 2.0

    def test_oracle_opt(self, tmp_path, triangle_file):
        out = tmp_path / "opt.json"
        assert main(["oracle-opt", str(triangle_file), "--p", "inf",
                     "--max-period", "4", "--out", str(out)]) == 0
        report = read_json(out)
        assert report["result"]["value"] == 2.0
        assert report["result"]["witness"]["visits"] == ["a", "b", "a", "c"]
        assert report["result"]["search_bound"]["upper_bound_only"] is True

    def test_oracle_cover(self, tmp_path, unit_triangle, triangle_file):
        out = tmp_path / "cover.json"
        assert main(["oracle-cover", str(triangle_file), "--k", "2",
                     "--out", str(out)]) == 0
        exact = partition_tree_cover_oracle(unit_triangle, None, 2)
        assert read_json(out)["result"]["value"] == exact.value

    def test_unknown_subset_label_exits_1(self, triangle_file):
        assert main(["oracle-tsp", str(triangle_file), "--subset", "a,zz"]) == 1


class TestTreecover:
    def test_matches_library(self, tmp_path, triangle_file, unit_triangle):
        out = tmp_path / "tc.json"
        assert main(["treecover", str(triangle_file), "--k", "2",
                     "--out", str(out)]) == 0
        report = read_json(out)
        cover = minmax_tree_cover(unit_triangle, None, 2)
        assert report["result"]["max_cost"] == cover.max_cost
        assert len(report["result"]["trees"]) == len(cover.trees)


class TestAttack:
    def test_triangle_golden(self, tmp_path, triangle_file, triangle_schedule_file):
        out = tmp_path / "attack.json"
        assert main(["attack", str(triangle_file), str(triangle_schedule_file),
                     "--out", str(out)]) == 0
        best = read_json(out)["result"]["best"]
        assert best == {"target": "a", "duration": 1.0, "utility": 0.5}

    def test_unvisited_target_reports_unbounded(self, tmp_path, triangle_file):
        sched = tmp_path / "partial.json"
        sched.write_text(json.dumps({"visits": ["a", "b"]}))
        out = tmp_path / "attack.json"
        assert main(["attack", str(triangle_file), str(sched),
                     "--out", str(out)]) == 0
        best = read_json(out)["result"]["best"]
        assert best["target"] == "c"
        assert best["utility"] == "unbounded"


class TestMix:
    def test_collapses_strategy(self, tmp_path, triangle_file, unit_triangle):
        strat = tmp_path / "strategy.json"
        strat.write_text(json.dumps({"entries": [
            {"schedule": {"visits": ["a", "b", "c"]}, "prob": 0.75},
            {"schedule": {"visits": ["a", "c", "b"]}, "prob": 0.25}]}))
        out = tmp_path / "mix.json"
        sched_out = tmp_path / "mixed.json"
        assert main(["mix", str(triangle_file), str(strat),
                     "--out", str(out), "--schedule-out", str(sched_out)]) == 0
        mixed_doc = read_json(sched_out)
        mixed = Schedule(tuple(unit_triangle.index(l) for l in mixed_doc["visits"]))
        for x in range(3):
            base = (0.75 * point_cost(Schedule((0, 1, 2)), x, unit_triangle, 2.0)
                    + 0.25 * point_cost(Schedule((0, 2, 1)), x, unit_triangle, 2.0))
            assert point_cost(mixed, x, unit_triangle, 2.0) <= 8.0 * base * (1 + 1e-9)

    def test_bad_probabilities_exit_1(self, tmp_path, triangle_file):
        strat = tmp_path / "strategy.json"
        strat.write_text(json.dumps({"entries": [
            {"schedule": {"visits": ["a", "b", "c"]}, "prob": 0.9}]}))
        assert main(["mix", str(triangle_file), str(strat)]) == 1


class TestBench:
    @pytest.fixture
    def corpus(self, tmp_path):
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        for i, seed in enumerate((1, 2)):
            out = corpus / f"inst{i}.json"
            assert main(["gen", "--n", "5", "--seed", str(seed),
                         "--out", str(out)]) == 0
        (corpus / "invalid.json").write_text(json.dumps({
            "labels": ["a", "b", "c"], "weights": [1, 1, 1],
            "metric": {"type": "explicit",
                       "dist": [[0, 1, 9], [1, 0, 1], [9, 1, 0]]}}))
        return corpus

    def test_failed_rows_recorded_run_continues(self, tmp_path, corpus):
        prefix = tmp_path / "bench"
        assert main(["bench", str(corpus), "--out", str(prefix)]) == 0
        report = read_json(f"{prefix}.json")
        rows = report["result"]["rows"]
        assert [r["file"] for r in rows] == ["inst0.json", "inst1.json", "invalid.json"]
        by_file = {r["file"]: r for r in rows}
        assert by_file["invalid.json"]["status"] == "failed"
        assert by_file["inst0.json"]["status"] == "ok"
        assert by_file["inst0.json"]["envelope_ok"] is True
        summary = report["result"]["summary"]
        assert summary["instances"] == 3
        assert summary["ok"] == 2
        assert summary["failed"] == 1
        assert summary["all_envelopes_ok"] is True
        with open(f"{prefix}.csv") as fh:
            csv_rows = list(csv.DictReader(fh))
        assert [r["file"] for r in csv_rows] == [r["file"] for r in rows]
        assert csv_rows[2]["status"] == "failed"

    def test_byte_identical_without_timings(self, tmp_path, corpus):
        p1, p2 = tmp_path / "b1", tmp_path / "b2"
        assert main(["bench", str(corpus), "--out", str(p1)]) == 0
        assert main(["bench", str(corpus), "--out", str(p2)]) == 0
        assert stripped(f"{p1}.json") == stripped(f"{p2}.json")
        assert Path(f"{p1}.csv").read_bytes() == Path(f"{p2}.csv").read_bytes()

    def test_empty_corpus_ok(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        prefix = tmp_path / "bench"
        assert main(["bench", str(empty), "--out", str(prefix)]) == 0
        assert read_json(f"{prefix}.json")["result"]["rows"] == []

    def test_missing_corpus_exits_2(self, tmp_path):
        assert main(["bench", str(tmp_path / "nowhere")]) == 2


class TestUsage:
    def test_no_arguments_exits_2(self):
        assert main([]) == 2

    def test_unknown_subcommand_exits_2(self):
        assert main(["frobnicate"]) == 2

    def test_help_exits_0(self):
        assert main(["--help"]) == 0

    def test_oracle_opt_small_max_period_exits_1(self, triangle_file):
        assert main(["oracle-opt", str(triangle_file), "--max-period", "1"]) == 1
