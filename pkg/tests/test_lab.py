"""Experiment orchestration: distribution runs, scenarios, exports, CLI."""

import json
import math
from collections import Counter
from fractions import Fraction

import pytest

from wudlab.cli import main
from wudlab.errors import ConsistencyError, InvalidConfigError
from wudlab.lab import (
    CSV_COLUMNS,
    DistributionReport,
    export_report,
    run_additive,
    run_distribution,
    run_distribution_multi,
    run_scenario,
    growth_fit,
)
from wudlab.sieve import MultiplicativeSpec, f_mod
from wudlab.poly import IntPoly


def _phi_spec():
    return MultiplicativeSpec(F=IntPoly((-1, 1)))


class TestDistribution:
    def test_matches_per_n_census(self):
        q, x = 5, 3000
        rep = run_distribution(_phi_spec(), q, x, J=1)
        counts = Counter()
        for n in range(1, x + 1):
            val, cop = f_mod(_phi_spec(), n, q)
            if cop:
                counts[val] += 1
        assert rep.class_counts == dict(counts)
        assert rep.n_coprime == sum(counts.values())
        assert rep.alpha == Fraction(3, 4)

    def test_conservation(self):
        for rep in run_distribution_multi(_phi_spec(), 7, [100, 1000, 5000],
                                          J=1, filter_names=["none", "p2-rough"]):
            assert sum(rep.class_counts.values()) == rep.n_coprime
            assert rep.n_con + rep.n_inc == rep.n_coprime

    def test_degenerate_range(self):
        rep = run_distribution(_phi_spec(), 101, 50, J=1)
        assert rep.n_coprime <= 50  # emitted without error

    def test_filter_monotonicity(self):
        # P_2 > q is weaker than P_{D+2} > q, so its counts dominate
        reps = run_distribution_multi(_phi_spec(), 35, [10**5], J=1,
                                      filter_names=["p2-rough", "pD2-rough"])
        by_filter = {r.filter: r for r in reps}
        p2, pd2 = by_filter["p2-rough"], by_filter["pD2-rough"]
        assert p2.n_coprime >= pd2.n_coprime
        for a in p2.class_counts:
            assert p2.class_counts[a] >= pd2.class_counts[a]

    def test_determinism(self):
        a = run_distribution(_phi_spec(), 5, 20000, J=1).to_json_dict()
        b = run_distribution(_phi_spec(), 5, 20000, J=1).to_json_dict()
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_inconvenient_fraction_shrinks(self):
        reps = run_distribution_multi(_phi_spec(), 7, [10**5, 10**6], J=1)
        fracs = [r.n_inc / r.n_coprime for r in reps]
        assert fracs[1] < fracs[0]

    def test_bad_filter(self):
        with pytest.raises(InvalidConfigError):
            run_distribution(_phi_spec(), 5, 100, J=1, filter_name="p99")

    def test_consistency_guard(self):
        with pytest.raises(ConsistencyError):
            DistributionReport(
                spec="s", scenario="dist", x=10, q=5, filter="none",
                class_counts={1: 3, 2: 1}, n_coprime=5, n_con=5, n_inc=0,
                alpha=Fraction(3, 4), discrepancy=0.0, tv_distance=0.0,
                growth_pred=1.0,
            )


class TestGrowthFit:
    def test_rows_and_window(self):
        rep = growth_fit(_phi_spec(), 5, [10**4, 10**5])
        assert [r.x for r in rep.rows] == [10**4, 10**5]
        for row in rep.rows:
            assert row.pred == pytest.approx(
                row.x / math.log(row.x) ** (1 - 3 / 4))
            assert row.log_ratio == pytest.approx(
                math.log(row.n_coprime / row.pred))
        assert rep.log_ratio_window < 2.0

    def test_alpha_zero_declined(self):
        with pytest.raises(InvalidConfigError, match="degenerate"):
            growth_fit(_phi_spec(), 2, [10**4])


class TestAdditiveRun:
    def test_matches_direct_census(self):
        from wudlab.sieve import additive_values
        q, x = 4, 2000
        rep = run_additive(q, x)
        counts_a = Counter()
        counts_s = Counter()
        for n in range(1, x + 1):
            a, s = additive_values(n, q)
            counts_a[a] += 1
            counts_s[s] += 1
        assert rep.counts_a == dict(counts_a)
        assert rep.counts_astar == dict(counts_s)


class TestScenarios:
    def test_counterexample_ii_small(self):
        rep = run_scenario("counterexample-ii", D=2, q1=5, x=10**5)
        assert rep.summary["q"] == 25
        assert rep.summary["target_class"] == 1
        assert rep.summary["target_ratio"] > 1

    def test_counterexample_i_small(self):
        rep = run_scenario("counterexample-i", D=2, x=10**5, num_primes=2)
        assert rep.summary["target_class"] == 2
        assert rep.summary["q"] > 1

    def test_restricted_b(self):
        rep = run_scenario("restricted-b", q=35, x=10**5)
        assert set(rep.summary) >= {"discrepancy_unfiltered",
                                    "discrepancy_filtered", "filtered_not_worse"}

    def test_additive_scenario(self):
        rep = run_scenario("additive", q=4, x=10**5)
        assert rep.summary["max_rel_dev_a"] < 0.05

    def test_unknown_scenario(self):
        with pytest.raises(InvalidConfigError):
            run_scenario("counterexample-iii", x=100)

    def test_unknown_params(self):
        with pytest.raises(InvalidConfigError, match="unknown scenario parameters"):
            run_scenario("counterexample-ii", D=2, q1=5, x=100, zeta=3)


class TestExport:
    def test_csv_schema(self, tmp_path):
        rep = run_distribution(_phi_spec(), 5, 1000, J=1)
        path = export_report([rep], "csv", tmp_path / "out.csv")
        lines = path.read_text().splitlines()
        assert lines[0].split(",") == list(CSV_COLUMNS)
        assert len(lines) == 1 + 4  # header + one row per unit class

    def test_json_roundtrip(self, tmp_path):
        reps = [run_distribution(_phi_spec(), 5, 1000, J=1),
                run_scenario("additive", q=4, x=1000),
                growth_fit(_phi_spec(), 5, [10**4])]
        path = export_report(reps, "json", tmp_path / "out.json")
        loaded = json.loads(path.read_text())
        assert [r["type"] for r in loaded] == ["distribution", "scenario",
                                               "growth"]
        assert all(r["schema_version"] == 1 for r in loaded)
        dist = loaded[0]
        assert sum(dist["class_counts"].values()) == dist["n_coprime"]

    def test_bad_format(self, tmp_path):
        with pytest.raises(InvalidConfigError):
            export_report([], "xml", tmp_path / "out.xml")


class TestCli:
    def test_density_ok(self, capsys):
        assert main(["density", "--poly", "phi", "--q", "35"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["alpha"] == "5/8"
        assert out["xi"] == 1

    def test_dist_csv(self, capsys):
        assert main(["--format", "csv", "dist", "--poly", "phi",
                     "--q", "5", "--x", "2000", "--J", "1"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].split(",") == list(CSV_COLUMNS)

    def test_tuples_cross_check(self, capsys):
        assert main(["tuples", "--poly", "phi", "--q", "5", "--J", "2",
                     "--method", "cross-check"]) == 0
        rows = json.loads(capsys.readouterr().out)
        assert all(r["agree"] for r in rows)

    def test_chars(self, capsys):
        assert main(["chars", "--poly", "phi", "--ell", "5", "--all-chars",
                     "--curve", "1"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert len(out["characters"]) == 4
        assert out["curve"]["within_bound"]

    def test_scenario_additive(self, capsys):
        assert main(["scenario", "additive", "--q", "4", "--x", "10000"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["name"] == "additive"

    def test_invalid_poly_exit_2(self, capsys):
        assert main(["density", "--poly", "nope", "--q", "5"]) == 2

    def test_guard_exit_3(self, capsys):
        assert main(["chars", "--poly", "phi", "--ell", "101", "--e", "4"]) == 3

    def test_no_command_exit_2(self, capsys):
        assert main([]) == 2

    def test_config_unknown_key_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "run.ini"
        cfg.write_text("[additive]\nscenario = additive\nq = 4\nx = 1000\n"
                       "frobnicate = yes\n")
        assert main(["--config", str(cfg)]) == 2
        assert "frobnicate" in capsys.readouterr().err

    def test_config_runs_scenarios(self, tmp_path, capsys):
        cfg = tmp_path / "run.ini"
        cfg.write_text("[additive]\nscenario = additive\nq = 4\nx = 1000\n")
        assert main(["--config", str(cfg), "--out", str(tmp_path / "out"),
                     "--format", "json"]) == 0
        report = json.loads((tmp_path / "out" / "wudlab-report.json").read_text())
        assert report[0]["type"] == "scenario"

    def test_missing_config_exit_2(self, tmp_path):
        assert main(["--config", str(tmp_path / "absent.ini")]) == 2

    def test_sieve_dump(self, tmp_path, capsys):
        dump = tmp_path / "records.csv"
        assert main(["sieve", "--poly", "phi", "--q", "5", "--x", "500",
                     "--J", "1", "--dump", str(dump)]) == 0
        lines = dump.read_text().splitlines()
        assert len(lines) == 501  # header + one row per n
