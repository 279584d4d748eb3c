import csv
import json
import math

import numpy as np
import pytest

from squidopt.baselines import PsoParams, pso_minimize
from squidopt.benchmarks import registry_lookup
from squidopt.core import RngStream
from squidopt.harness import (
    CSV_COLUMNS,
    AlgorithmResult,
    ConfigError,
    ExperimentConfig,
    ExperimentResult,
    aggregate_summary,
    configs_from_text,
    export_results,
    export_trace,
    load_results_json,
    parse_config_text,
    rank_by_mean,
    run_experiment,
    run_suite,
    run_trial,
    trial_stats,
)
from squidopt.ssa import SsaParams, ssa_minimize


def small_config(**kw):
    base = dict(function="sphere", dim=2, trials=3, budget_evals=400, base_seed=11)
    base.update(kw)
    return ExperimentConfig(**base)


class TestTrialStats:
    def test_sample_statistics(self):
        s = trial_stats([1, 2, 3, 4], 0.0, 5e-7)
        assert (s.best, s.worst, s.mean) == (1.0, 4.0, 2.5)
        assert s.std_dev == pytest.approx(1.2909944487358056, abs=1e-15)
        assert s.std_dev == pytest.approx(1.2910, abs=1e-4)

    def test_single_trial(self):
        s = trial_stats([3.0], 0.0, 5e-7)
        assert s.std_dev == 0.0 and not s.std_dev_defined

    def test_success_count(self):
        s = trial_stats([0.0, 1e-7, 1e-6, 5e-7], 0.0, 5e-7)
        assert s.successes == 3 and s.success_rate == 0.75
        assert s.success_rate * s.trials == s.successes

    def test_relative_to_optimum(self):
        s = trial_stats([-1.0, -0.9999999], -1.0, 5e-7)
        assert s.success_rate == 1.0

    def test_nan_counts_as_failure(self):
        s = trial_stats([0.0, float("nan")], 0.0, 1e-3)
        assert s.success_rate == 0.5 and s.trials == 2 and s.mean == 0.0

    def test_normal_approximation_reported(self):
        s = trial_stats([0.0, 2e-7, 4e-7, 1.0], 0.0, 5e-7)
        assert 0.0 < s.normal_success_rate < 1.0
        assert s.success_rate == 0.75

    def test_empty(self):
        with pytest.raises(ValueError):
            trial_stats([], 0.0, 1.0)


class TestRanks:
    def test_order(self):
        assert rank_by_mean([1e-8, 1e-6, 1e-7]) == [1, 3, 2]

    def test_ties_share_lower(self):
        assert rank_by_mean([2.0, 1.0, 2.0]) == [2, 1, 2]

    def test_nan_last(self):
        assert rank_by_mean([float("nan"), 1.0]) == [2, 1]


class TestAggregate:
    def test_two_functions_tie(self):
        s = aggregate_summary([(1, 2, 3), (2, 1, 3)])
        assert s.average_rank == (1.5, 1.5, 3.0)
        assert s.final_rank == (1, 1, 3)
        assert s.ties == (("ssa", "pso"),)

    def test_reported_averages(self):
        # Average ranks (PSO 2.00, GA 2.75, SSA 1.25) order the algorithms 2, 3, 1.
        assert rank_by_mean([2.00, 2.75, 1.25]) == [2, 3, 1]
        s = aggregate_summary([(2, 3, 1), (2, 3, 1), (2, 2, 2), (2, 3, 1)], ("pso", "ga", "ssa"))
        assert s.average_rank == (2.0, 2.75, 1.25) and s.final_rank == (2, 3, 1)

    def test_single_function_identity(self):
        s = aggregate_summary([(3, 1, 2)])
        assert s.average_rank == (3.0, 1.0, 2.0) and s.final_rank == (3, 1, 2)

    def test_pooled_success(self):
        s = aggregate_summary([(1, 2), (2, 1)], ("ssa", "ga"),
                              successes=[[10, 0], [5, 10]], trials=[[10, 10], [10, 10]])
        assert s.success_rate == (0.75, 0.5)

    def test_empty(self):
        with pytest.raises(ValueError):
            aggregate_summary([])


class TestConfig:
    def test_empty_algorithms(self):
        with pytest.raises(ConfigError):
            ExperimentConfig("sphere", algorithms=())

    @pytest.mark.parametrize("kw", [dict(function="himmelblau"), dict(algorithms=("de",)),
                                    dict(trials=0), dict(budget_evals=None),
                                    dict(algorithms=("ssa", "ssa")),
                                    dict(overrides={"ssa": {"speed": 1}})])
    def test_invalid(self, kw):
        with pytest.raises(ConfigError):
            small_config(**kw)

    def test_override_reaches_params(self):
        cfg = small_config(overrides={"ssa": {"population": 8}})
        assert cfg.params_for("ssa") == SsaParams(population=8, max_evaluations=400)

    def test_bad_override_value(self):
        with pytest.raises(ConfigError):
            small_config(overrides={"ssa": {"population": 7}}).params_for("ssa")

    def test_seeds_distinct_and_stable(self):
        cfg = small_config()
        seeds = {cfg.trial_seed(a, k) for a in ("ssa", "pso", "ga") for k in range(50)}
        assert len(seeds) == 150
        assert cfg.trial_seed("ga", 7) == small_config().trial_seed("ga", 7)


class TestRunExperiment:
    def test_shape_and_ranks(self):
        exp = run_experiment(small_config())
        assert [r.algorithm for r in exp.results] == ["ssa", "pso", "ga"]
        assert sorted(exp.ranks) == [1, 2, 3] or len(set(exp.ranks)) < 3
        for r in exp.results:
            finals = [o.final for o in r.outcomes]
            assert r.stats.best == min(finals) and r.stats.worst == max(finals)
            assert r.stats.mean == pytest.approx(np.mean(finals), rel=1e-15)
            assert all(o.evaluations == 400 for o in r.outcomes)

    def test_trial_reproducible_individually(self):
        cfg = small_config()
        exp = run_experiment(cfg)
        result, err = run_trial(cfg, "pso", 2)
        assert err is None
        assert exp.by_algorithm()["pso"].outcomes[2].final == result.best_fitness

    def test_parallel_matches_serial(self, tmp_path):
        a = run_experiment(small_config(workers=1))
        b = run_experiment(small_config(workers=2))
        export_results(a, "json", tmp_path / "a.json")
        export_results(b, "json", tmp_path / "b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_wall_time_mode(self):
        exp = run_experiment(small_config(budget_evals=None, budget_secs=0.05, trials=1,
                                          algorithms=("ga",)))
        assert math.isfinite(exp.results[0].stats.mean)


def fake_result(function="sphere", algorithms=("ssa", "pso", "ga"), means=(1e-8, 1e-6, 1e-7)):
    cfg = ExperimentConfig(function, dim=2, algorithms=algorithms, trials=2)
    ranks = rank_by_mean(means)
    results = []
    for a, m, r in zip(algorithms, means, ranks):
        stats = trial_stats([m * 0.5, m * 1.5], 0.0, 5e-7)
        results.append(AlgorithmResult(a, stats, (), r))
    return ExperimentResult(cfg, 2, 0.0, tuple(results))


class TestExport:
    def test_csv_shape(self, tmp_path):
        path = tmp_path / "r.csv"
        export_results(fake_result(), "csv", path)
        rows = list(csv.reader(path.open()))
        assert tuple(rows[0]) == CSV_COLUMNS
        assert len(rows) == 4
        assert [r[-1] for r in rows[1:]] == ["1", "3", "2"]

    def test_seventeen_digits(self, tmp_path):
        path = tmp_path / "r.csv"
        export_results(fake_result(means=(1 / 3, 2.0, 3.0)), "csv", path)
        row = next(r for r in csv.DictReader(path.open()) if r["algorithm"] == "ssa")
        assert float(row["mean"]) == 1 / 3

    def test_json_round_trip(self, tmp_path):
        exp = run_experiment(small_config())
        path = tmp_path / "r.json"
        export_results(exp, "json", path)
        data = load_results_json(path)[0]
        assert data["config"]["function"] == "sphere" and data["config"]["trials"] == 3
        for row, r in zip(data["rows"], exp.results):
            for key in ("best", "worst", "mean", "std_dev", "success_rate"):
                assert row[key] == getattr(r.stats, key)
            assert row["finals"] == [o.final for o in r.outcomes]
            assert min(row["finals"]) == row["best"] and max(row["finals"]) == row["worst"]

    def test_empty_results_no_file(self, tmp_path):
        path = tmp_path / "never.csv"
        with pytest.raises(ValueError):
            export_results([], "csv", path)
        assert not path.exists()

    def test_bad_path(self, tmp_path):
        with pytest.raises(OSError, match="missing"):
            export_results(fake_result(), "csv", tmp_path / "missing" / "r.csv")

    def test_deterministic_bytes(self, tmp_path):
        for name in ("a", "b"):
            export_results(run_experiment(small_config()), "csv", tmp_path / f"{name}.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


class TestTrace:
    def test_ssa_rows(self, tmp_path):
        res = ssa_minimize(registry_lookup("sphere", 2), SsaParams(population=4, max_generations=3),
                           RngStream(0), trace=True)
        path = export_trace(res, tmp_path / "t.csv")
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["generation", "squid_id", "swarm_tag", "fitness", "x0", "x1"]
        assert len(rows) == 13
        gens = [int(r[0]) for r in rows[1:]]
        assert gens == sorted(gens)

    def test_pso_placeholder_tag(self, tmp_path):
        res = pso_minimize(registry_lookup("sphere", 2), PsoParams(population=4, max_generations=2),
                           RngStream(0), trace=True)
        rows = list(csv.DictReader(open(export_trace(res, tmp_path / "p.csv"))))
        assert {r["swarm_tag"] for r in rows} == {"none"}

    def test_missing_trace(self, tmp_path):
        res = ssa_minimize(registry_lookup("sphere", 2), SsaParams(population=4, max_generations=1))
        with pytest.raises(ValueError, match="trace not recorded"):
            export_trace(res, tmp_path / "t.csv")


CONFIG = """
# two small functions
functions = sphere, levy
dim.levy = 3
algorithms = ssa, ga
trials = 2
budget_evals = 300
base_seed = 5
ssa.population = 8
ga.mutation_prob = 0.1
"""


class TestConfigFiles:
    def test_parse(self):
        raw = parse_config_text(CONFIG)
        assert raw["functions"] == ("sphere", "levy")
        assert raw["overrides"] == {"ssa": {"population": 8}, "ga": {"mutation_prob": 0.1}}
        assert raw["dims"] == {"levy": 3}

    def test_configs(self):
        cfgs = configs_from_text(CONFIG)
        assert [(c.function, c.dim) for c in cfgs] == [("sphere", None), ("levy", 3)]
        assert cfgs[1].params_for("ssa").population == 8

    @pytest.mark.parametrize("text", ["function = sphere\ncolour = red",
                                      "function = sphere\nfoo.bar = 1",
                                      "function sphere",
                                      "function = sphere\nfunction = levy",
                                      "functions = sphere\ndim.levy = 3",
                                      "trials = 3",
                                      "function = sphere\nssa.speed = 2"])
    def test_errors(self, text):
        with pytest.raises(ConfigError):
            configs_from_text(text)

    def test_suite_outputs(self, tmp_path):
        results, summary = run_suite(configs_from_text(CONFIG), tmp_path)
        assert len(results) == 2
        rows = list(csv.reader((tmp_path / "results.csv").open()))
        assert len(rows) == 1 + 4
        summary_rows = list(csv.DictReader((tmp_path / "summary.csv").open()))
        assert [r["algorithm"] for r in summary_rows] == ["ssa", "ga"]
        assert json.loads((tmp_path / "results.json").read_text())[1]["config"]["dim"] == 3
