"""Repeated-trial experiments, summary statistics, ranking and result files."""
from __future__ import annotations

import csv
import dataclasses
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Dict, List, Optional, Sequence

import numpy as np

from .baselines import GaParams, PsoParams, ga_minimize, pso_minimize
from .benchmarks import REGISTRY, registry_lookup
from .core import NonFiniteObjectiveError, ParameterError, RngStream, derive_seed
from .ssa import OptResult, SsaParams, ssa_minimize

ALGORITHMS = ("ssa", "pso", "ga")
DEFAULT_BUDGET_EVALS = 50_000
DEFAULT_TRIALS = 100
DEFAULT_TOLERANCE = 5e-7

CSV_COLUMNS = ("function", "dim", "algorithm", "trials", "budget_evals", "best", "worst",
               "mean", "std_dev", "success_rate", "rank")

_PARAM_TYPES = {"ssa": SsaParams, "pso": PsoParams, "ga": GaParams}
_MINIMIZERS = {"ssa": ssa_minimize, "pso": pso_minimize, "ga": ga_minimize}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    function: str
    dim: Optional[int] = None
    algorithms: tuple = ALGORITHMS
    trials: int = DEFAULT_TRIALS
    base_seed: int = 0
    budget_evals: Optional[int] = DEFAULT_BUDGET_EVALS
    budget_secs: Optional[float] = None
    overrides: Dict[str, dict] = field(default_factory=dict)
    success_tolerance: float = DEFAULT_TOLERANCE
    workers: int = 1

    def __post_init__(self):
        if self.function not in REGISTRY:
            raise ConfigError(f"unknown function {self.function!r}")
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ConfigError(f"unknown algorithm(s) {bad}; choose from {list(ALGORITHMS)}")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ConfigError("algorithms must not repeat")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.budget_evals is None and self.budget_secs is None:
            raise ConfigError("set budget_evals, budget_secs or both")
        if self.budget_evals is not None and self.budget_evals < 1:
            raise ConfigError("budget_evals must be positive")
        if self.budget_secs is not None and self.budget_secs <= 0:
            raise ConfigError("budget_secs must be positive")
        for algo, params in self.overrides.items():
            if algo not in ALGORITHMS:
                raise ConfigError(f"override for unknown algorithm {algo!r}")
            names = {f.name for f in dataclasses.fields(_PARAM_TYPES[algo])}
            unknown = set(params) - names
            if unknown:
                raise ConfigError(f"unknown {algo} parameter(s): {sorted(unknown)}")

    def params_for(self, algorithm):
        kwargs = dict(self.overrides.get(algorithm, {}))
        kwargs.setdefault("max_evaluations", self.budget_evals)
        try:
            return _PARAM_TYPES[algorithm](**kwargs)
        except (ParameterError, TypeError) as exc:
            raise ConfigError(f"{algorithm}: {exc}") from exc

    def trial_seed(self, algorithm, trial):
        return derive_seed(self.base_seed, algorithm, trial)

    def echo(self):
        d = dataclasses.asdict(self)
        d["algorithms"] = list(self.algorithms)
        d.pop("workers")
        return d


@dataclass(frozen=True)
class TrialStats:
    best: float
    worst: float
    mean: float
    std_dev: float
    success_rate: float
    successes: int
    trials: int
    normal_success_rate: float = float("nan")

    @property
    def std_dev_defined(self):
        return self.trials > 1


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    seed: int
    final: float
    evaluations: int
    error: Optional[str] = None

    @property
    def failed(self):
        return self.error is not None


@dataclass(frozen=True)
class AlgorithmResult:
    algorithm: str
    stats: TrialStats
    outcomes: tuple
    rank: int


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    dim: int
    optimum_value: float
    results: tuple

    def by_algorithm(self):
        return {r.algorithm: r for r in self.results}

    @property
    def ranks(self):
        return tuple(r.rank for r in self.results)


def trial_stats(finals: Sequence[float], optimum_value: float, tolerance: float) -> TrialStats:
    """Best/worst/mean/sample std of final fitnesses plus success rates.

    A trial succeeds when ``final - optimum_value <= tolerance``; NaN finals
    (aborted trials) count as failures and are excluded from the order
    statistics. ``normal_success_rate`` is ``P(X <= optimum + tol)`` for a
    normal fitted to the mean and std, reported for comparison only.
    """
    f = np.asarray(finals, dtype=float)
    if f.size == 0:
        raise ValueError("no trials")
    ok = f[np.isfinite(f)]
    successes = int(np.sum(ok - optimum_value <= tolerance))
    if ok.size == 0:
        nan = float("nan")
        return TrialStats(nan, nan, nan, nan, 0.0, 0, int(f.size), nan)
    mean = float(np.mean(ok))
    std = float(np.std(ok, ddof=1)) if ok.size > 1 else 0.0
    if std > 0:
        normal = NormalDist(mean, std).cdf(optimum_value + tolerance)
    else:
        normal = 1.0 if mean - optimum_value <= tolerance else 0.0
    return TrialStats(best=float(ok.min()), worst=float(ok.max()), mean=mean, std_dev=std,
                      success_rate=successes / f.size, successes=successes, trials=int(f.size),
                      normal_success_rate=float(normal))


def rank_by_mean(means: Sequence[float]) -> List[int]:
    """Competition ranks: lowest mean gets 1, ties share the lower rank, NaN is last."""
    keyed = [math.inf if (m is None or math.isnan(m)) else m for m in means]
    return [1 + sum(other < m for other in keyed) for m in keyed]


def _run_trial(job):
    function, dim, algorithm, params, seed, _, trace = job
    objective = registry_lookup(function, dim)
    try:
        result = _MINIMIZERS[algorithm](objective, params, RngStream(seed), trace=trace)
    except NonFiniteObjectiveError as exc:
        return None, str(exc)
    return result, None


class _Timeout(Exception):
    pass


def run_trial(config: ExperimentConfig, algorithm: str, trial: int, trace: bool = False):
    """Run a single seeded trial; returns ``(OptResult | None, error | None)``."""
    seed = config.trial_seed(algorithm, trial)
    job = (config.function, config.dim, algorithm, config.params_for(algorithm), seed,
           config.budget_secs, trace)
    if config.budget_secs is None:
        return _run_trial(job)
    return _run_timed(job)


def _run_timed(job):
    # Wall-time mode: the run stops at the first evaluation past the deadline;
    # the incumbent at that moment is the trial's answer.
    function, dim, algorithm, params, seed, budget_secs, trace = job
    objective = registry_lookup(function, dim)
    best = {"f": math.inf, "x": None, "n": 0}
    inner = objective.func
    deadline = time.perf_counter() + budget_secs

    def tracked(x):
        if time.perf_counter() > deadline:
            raise _Timeout
        v = inner(x)
        best["n"] += 1
        if v < best["f"]:
            best["f"], best["x"] = v, np.array(x, dtype=float)
        return v

    try:
        result = _MINIMIZERS[algorithm](dataclasses.replace(objective, func=tracked), params,
                                        RngStream(seed), trace=trace)
    except NonFiniteObjectiveError as exc:
        return None, str(exc)
    except _Timeout:
        result = OptResult(best_position=best["x"], best_fitness=float(best["f"]),
                           evaluations=best["n"], generations=-1)
    return result, None


def _job_list(config):
    jobs = []
    for algorithm in config.algorithms:
        params = config.params_for(algorithm)
        for k in range(config.trials):
            jobs.append((algorithm, k, (config.function, config.dim, algorithm, params,
                                        config.trial_seed(algorithm, k), config.budget_secs,
                                        False)))
    return jobs


def _execute(job):
    if job[5] is None:
        result, error = _run_trial(job)
    else:
        result, error = _run_timed(job)
    if result is None:
        return float("nan"), 0, error
    return result.best_fitness, result.evaluations, None


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every (algorithm, trial) pair and aggregate per algorithm.

    Trials are independent; with ``workers > 1`` they run in a process pool,
    but results are always folded in (algorithm, trial) order so the output
    does not depend on scheduling.
    """
    objective = registry_lookup(config.function, config.dim)
    jobs = _job_list(config)
    payloads = [j[2] for j in jobs]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outputs = list(pool.map(_execute, payloads, chunksize=4))
    else:
        outputs = [_execute(p) for p in payloads]

    per_algo = {a: [] for a in config.algorithms}
    for (algorithm, k, payload), (final, evals, error) in zip(jobs, outputs):
        per_algo[algorithm].append(TrialOutcome(k, payload[4], final, evals, error))

    opt = objective.optimum_value
    stats = {a: trial_stats([o.final for o in per_algo[a]], opt, config.success_tolerance)
             for a in config.algorithms}
    ranks = rank_by_mean([stats[a].mean for a in config.algorithms])
    results = tuple(AlgorithmResult(a, stats[a], tuple(per_algo[a]), r)
                    for a, r in zip(config.algorithms, ranks))
    return ExperimentResult(config, objective.dim, opt, results)


@dataclass(frozen=True)
class Summary:
    algorithms: tuple
    average_rank: tuple
    final_rank: tuple
    success_rate: tuple
    ties: tuple


def aggregate_summary(per_function_ranks, algorithms=None, successes=None, trials=None) -> Summary:
    """Average ranks across functions and rank the averages.

    ``successes`` and ``trials`` (per function, per algorithm) give pooled
    success rates: total successes over total trials.
    """
    ranks = np.asarray(per_function_ranks, dtype=float)
    if ranks.ndim != 2 or ranks.shape[0] == 0:
        raise ValueError("need at least one function's rank vector")
    k = ranks.shape[1]
    if algorithms is None:
        algorithms = tuple(ALGORITHMS[:k]) if k <= len(ALGORITHMS) else tuple(range(k))
    avg = ranks.mean(axis=0)
    final = rank_by_mean(list(avg))
    ties = tuple(sorted({tuple(a for a, r in zip(algorithms, final) if r == v)
                         for v in final if final.count(v) > 1}))
    if successes is not None:
        s = np.asarray(successes, dtype=float).sum(axis=0)
        n = np.asarray(trials, dtype=float).sum(axis=0)
        pooled = tuple(float(x) for x in s / n)
    else:
        pooled = tuple(float("nan") for _ in range(k))
    return Summary(tuple(algorithms), tuple(float(a) for a in avg), tuple(final), pooled, ties)


def _fmt(x):
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return repr(float(f"{x:.17g}"))
    return str(x)


def _num(x):
    return float(f"{x:.17g}") if isinstance(x, float) and math.isfinite(x) else x


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return _num(x) if isinstance(x, float) else x


def result_rows(results):
    rows = []
    for exp in results:
        budget = exp.config.budget_evals if exp.config.budget_evals is not None else ""
        for r in exp.results:
            s = r.stats
            rows.append({"function": exp.config.function, "dim": exp.dim, "algorithm": r.algorithm,
                         "trials": s.trials, "budget_evals": budget, "best": s.best,
                         "worst": s.worst, "mean": s.mean, "std_dev": s.std_dev,
                         "success_rate": s.success_rate, "rank": r.rank})
    return rows


def export_results(results, fmt, path):
    """Write one or more :class:`ExperimentResult` to ``path`` as CSV or JSON.

    Floats use 17 significant digits so values round-trip exactly.
    """
    if isinstance(results, ExperimentResult):
        results = [results]
    results = list(results)
    if not results or any(not exp.results for exp in results):
        raise ValueError("nothing to export: empty algorithm list")
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    try:
        if fmt == "csv":
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(CSV_COLUMNS)
                for row in result_rows(results):
                    writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
        else:
            with open(path, "w") as fh:
                json.dump([_experiment_json(exp) for exp in results], fh, indent=2)
                fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc.strerror or exc}") from exc
    return path


def _experiment_json(exp):
    out = {"config": exp.config.echo(), "optimum_value": _num(exp.optimum_value), "rows": []}
    for row, r in zip(result_rows([exp]), exp.results):
        row = {k: _json_safe(v) for k, v in row.items()}
        row["std_dev_defined"] = r.stats.std_dev_defined
        row["successes"] = r.stats.successes
        row["normal_success_rate"] = _json_safe(r.stats.normal_success_rate)
        row["finals"] = [_json_safe(o.final) for o in r.outcomes]
        row["seeds"] = [o.seed for o in r.outcomes]
        row["failures"] = [{"trial": o.trial, "error": o.error} for o in r.outcomes if o.failed]
        out["rows"].append(row)
    return out


def load_results_json(path):
    with open(path) as fh:
        return json.load(fh)


def export_trace(result: OptResult, path):
    """Write a trace as CSV: ``generation,squid_id,swarm_tag,fitness,x0,x1,...``."""
    if result.trace is None:
        raise ValueError("trace not recorded; rerun with trace=True")
    dim = len(result.best_position)
    header = ["generation", "squid_id", "swarm_tag", "fitness"] + [f"x{k}" for k in range(dim)]
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for rec in result.trace:
                writer.writerow([rec.generation, rec.squid_id, rec.swarm_tag, _fmt(rec.fitness)]
                                + [_fmt(v) for v in rec.position])
    except OSError as exc:
        raise OSError(f"cannot write trace to {path}: {exc.strerror or exc}") from exc
    return path


# Config files: one ``key = value`` per line, ``#`` comments. Keys mirror
# ExperimentConfig fields; ``<algo>.<param>`` sets a per-algorithm override.
# ``functions`` (suite only) lists several registry names; ``dim.<name>``
# sets a per-function dimension.

_SCALAR_KEYS = {"function", "dim", "algorithms", "trials", "base_seed", "budget_evals",
                "budget_secs", "success_tolerance", "workers", "functions"}


def _parse_value(text):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("none", "null", ""):
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_config_text(text):
    """Parse the flat ``key = value`` format into a plain dict."""
    out, overrides, dims = {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in out or key in dims or any(key == f"{a}.{p}" for a, ps in overrides.items() for p in ps):
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if "." in key:
            head, name = key.split(".", 1)
            if head == "dim":
                dims[name] = int(value)
            elif head in ALGORITHMS:
                overrides.setdefault(head, {})[name] = _parse_value(value)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        elif key in _SCALAR_KEYS:
            if key in ("algorithms", "functions"):
                items = [s.strip() for s in value.replace(",", " ").split()]
                out[key] = tuple(ALGORITHMS if items == ["all"] else items)
            else:
                out[key] = _parse_value(value)
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    out["overrides"] = overrides
    out["dims"] = dims
    return out


def configs_from_text(text):
    """Build one :class:`ExperimentConfig` per function listed in a config file."""
    raw = parse_config_text(text)
    functions = raw.pop("functions", None)
    dims = raw.pop("dims")
    if functions is None:
        if "function" not in raw:
            raise ConfigError("config needs 'function' or 'functions'")
        functions = (raw.pop("function"),)
    elif "function" in raw:
        raise ConfigError("use either 'function' or 'functions', not both")
    unknown_dims = set(dims) - set(functions)
    if unknown_dims:
        raise ConfigError(f"dim given for unlisted function(s) {sorted(unknown_dims)}")
    if "dim" in raw and len(functions) > 1:
        raise ConfigError("'dim' applies to a single function; use dim.<name>")
    try:
        return [ExperimentConfig(function=f, **{**raw, "dim": dims.get(f, raw.get("dim"))})
                for f in functions]
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def run_suite(configs, out_dir):
    """Run several experiments and write per-function and summary files."""
    os.makedirs(out_dir, exist_ok=True)
    results = [run_experiment(c) for c in configs]
    export_results(results, "csv", os.path.join(out_dir, "results.csv"))
    export_results(results, "json", os.path.join(out_dir, "results.json"))
    algorithms = results[0].config.algorithms
    if any(r.config.algorithms != algorithms for r in results):
        raise ConfigError("all suite entries must compare the same algorithms")
    summary = aggregate_summary(
        [r.ranks for r in results], algorithms,
        successes=[[a.stats.successes for a in r.results] for r in results],
        trials=[[a.stats.trials for a in r.results] for r in results])
    with open(os.path.join(out_dir, "summary.csv"), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["algorithm", "average_rank", "final_rank", "success_rate"])
        for row in zip(summary.algorithms, summary.average_rank, summary.final_rank,
                       summary.success_rate):
            writer.writerow([row[0], _fmt(row[1]), row[2], _fmt(row[3])])
    return results, summary
