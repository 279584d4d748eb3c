"""Reference optimizers in their original forms: global-best PSO and a generational GA."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    NO_SWARM,
    BudgetExhausted,
    Evaluator,
    Objective,
    ParameterError,
    RngStream,
    TraceRecord,
    uniform_population,
)
from .ssa import OptResult


def _check_budget(p):
    if p.max_generations < 1:
        raise ParameterError("max_generations must be positive")
    if p.max_evaluations is not None and p.max_evaluations < 1:
        raise ParameterError("max_evaluations must be positive")


@dataclass(frozen=True)
class PsoParams:
    population: int = 40
    inertia: float = 1.0
    cognitive: float = 2.0
    social: float = 2.0
    clamp_k: float = 0.5
    max_generations: int = 10**9
    max_evaluations: Optional[int] = None
    target_fitness: Optional[float] = None

    def __post_init__(self):
        if self.population < 2:
            raise ParameterError("PSO needs at least 2 particles")
        if not 0.0 < self.clamp_k <= 1.0:
            raise ParameterError("clamp_k must lie in (0, 1]")
        _check_budget(self)


@dataclass(frozen=True)
class GaParams:
    population: int = 40
    crossover_prob: float = 0.95
    mutation_prob: float = 0.05
    mutation_scale: float = 0.1
    max_generations: int = 10**9
    max_evaluations: Optional[int] = None
    target_fitness: Optional[float] = None

    def __post_init__(self):
        if self.population < 2:
            raise ParameterError("GA needs at least 2 individuals")
        if not 0.0 <= self.crossover_prob <= 1.0 or not 0.0 <= self.mutation_prob <= 1.0:
            raise ParameterError("probabilities must lie in [0, 1]")
        if self.mutation_scale < 0:
            raise ParameterError("mutation_scale must be nonnegative")
        _check_budget(self)


def _trace_rows(gen, pos, fit):
    return [TraceRecord(gen, k, NO_SWARM, tuple(pos[k].tolist()), float(fit[k]))
            for k in range(len(fit))]


def pso_minimize(objective: Objective, params: PsoParams = PsoParams(),
                 rng: Optional[RngStream] = None, trace: bool = False,
                 init_positions=None, init_velocities=None) -> OptResult:
    """Global-best particle swarm with a per-axis velocity clamp.

    Velocities start at zero unless ``init_velocities`` is given and are
    limited to ``clamp_k * (upper - lower) / 2`` on each axis.
    """
    if rng is None:
        rng = RngStream(0)
    space = objective.space
    n, dim = params.population, space.dim
    vmax = params.clamp_k * space.width / 2.0
    evaluate = Evaluator(objective.func, params.max_evaluations)

    if init_positions is None:
        x = uniform_population(space, n, rng)
    else:
        x = np.array(init_positions, dtype=float).reshape(n, dim)
    v = np.zeros((n, dim)) if init_velocities is None else \
        np.clip(np.array(init_velocities, dtype=float).reshape(n, dim), -vmax, vmax)
    f = np.full(n, np.inf)
    pbest, pbest_f = x.copy(), np.full(n, np.inf)
    g, g_f = None, math.inf
    history, records, generations = [], ([] if trace else None), 0

    try:
        for k in range(n):
            f[k] = evaluate(x[k])
            pbest_f[k] = f[k]
            if f[k] < g_f:
                g, g_f = x[k].copy(), f[k]
    except BudgetExhausted:
        pass
    history.append(g_f)

    exhausted = evaluate.count < n
    while not exhausted and generations < params.max_generations and not (
            params.target_fitness is not None and g_f <= params.target_fitness):
        r1 = rng.random((n, dim))
        r2 = rng.random((n, dim))
        v = (params.inertia * v + params.cognitive * r1 * (pbest - x)
             + params.social * r2 * (g - x))
        v = np.clip(v, -vmax, vmax)
        x = np.minimum(np.maximum(x + v, space.lower), space.upper)
        try:
            for k in range(n):
                f[k] = evaluate(x[k])
                if f[k] < pbest_f[k]:
                    pbest[k], pbest_f[k] = x[k], f[k]
                if f[k] < g_f:
                    g, g_f = x[k].copy(), f[k]
        except BudgetExhausted:
            exhausted = True
        generations += 1
        history.append(g_f)
        if records is not None and not exhausted:
            records.extend(_trace_rows(generations, x, f))

    return OptResult(best_position=g, best_fitness=float(g_f), evaluations=evaluate.count,
                     generations=generations, history=tuple(history), trace=records)


def ga_minimize(objective: Objective, params: GaParams = GaParams(),
                rng: Optional[RngStream] = None, trace: bool = False,
                init_positions=None) -> OptResult:
    """Real-coded generational GA without elitism.

    Roulette selection on ``f_max - f + 1e-12``, single-point crossover,
    per-gene Gaussian mutation with sigma ``mutation_scale * (upper - lower)``
    and full replacement. The best point ever seen is reported but never
    reinserted into the population.
    """
    if rng is None:
        rng = RngStream(0)
    space = objective.space
    n, dim = params.population, space.dim
    sigma = params.mutation_scale * space.width
    evaluate = Evaluator(objective.func, params.max_evaluations)

    pop = uniform_population(space, n, rng) if init_positions is None else \
        np.array(init_positions, dtype=float).reshape(n, dim)
    fit = np.full(n, np.inf)
    best_x, best_f = None, math.inf
    history, records, generations = [], ([] if trace else None), 0

    def score(children, out):
        nonlocal best_x, best_f
        for k in range(n):
            out[k] = evaluate(children[k])
            if out[k] < best_f:
                best_x, best_f = children[k].copy(), out[k]

    try:
        score(pop, fit)
    except BudgetExhausted:
        pass
    history.append(best_f)

    exhausted = evaluate.count < n
    while not exhausted and generations < params.max_generations and not (
            params.target_fitness is not None and best_f <= params.target_fitness):
        pop = np.minimum(np.maximum(_breed(pop, fit, params, rng, sigma), space.lower), space.upper)
        fit = np.full(n, np.inf)
        try:
            score(pop, fit)
        except BudgetExhausted:
            exhausted = True
        generations += 1
        history.append(best_f)
        if records is not None and not exhausted:
            records.extend(_trace_rows(generations, pop, fit))

    return OptResult(best_position=best_x, best_fitness=float(best_f), evaluations=evaluate.count,
                     generations=generations, history=tuple(history), trace=records)


SELECTION_EPS = 1e-12


def roulette_weights(fit):
    w = fit.max() - fit + SELECTION_EPS
    return w / w.sum()


def _breed(pop, fit, params: GaParams, rng: RngStream, sigma):
    n, dim = pop.shape
    cdf = np.cumsum(roulette_weights(fit))
    cdf[-1] = 1.0
    parents = np.searchsorted(cdf, rng.random(n), side="right")
    parents = np.minimum(parents, n - 1)
    children = pop[parents].copy()
    for k in range(0, n - 1, 2):
        if dim > 1 and rng.random() < params.crossover_prob:
            cut = int(rng.integers(1, dim))
            a = children[k, cut:].copy()
            children[k, cut:] = children[k + 1, cut:]
            children[k + 1, cut:] = a
    mask = rng.random((n, dim)) < params.mutation_prob
    if mask.any():
        children = children + mask * rng.normal(0.0, 1.0, (n, dim)) * sigma
    return children
