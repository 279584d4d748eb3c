import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from squidopt.baselines import (
    SELECTION_EPS,
    GaParams,
    PsoParams,
    _breed,
    ga_minimize,
    pso_minimize,
    roulette_weights,
)
from squidopt.benchmarks import registry_lookup, sphere
from squidopt.core import NonFiniteObjectiveError, Objective, ParameterError, RngStream, SearchSpace


def box_obj(func, lo, hi, dim):
    return Objective(SearchSpace.box(lo, hi, dim), func)


class RecordingPso:
    """Wraps an objective to capture the positions PSO evaluates, in order."""

    def __init__(self, func=sphere):
        self.func, self.points = func, []

    def __call__(self, x):
        self.points.append(np.array(x, dtype=float))
        return self.func(x)


class TestPso:
    def test_fixed_point(self):
        # one particle sitting on its own best and the global best, v = 0
        obj = box_obj(sphere, -1, 1, 2)
        p = PsoParams(population=2, inertia=1.0, cognitive=0.0, social=0.0, max_generations=25)
        start = [[0.0, 0.0], [0.0, 0.0]]
        res = pso_minimize(obj, p, RngStream(0), trace=True, init_positions=start)
        for rec in res.trace:
            assert rec.position == (0.0, 0.0)
        assert res.best_fitness == 0.0

    def test_pure_inertia(self):
        rec = RecordingPso(lambda x: float(x[0] ** 2))
        obj = box_obj(rec, -1, 1, 1)
        p = PsoParams(population=2, inertia=1.0, cognitive=0.0, social=0.0, max_generations=1)
        pso_minimize(obj, p, RngStream(0), init_positions=[[0.0], [0.5]],
                     init_velocities=[[0.1], [0.0]])
        assert rec.points[2][0] == pytest.approx(0.1)
        assert rec.points[3][0] == 0.5

    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 2**32))
    def test_velocity_clamp(self, seed):
        # with the population reinitialised far apart, unclamped velocities would exceed 5
        rec = RecordingPso(lambda x: float(np.sum(np.abs(x))))
        obj = box_obj(rec, -10, 10, 3)
        p = PsoParams(population=6, clamp_k=0.5, max_generations=40)
        res = pso_minimize(obj, p, RngStream(seed), trace=True)
        pos = {}
        for r in res.trace:
            pos.setdefault(r.squid_id, []).append(np.array(r.position))
        for path in pos.values():
            steps = np.abs(np.diff(np.array(path), axis=0))
            assert steps.max(initial=0.0) <= 5.0 + 1e-12

    def test_clamp_applies_to_initial_velocity(self):
        rec = RecordingPso(lambda x: 1.0)
        obj = box_obj(rec, -10, 10, 1)
        p = PsoParams(population=2, inertia=1.0, cognitive=0.0, social=0.0, max_generations=1)
        pso_minimize(obj, p, RngStream(0), init_positions=[[0.0], [0.0]],
                     init_velocities=[[50.0], [-50.0]])
        assert [q[0] for q in rec.points[2:]] == [5.0, -5.0]

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**32))
    def test_incumbent_monotone(self, seed):
        res = pso_minimize(registry_lookup("rastrigin", 4), PsoParams(max_evaluations=3000),
                           RngStream(seed))
        assert np.all(np.diff(res.history) <= 0)

    def test_trace_tag_and_shape(self):
        res = pso_minimize(box_obj(sphere, -1, 1, 2), PsoParams(population=4, max_generations=3),
                           RngStream(1), trace=True)
        assert len(res.trace) == 12
        assert {r.swarm_tag for r in res.trace} == {"none"}
        assert {r.generation for r in res.trace} == {1, 2, 3}

    def test_deterministic(self):
        obj = registry_lookup("ackley", 5)
        a = pso_minimize(obj, PsoParams(max_evaluations=2000), RngStream(4), trace=True)
        b = pso_minimize(obj, PsoParams(max_evaluations=2000), RngStream(4), trace=True)
        assert a.best_fitness == b.best_fitness and a.trace == b.trace

    def test_budget_respected(self):
        res = pso_minimize(box_obj(sphere, -1, 1, 2), PsoParams(max_evaluations=101), RngStream(0))
        assert res.evaluations == 101

    @pytest.mark.parametrize("kw", [dict(population=1), dict(clamp_k=0.0), dict(clamp_k=1.5),
                                    dict(max_evaluations=0)])
    def test_invalid(self, kw):
        with pytest.raises(ParameterError):
            PsoParams(**kw)

    def test_non_finite(self):
        obj = box_obj(lambda x: float("inf") if x[0] > 0 else 0.0, -1, 1, 1)
        with pytest.raises(NonFiniteObjectiveError):
            pso_minimize(obj, PsoParams(max_evaluations=1000), RngStream(0))


class TestGa:
    def test_no_variation_copies_parents(self):
        rng = RngStream(5)
        pop = rng.uniform(-1, 1, (10, 3))
        fit = rng.random(10)
        kids = _breed(pop, fit, GaParams(crossover_prob=0.0, mutation_prob=0.0), rng, np.ones(3))
        for k in kids:
            assert any(np.array_equal(k, p) for p in pop)

    def test_identical_population_is_fixed_point(self):
        obj = box_obj(sphere, -2, 2, 3)
        start = np.tile([0.5, -0.25, 1.0], (8, 1))
        p = GaParams(population=8, mutation_prob=0.0, max_generations=10)
        res = ga_minimize(obj, p, RngStream(3), trace=True, init_positions=start)
        for rec in res.trace:
            assert rec.position == (0.5, -0.25, 1.0)

    @pytest.mark.parametrize("seed", range(3))
    def test_sphere_convergence(self, seed):
        res = ga_minimize(registry_lookup("sphere", 2), GaParams(max_evaluations=20_000),
                          RngStream(seed))
        assert res.best_fitness < 1e-3

    def test_population_size_constant(self):
        res = ga_minimize(box_obj(sphere, -1, 1, 2), GaParams(population=6, max_generations=5),
                          RngStream(0), trace=True)
        for g in range(1, 6):
            assert sum(r.generation == g for r in res.trace) == 6

    def test_roulette_weights(self):
        w = roulette_weights(np.array([1.0, 3.0]))
        np.testing.assert_allclose(w, [(2 + SELECTION_EPS) / (2 + 2 * SELECTION_EPS),
                                       SELECTION_EPS / (2 + 2 * SELECTION_EPS)])
        assert roulette_weights(np.array([4.0, 4.0, 4.0])).tolist() == pytest.approx([1 / 3] * 3)

    def test_deterministic(self):
        obj = registry_lookup("levy", 4)
        a = ga_minimize(obj, GaParams(max_evaluations=2000), RngStream(8), trace=True)
        b = ga_minimize(obj, GaParams(max_evaluations=2000), RngStream(8), trace=True)
        assert a.best_fitness == b.best_fitness and a.trace == b.trace

    def test_evaluations_and_incumbent(self):
        calls = []
        obj = box_obj(lambda x: calls.append(1) or sphere(x), -3, 3, 2)
        res = ga_minimize(obj, GaParams(max_evaluations=777), RngStream(2))
        assert res.evaluations == len(calls) == 777
        assert sphere(res.best_position) == res.best_fitness
        assert np.all(np.diff(res.history) <= 0)

    @pytest.mark.parametrize("kw", [dict(population=1), dict(crossover_prob=1.1),
                                    dict(mutation_prob=-0.1), dict(mutation_scale=-1.0)])
    def test_invalid(self, kw):
        with pytest.raises(ParameterError):
            GaParams(**kw)
