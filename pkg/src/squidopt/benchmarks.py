"""Benchmark functions with their bounds, known optima and a name registry.

Every function takes points along the last axis: a ``(d,)`` vector gives a
float, a ``(..., d)`` batch gives an array. Registry names are
the lowercase function names and double as the CLI ``--function`` vocabulary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .core import DimensionError, Objective, ParameterError, SearchSpace


def _prep(x, dim=None, min_dim=1):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        raise DimensionError("expected a vector, got a scalar")
    if dim is not None and x.shape[-1] != dim:
        raise DimensionError(f"expected vectors of length {dim}, got shape {x.shape}")
    if x.shape[-1] < min_dim:
        raise DimensionError(f"expected vectors of length >= {min_dim}, got shape {x.shape}")
    return x


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def beale(x):
    x = _prep(x, 2)
    x1, x2 = x[..., 0], x[..., 1]
    return _out((1.5 - x1 + x1 * x2) ** 2
                + (2.25 - x1 + x1 * x2 ** 2) ** 2
                + (2.625 - x1 + x1 * x2 ** 3) ** 2)


def easom(x):
    x = _prep(x, 2)
    x1, x2 = x[..., 0], x[..., 1]
    return _out(-np.cos(x1) * np.cos(x2) * np.exp(-(x1 - np.pi) ** 2 - (x2 - np.pi) ** 2))


def michalewicz(x, m=10):
    x = _prep(x)
    i = np.arange(1, x.shape[-1] + 1)
    return _out(-np.sum(np.sin(x) * np.sin(i * x ** 2 / np.pi) ** (2 * m), axis=-1))


def ackley(x):
    x = _prep(x)
    n = x.shape[-1]
    return _out(-20.0 * np.exp(-0.2 * np.sqrt(np.sum(x * x, axis=-1) / n))
                - np.exp(np.sum(np.cos(2 * np.pi * x), axis=-1) / n) + 20.0 + np.e)


def goldstein_price(x):
    """Goldstein-Price shifted down by 3 so the global minimum is 0 at (0, -1)."""
    x = _prep(x, 2)
    x1, x2 = x[..., 0], x[..., 1]
    a = 1 + (x1 + x2 + 1) ** 2 * (19 - 14 * x1 + 3 * x1 ** 2 - 14 * x2 + 6 * x1 * x2 + 3 * x2 ** 2)
    b = 30 + (2 * x1 - 3 * x2) ** 2 * (18 - 32 * x1 + 12 * x1 ** 2 + 48 * x2 - 36 * x1 * x2 + 27 * x2 ** 2)
    return _out(a * b - 3.0)


def griewank(x):
    x = _prep(x)
    i = np.arange(1, x.shape[-1] + 1)
    return _out(1.0 + np.sum(x * x, axis=-1) / 4000.0 - np.prod(np.cos(x / np.sqrt(i)), axis=-1))


def levy(x):
    # Middle-term phase is pi*w + pi (printed as (pi*x + 7*pi)/4), not the
    # pi*w + 1 of the common Levy variant.
    x = _prep(x)
    w = (x + 3.0) / 4.0
    head = np.sin(np.pi * w[..., 0]) ** 2
    wi = w[..., :-1]
    body = np.sum((wi - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * wi + np.pi) ** 2), axis=-1)
    wd = w[..., -1]
    tail = (wd - 1.0) ** 2 * (1.0 + np.sin(2 * np.pi * wd) ** 2)
    return _out(head + body + tail)


def rastrigin(x):
    x = _prep(x)
    return _out(10.0 * x.shape[-1] + np.sum(x ** 2 - 10.0 * np.cos(2 * np.pi * x), axis=-1))


def rosenbrock(x):
    x = _prep(x, min_dim=2)
    a, b = x[..., :-1], x[..., 1:]
    return _out(np.sum(100.0 * (a ** 2 - b) ** 2 + (1.0 - a) ** 2, axis=-1))


SHEKEL_BETA = np.array([1, 2, 2, 4, 4, 6, 3, 7, 5, 5], dtype=float) / 10.0

# Rows 3 and 4 repeat rows 1 and 2 in the published matrix; it is used as printed.
SHEKEL_C = np.array([
    [4.0, 1.0, 8.0, 6.0, 3.0, 2.0, 5.0, 8.0, 6.0, 7.0],
    [4.0, 1.0, 8.0, 6.0, 7.0, 9.0, 3.0, 1.0, 2.0, 3.0],
    [4.0, 1.0, 8.0, 6.0, 3.0, 2.0, 5.0, 8.0, 6.0, 7.0],
    [4.0, 1.0, 8.0, 6.0, 7.0, 9.0, 3.0, 1.0, 2.0, 3.0],
])

# The widely used Shekel-10 matrix, kept for comparison with published minima.
SHEKEL_C_CANONICAL = np.array([
    [4.0, 1.0, 8.0, 6.0, 3.0, 2.0, 5.0, 8.0, 6.0, 7.0],
    [4.0, 1.0, 8.0, 6.0, 7.0, 9.0, 3.0, 1.0, 2.0, 3.6],
    [4.0, 1.0, 8.0, 6.0, 3.0, 2.0, 3.0, 8.0, 6.0, 7.0],
    [4.0, 1.0, 8.0, 6.0, 7.0, 9.0, 3.0, 1.0, 2.0, 3.6],
])


def shekel_raw(x, C=SHEKEL_C, beta=SHEKEL_BETA):
    x = _prep(x, 4)
    d2 = np.sum((x[..., :, None] - C) ** 2, axis=-2)
    return _out(-np.sum(1.0 / (d2 + beta), axis=-1))


def _shekel_grad(x, C=SHEKEL_C, beta=SHEKEL_BETA):
    diff = x[:, None] - C
    s = np.sum(diff ** 2, axis=0) + beta
    return np.sum(2.0 * diff / s ** 2, axis=1)


@lru_cache(maxsize=None)
def _shekel_minimum():
    res = minimize(shekel_raw, np.full(4, 4.0), jac=_shekel_grad, method="BFGS",
                   options={"gtol": 1e-14})
    x = res.x
    return x, shekel_raw(x)


def shekel(x):
    """Shekel foxholes shifted so the global minimum value is exactly 0."""
    return shekel_raw(x) - _shekel_minimum()[1]


def sphere(x):
    x = _prep(x)
    return _out(np.sum(x * x, axis=-1))


@lru_cache(maxsize=None)
def michalewicz_argmin(dim, m=10):
    """Coordinate-wise minimizer of Michalewicz (the function is separable).

    Each axis is scanned on a dense grid and the best cell refined with a
    bounded scalar search.
    """
    grid = np.linspace(0.0, np.pi, 20001)
    out = np.empty(dim)
    for k in range(dim):
        i = k + 1
        g = lambda t: -math.sin(t) * math.sin(i * t * t / math.pi) ** (2 * m)
        vals = -np.sin(grid) * np.sin(i * grid ** 2 / np.pi) ** (2 * m)
        j = int(np.argmin(vals))
        lo, hi = grid[max(j - 1, 0)], grid[min(j + 1, grid.size - 1)]
        res = minimize_scalar(g, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
        out[k] = res.x if res.fun <= vals[j] else grid[j]
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class BenchmarkSpec:
    name: str
    func: Callable
    low: float
    high: float
    default_dim: int
    fixed_dim: bool
    min_dim: int
    optimum: Callable[[int], tuple]

    def space(self, dim):
        return SearchSpace.box(self.low, self.high, dim)


def _const(point_value, value):
    return lambda d: (np.full(d, point_value), value)


REGISTRY = {
    spec.name: spec for spec in [
        BenchmarkSpec("beale", beale, -4.5, 4.5, 2, True, 2,
                      lambda d: (np.array([3.0, 0.5]), 0.0)),
        BenchmarkSpec("easom", easom, -100.0, 100.0, 2, True, 2,
                      lambda d: (np.array([np.pi, np.pi]), -1.0)),
        BenchmarkSpec("michalewicz", michalewicz, 0.0, np.pi, 10, False, 1,
                      lambda d: (michalewicz_argmin(d), michalewicz(michalewicz_argmin(d)))),
        BenchmarkSpec("ackley", ackley, -32.768, 32.768, 128, False, 1, _const(0.0, 0.0)),
        BenchmarkSpec("goldstein_price", goldstein_price, -2.0, 2.0, 2, True, 2,
                      lambda d: (np.array([0.0, -1.0]), 0.0)),
        BenchmarkSpec("griewank", griewank, -600.0, 600.0, 16, False, 1, _const(0.0, 0.0)),
        BenchmarkSpec("levy", levy, -10.0, 10.0, 16, False, 1, _const(1.0, 0.0)),
        BenchmarkSpec("rastrigin", rastrigin, -5.12, 5.12, 16, False, 1, _const(0.0, 0.0)),
        BenchmarkSpec("rosenbrock", rosenbrock, -5.0, 10.0, 128, False, 2, _const(1.0, 0.0)),
        BenchmarkSpec("shekel", shekel, 0.0, 10.0, 4, True, 4,
                      lambda d: (_shekel_minimum()[0].copy(), 0.0)),
        BenchmarkSpec("sphere", sphere, -5.12, 5.12, 32, False, 1, _const(0.0, 0.0)),
    ]
}

# Functions compared against the baselines (the validation trio is separate).
COMPARISON_SET = ("ackley", "goldstein_price", "griewank", "levy",
                  "rastrigin", "rosenbrock", "shekel", "sphere")
VALIDATION_SET = ("beale", "easom", "michalewicz")


def registry_lookup(name: str, dim: Optional[int] = None) -> Objective:
    """Build the :class:`Objective` for a registered benchmark."""
    try:
        spec = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown benchmark {name!r}; choose from {sorted(REGISTRY)}") from None
    if dim is None:
        dim = spec.default_dim
    elif spec.fixed_dim and dim != spec.default_dim:
        raise ParameterError(f"{name} is defined only for dim={spec.default_dim}")
    if dim < spec.min_dim:
        raise ParameterError(f"{name} needs dim >= {spec.min_dim}")
    x, value = spec.optimum(dim)
    return Objective(spec.space(dim), spec.func, (x, value), name=name)
