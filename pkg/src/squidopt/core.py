"""Shared types: search spaces, objectives, candidates and seeded random streams."""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np


class DimensionError(ValueError):
    """A vector does not match the dimension of its search space."""


class ParameterError(ValueError):
    """An algorithm or experiment parameter is outside its valid range."""


class NonFiniteObjectiveError(RuntimeError):
    """The objective returned NaN or an infinity.

    The offending position is kept on ``position`` so a run can be replayed.
    """

    def __init__(self, position, value):
        self.position = np.array(position, dtype=float)
        self.value = value
        super().__init__(f"objective returned {value!r} at {self.position.tolist()}")


@dataclass(frozen=True)
class SearchSpace:
    """Axis-aligned box ``lower <= x <= upper``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float)).copy()
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float)).copy()
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size == 0:
            raise DimensionError("lower and upper must be non-empty vectors of equal length")
        if not np.all(lower < upper):
            raise ParameterError("every axis needs lower < upper")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def box(cls, low: float, high: float, dim: int) -> "SearchSpace":
        if dim < 1:
            raise ParameterError(f"dim must be >= 1, got {dim}")
        return cls(np.full(dim, float(low)), np.full(dim, float(high)))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, point) -> bool:
        point = np.asarray(point, dtype=float)
        return point.shape == self.lower.shape and bool(
            np.all(point >= self.lower) and np.all(point <= self.upper)
        )


@dataclass(frozen=True)
class Objective:
    """A deterministic scalar function on a search space (minimization sense)."""

    space: SearchSpace
    func: Callable[[np.ndarray], float]
    known_optimum: Optional[tuple] = None
    name: str = ""

    def __post_init__(self):
        if self.known_optimum is not None:
            x, value = self.known_optimum
            x = np.asarray(x, dtype=float)
            if not self.space.contains(x):
                raise ParameterError("known optimum lies outside the search space")
            object.__setattr__(self, "known_optimum", (x, float(value)))

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def optimum_value(self) -> Optional[float]:
        return None if self.known_optimum is None else self.known_optimum[1]

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.space.dim,):
            raise DimensionError(f"expected a vector of length {self.space.dim}, got shape {x.shape}")
        return float(self.func(x))


@dataclass(frozen=True)
class Squid:
    position: np.ndarray
    fitness: float


@dataclass(frozen=True)
class TraceRecord:
    """One candidate's state at the end of one generation."""

    generation: int
    squid_id: int
    swarm_tag: str
    position: tuple
    fitness: float


# Tag written for algorithms that have no primary/secondary split.
NO_SWARM = "none"


def clamp(point, space: SearchSpace) -> np.ndarray:
    """Project ``point`` onto the box of ``space``."""
    point = np.asarray(point, dtype=float)
    if point.shape != (space.dim,):
        raise DimensionError(f"expected a vector of length {space.dim}, got shape {point.shape}")
    return np.minimum(np.maximum(point, space.lower), space.upper)


_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, *keys) -> int:
    """Hash a seed and a path of keys into a new 64-bit seed.

    The digest is BLAKE2b (8-byte output) over the decimal seed followed by
    ``repr`` of each key, joined with ``/``. Equal inputs give equal seeds on
    every platform; different key paths give unrelated seeds.
    """
    text = "/".join([str(int(seed) & _MASK64)] + [repr(k) for k in keys])
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class RngStream:
    """A seeded random stream backed by the PCG64 generator.

    PCG64 is numpy's documented permuted-congruential generator; a given seed
    yields the same sequence on every platform. Child streams for parallel
    trials come from :meth:`child`, which derives a fresh seed by hashing.
    """

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed <= _MASK64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self._gen = np.random.Generator(np.random.PCG64(seed))

    def child(self, *keys) -> "RngStream":
        return RngStream(derive_seed(self.seed, *keys))

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def random(self, size=None):
        return self._gen.random(size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self._gen.normal(loc, scale, size)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size)

    def arcsine(self, size=None):
        return arcsine_from_uniform(self._gen.random(size))


def arcsine_from_uniform(u):
    """Inverse CDF of the arcsine law on [0, 1]: ``sin(pi*u/2)**2``."""
    return np.sin(0.5 * np.pi * np.asarray(u, dtype=float)) ** 2


def sample_arcsine(rng: RngStream) -> float:
    """Draw one value with CDF ``(2/pi) * arcsin(sqrt(x))``."""
    return float(arcsine_from_uniform(rng.random()))


def arcsine_cdf(x):
    return 2.0 / math.pi * np.arcsin(np.sqrt(np.clip(x, 0.0, 1.0)))


def uniform_point(space: SearchSpace, rng: RngStream) -> np.ndarray:
    return space.lower + rng.random(space.dim) * space.width


def uniform_population(space: SearchSpace, n: int, rng: RngStream) -> np.ndarray:
    return space.lower + rng.random((n, space.dim)) * space.width


@dataclass
class Evaluator:
    """Counts objective calls, rejects non-finite values and enforces a budget.

    ``max_evaluations`` is checked before each call; once exhausted,
    :class:`BudgetExhausted` is raised instead of calling the objective.
    """

    objective: Callable[[np.ndarray], float]
    max_evaluations: Optional[int] = None
    count: int = field(default=0, init=False)

    def __call__(self, x: np.ndarray) -> float:
        if self.max_evaluations is not None and self.count >= self.max_evaluations:
            raise BudgetExhausted
        self.count += 1
        value = self.objective(x)
        if not math.isfinite(value):
            raise NonFiniteObjectiveError(x, value)
        return value

    @property
    def remaining(self):
        if self.max_evaluations is None:
            return None
        return self.max_evaluations - self.count


class BudgetExhausted(Exception):
    """Raised by :class:`Evaluator` when the evaluation budget is spent."""


def as_fitness_array(swarm: Sequence) -> np.ndarray:
    """Fitness values from a sequence of :class:`Squid` or plain numbers."""
    return np.array([getattr(s, "fitness", s) for s in swarm], dtype=float)
