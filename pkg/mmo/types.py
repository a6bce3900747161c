"""Shared data types for the optimizer library."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .errors import DimensionError, ParameterError

# A point in the D-dimensional search space: 1-D float64, read-only.
SolutionVector = np.ndarray


def _frozen_array(values: Any) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Bounds:
    """Box search domain; lower[d] <= upper[d] for every coordinate."""
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lower = _frozen_array(self.lower)
        upper = _frozen_array(self.upper)
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size == 0:
            raise DimensionError(
                f"bounds must be two 1-D vectors of equal length, got {lower.shape} and {upper.shape}")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ParameterError("bounds must be finite")
        if np.any(lower > upper):
            raise ParameterError("lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def box(cls, low: float, high: float, dimension: int) -> "Bounds":
        """Same interval [low, high] in every coordinate."""
        if dimension < 1:
            raise DimensionError(f"dimension must be positive, got {dimension}")
        return cls(np.full(dimension, low, dtype=np.float64),
                   np.full(dimension, high, dtype=np.float64))

    @property
    def dimension(self) -> int:
        return int(self.lower.size)

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower


@dataclass(frozen=True, eq=False)
class EvaluatedSolution:
    """A position together with its objective value (lower is better).

    +inf is allowed as the fitness of a point whose objective value was not
    finite; NaN is not.
    """
    position: SolutionVector
    fitness: float

    def __post_init__(self) -> None:
        position = _frozen_array(self.position)
        if position.ndim != 1:
            raise DimensionError(f"position must be 1-D, got shape {position.shape}")
        fitness = float(self.fitness)
        if math.isnan(fitness):
            raise ParameterError("fitness must not be NaN")
        object.__setattr__(self, "position", position)
        object.__setattr__(self, "fitness", fitness)

    @property
    def dimension(self) -> int:
        return int(self.position.size)


@dataclass(frozen=True, eq=False)
class Objective:
    """A deterministic black-box function to minimize over a box.

    When ``vectorized`` is set, ``function`` maps an (n, D) array to n
    values and single-point evaluation goes through the same code path, so
    a point always gets bit-identical fitness however it is evaluated.
    The function must be safe to call from several threads at once.
    """
    dimension: int
    function: Callable[[np.ndarray], Any]
    bounds: Bounds
    name: str = "objective"
    vectorized: bool = False

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise DimensionError(f"dimension must be positive, got {self.dimension}")
        if self.bounds.dimension != self.dimension:
            raise DimensionError(
                f"bounds have dimension {self.bounds.dimension}, objective has {self.dimension}")

    def evaluate(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.dimension,):
            raise DimensionError(f"expected shape ({self.dimension},), got {x.shape}")
        if self.vectorized:
            return float(np.asarray(self.function(x[np.newaxis, :]), dtype=np.float64)[0])
        return float(self.function(x))

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        if xs.ndim != 2 or xs.shape[1] != self.dimension:
            raise DimensionError(f"expected shape (n, {self.dimension}), got {xs.shape}")
        if self.vectorized:
            return np.asarray(self.function(xs), dtype=np.float64).reshape(len(xs))
        return np.fromiter((float(self.function(row)) for row in xs),
                           dtype=np.float64, count=len(xs))

    def __call__(self, x: np.ndarray) -> float:
        return self.evaluate(x)
