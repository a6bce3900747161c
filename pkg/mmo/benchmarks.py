"""Benchmark objectives: Rosenbrock, Griewank and Zakharov.

Each function accepts one point (shape (D,)) or a batch (shape (n, D)) and
reduces over the last axis. Indices in the Griewank cosine product and the
Zakharov weighted sum are 1-based. All three have global minimum 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, DimensionError
from .types import Bounds, Objective


def rosenbrock(x: np.ndarray):
    """Σ_{i<D} 100(x_{i+1} − x_i²)² + (x_i − 1)²; minimum 0 at (1, …, 1)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] < 2:
        raise DimensionError(f"rosenbrock needs D >= 2, got D={x.shape[-1]}")
    head, tail = x[..., :-1], x[..., 1:]
    value = np.sum(100.0 * (tail - head ** 2) ** 2 + (head - 1.0) ** 2, axis=-1)
    return value if value.ndim else float(value)


def griewank(x: np.ndarray):
    """Σ x_i²/4000 − Π cos(x_i/√i) + 1; minimum 0 at the origin."""
    x = np.asarray(x, dtype=np.float64)
    i = np.arange(1, x.shape[-1] + 1, dtype=np.float64)
    value = (np.sum(x ** 2, axis=-1) / 4000.0
             - np.prod(np.cos(x / np.sqrt(i)), axis=-1) + 1.0)
    return value if value.ndim else float(value)


def zakharov(x: np.ndarray):
    """Σ x_i² + (Σ 0.5·i·x_i)² + (Σ 0.5·i·x_i)⁴; minimum 0 at the origin."""
    x = np.asarray(x, dtype=np.float64)
    i = np.arange(1, x.shape[-1] + 1, dtype=np.float64)
    s = np.sum(0.5 * i * x, axis=-1)
    value = np.sum(x ** 2, axis=-1) + s ** 2 + s ** 4
    return value if value.ndim else float(value)


@dataclass(frozen=True)
class _Entry:
    function: Callable[[np.ndarray], object]
    low: float
    high: float
    minimizer: float
    min_dimension: int = 1


BENCHMARKS: dict[str, _Entry] = {
    "rosenbrock": _Entry(rosenbrock, -5.0, 10.0, minimizer=1.0, min_dimension=2),
    "griewank": _Entry(griewank, -600.0, 600.0, minimizer=0.0),
    "zakharov": _Entry(zakharov, -5.0, 10.0, minimizer=0.0),
}


def _entry(name: str) -> _Entry:
    try:
        return BENCHMARKS[name]
    except KeyError:
        available = ", ".join(BENCHMARKS)
        raise ConfigError(f"unknown benchmark '{name}'. Available: {available}") from None


@dataclass(frozen=True, eq=False)
class BenchmarkSpec:
    """A named benchmark at a given dimension, with optional custom bounds."""
    name: str
    dimension: int
    bounds: Optional[Bounds] = field(default=None)

    def __post_init__(self) -> None:
        entry = _entry(self.name)
        if self.dimension < entry.min_dimension:
            raise DimensionError(
                f"{self.name} needs D >= {entry.min_dimension}, got D={self.dimension}")
        if self.bounds is None:
            object.__setattr__(self, "bounds",
                               Bounds.box(entry.low, entry.high, self.dimension))
        elif self.bounds.dimension != self.dimension:
            raise DimensionError(
                f"bounds have dimension {self.bounds.dimension}, expected {self.dimension}")

    def objective(self) -> Objective:
        entry = _entry(self.name)
        return Objective(dimension=self.dimension, function=entry.function,
                         bounds=self.bounds, name=f"{self.dimension}D {self.name}",
                         vectorized=True)

    def minimizer(self) -> np.ndarray:
        return np.full(self.dimension, _entry(self.name).minimizer, dtype=np.float64)


def make_benchmark(name: str, dimension: int, low: Optional[float] = None,
                   high: Optional[float] = None) -> Objective:
    """Objective for a named benchmark; ``low``/``high`` override the default box."""
    entry = _entry(name)
    bounds = None
    if low is not None or high is not None:
        bounds = Bounds.box(entry.low if low is None else low,
                            entry.high if high is None else high, dimension)
    return BenchmarkSpec(name, dimension, bounds).objective()
