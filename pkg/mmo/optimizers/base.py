"""Base class for the team's constituent optimizers.

Each optimizer declares its id, its hyperparameter dataclass and how many
objective evaluations one generation costs, then implements ``_setup()``
(initial population) and ``_step()`` (one generation). The orchestrator
only talks to the public surface: initialize, step, global_best, inject.

Every subclass keeps its current agents in ``self.positions``, an (n, D)
array that stays inside the bounds.
"""

from __future__ import annotations

import dataclasses
import logging
from abc import ABC, abstractmethod
from typing import Any, ClassVar, Optional

import numpy as np

from ..core import RngStream, levy_limit, levy_steps, uniform_population
from ..errors import ConfigError, DimensionError
from ..types import EvaluatedSolution, Objective

log = logging.getLogger("optimizers")


def apply_overrides(params: Any, overrides: Optional[dict[str, Any]]) -> Any:
    """Return a copy of a params dataclass with ``overrides`` applied."""
    if not overrides:
        return params
    known = {f.name for f in dataclasses.fields(params)}
    unknown = sorted(set(overrides) - known)
    if unknown:
        raise ConfigError(
            f"unknown hyperparameter(s) {', '.join(unknown)} for {type(params).__name__}; "
            f"known: {', '.join(sorted(known))}")
    return dataclasses.replace(params, **overrides)


class BaseOptimizer(ABC):
    """Abstract population-based optimizer with a single stepping interface."""

    id: ClassVar[str] = ""
    # One generation evaluates the objective at most evals_per_step * n times.
    evals_per_step: ClassVar[int] = 1
    min_agents: ClassVar[int] = 1

    def __init__(self, params: Any = None, overrides: Optional[dict[str, Any]] = None) -> None:
        self.params = apply_overrides(params if params is not None else self.default_params(),
                                      overrides)
        self.validate_params()
        self.n = 0
        self.objective: Optional[Objective] = None
        self.rng: Optional[RngStream] = None
        self.generation = 0
        self.evaluations = 0
        self._g_best: Optional[EvaluatedSolution] = None
        self._warned_nonfinite = False

    # ── Hyperparameters ───────────────────────────────────────

    @classmethod
    @abstractmethod
    def default_params(cls) -> Any:
        """Fresh hyperparameter dataclass with this optimizer's defaults."""

    def validate_params(self) -> None:
        """Raise ParameterError for out-of-range hyperparameters."""

    # ── Public API ────────────────────────────────────────────

    def initialize(self, n: int, objective: Objective, rng: RngStream) -> None:
        """Draw n uniform agents inside the objective's bounds and evaluate them."""
        if n < self.min_agents:
            raise ConfigError(f"{self.id} needs at least {self.min_agents} agents, got {n}")
        self.n = int(n)
        self.objective = objective
        self.rng = rng
        self.generation = 0
        self.evaluations = 0
        self._g_best = None
        self._setup(uniform_population(objective.bounds, self.n, rng))
        log.debug("%s initialized: n=%d D=%d best=%.6g",
                  self.id, self.n, objective.dimension, self._g_best.fitness)

    def step(self) -> None:
        """Advance exactly one generation."""
        self._require_initialized()
        self.generation += 1
        self._step()

    def global_best(self) -> EvaluatedSolution:
        self._require_initialized()
        return self._g_best

    def inject(self, team_best: EvaluatedSolution) -> None:
        """Receive the team best from the master."""
        self._require_initialized()
        if team_best.dimension != self.objective.dimension:
            raise DimensionError(
                f"team best has dimension {team_best.dimension}, "
                f"{self.id} works in {self.objective.dimension}")
        self._inject(team_best)

    @property
    def initialized(self) -> bool:
        return self._g_best is not None

    # ── Subclass hooks ────────────────────────────────────────

    @abstractmethod
    def _setup(self, positions: np.ndarray) -> None:
        """Build the initial state from an (n, D) array of positions."""

    @abstractmethod
    def _step(self) -> None:
        """One generation of the algorithm."""

    def _inject(self, team_best: EvaluatedSolution) -> None:
        # Unconditional: the team best may be worse than our own g*.
        self._g_best = team_best

    # ── Helpers ───────────────────────────────────────────────

    def _require_initialized(self) -> None:
        if self._g_best is None:
            raise ConfigError(f"{self.id} used before initialize()")

    def _evaluate(self, xs: np.ndarray) -> np.ndarray:
        fitness = self.objective.evaluate_many(xs)
        self.evaluations += len(xs)
        bad = ~np.isfinite(fitness)
        if bad.any():
            if not self._warned_nonfinite:
                log.warning("%s: %d non-finite objective value(s) treated as +inf",
                            self.id, int(bad.sum()))
                self._warned_nonfinite = True
            fitness[bad] = np.inf
        return fitness

    def _clamp(self, xs: np.ndarray) -> np.ndarray:
        bounds = self.objective.bounds
        return np.clip(xs, bounds.lower, bounds.upper)

    def _levy(self, size: tuple[int, ...], lam: float) -> np.ndarray:
        return levy_steps(lam, self.rng, size, limit=levy_limit(self.objective.bounds))

    def _offer_best(self, xs: np.ndarray, fitness: np.ndarray) -> None:
        """Replace g* by the best of ``xs`` only if it is strictly better."""
        # argmin returns the first index on ties
        i = int(np.argmin(fitness))
        if self._g_best is None or fitness[i] < self._g_best.fitness:
            self._g_best = EvaluatedSolution(xs[i], fitness[i])

    def _replace_random_member(self, positions: np.ndarray, fitness: np.ndarray,
                               team_best: EvaluatedSolution) -> None:
        """Overwrite one uniformly chosen agent with the team best."""
        i = int(self.rng.integers(self.n))
        positions[i] = team_best.position
        fitness[i] = team_best.fitness
        if team_best.fitness < self._g_best.fitness:
            self._g_best = team_best
