"""Differential evolution, DE/rand/1/bin with greedy selection.

For every target i: three distinct indices p, q, r ≠ i, mutant
x_p + F·(x_q − x_r), binomial crossover at rate C_r with one forced
dimension, and the trial replaces the target when f(trial) <= f(target).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from ..types import EvaluatedSolution
from .base import BaseOptimizer


@dataclass(frozen=True)
class DeParams:
    weight: float = 0.5       # differential weight F
    crossover: float = 0.9    # C_r


class DifferentialEvolution(BaseOptimizer):
    id = "de"
    evals_per_step = 1
    min_agents = 4

    @classmethod
    def default_params(cls) -> DeParams:
        return DeParams()

    def validate_params(self) -> None:
        p = self.params
        if not 0.0 <= p.crossover <= 1.0:
            raise ParameterError(f"crossover must lie in [0, 1], got {p.crossover}")
        if p.weight < 0:
            raise ParameterError(f"weight must be >= 0, got {p.weight}")

    def _setup(self, positions: np.ndarray) -> None:
        self.positions = positions
        self.fitness = self._evaluate(positions)
        self._offer_best(self.positions, self.fitness)

    def _donors(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        # Random keys with the diagonal excluded: the three smallest keys of
        # row i are three distinct indices, none equal to i.
        n = self.n
        keys = self.rng.random((n, n))
        keys[np.arange(n), np.arange(n)] = np.inf
        idx = np.argsort(keys, axis=1, kind="stable")[:, :3]
        return idx[:, 0], idx[:, 1], idx[:, 2]

    def _step(self) -> None:
        p = self.params
        x = self.positions
        n, d = x.shape

        ip, iq, ir = self._donors()
        mutant = x[ip] + p.weight * (x[iq] - x[ir])

        cross = self.rng.random((n, d)) <= p.crossover
        forced = self.rng.integers(d, size=n)
        cross[np.arange(n), forced] = True
        trial = self._clamp(np.where(cross, mutant, x))

        trial_fitness = self._evaluate(trial)
        keep = trial_fitness <= self.fitness
        x[keep] = trial[keep]
        self.fitness[keep] = trial_fitness[keep]
        self._offer_best(x, self.fitness)

    def _inject(self, team_best: EvaluatedSolution) -> None:
        # DE never reads g*, so the team best enters as a population member
        # in place of the current worst.
        worst = int(np.argmax(self.fitness))
        self.positions[worst] = team_best.position
        self.fitness[worst] = team_best.fitness
        if team_best.fitness < self._g_best.fitness:
            self._g_best = team_best
