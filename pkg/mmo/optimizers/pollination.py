"""Flower pollination.

With probability p a flower pollinates globally, x + γ·L(λ)·(g* − x);
otherwise locally, x + ε·(x_j − x_k) with ε ~ U[0, 1] and two distinct
random flowers j, k. A move is kept when it is at least as good.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import DEFAULT_LAMBDA, check_lambda
from ..errors import ParameterError
from ..types import EvaluatedSolution
from .base import BaseOptimizer


@dataclass(frozen=True)
class PollinationParams:
    switch_prob: float = 0.8    # p, chance of a global move
    gamma: float = 0.1
    lam: float = DEFAULT_LAMBDA


class FlowerPollination(BaseOptimizer):
    id = "fp"
    evals_per_step = 1
    min_agents = 2

    @classmethod
    def default_params(cls) -> PollinationParams:
        return PollinationParams()

    def validate_params(self) -> None:
        p = self.params
        if not 0.0 <= p.switch_prob <= 1.0:
            raise ParameterError(f"switch_prob must lie in [0, 1], got {p.switch_prob}")
        check_lambda(p.lam)

    def _setup(self, positions: np.ndarray) -> None:
        self.positions = positions
        self.fitness = self._evaluate(positions)
        self._offer_best(self.positions, self.fitness)

    def _step(self) -> None:
        p = self.params
        x = self.positions
        n, d = x.shape
        g = self._g_best.position

        is_global = self.rng.random(n) < p.switch_prob
        global_move = x + p.gamma * self._levy((n, d), p.lam) * (g - x)

        j = self.rng.integers(n, size=n)
        k = (j + 1 + self.rng.integers(n - 1, size=n)) % n
        eps = self.rng.random((n, 1))
        local_move = x + eps * (x[j] - x[k])

        candidates = self._clamp(np.where(is_global[:, None], global_move, local_move))
        cand_fitness = self._evaluate(candidates)
        keep = cand_fitness <= self.fitness
        x[keep] = candidates[keep]
        self.fitness[keep] = cand_fitness[keep]
        self._offer_best(x, self.fitness)

    def _inject(self, team_best: EvaluatedSolution) -> None:
        self._replace_random_member(self.positions, self.fitness, team_best)
