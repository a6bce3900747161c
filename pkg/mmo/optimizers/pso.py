"""Particle swarm, with a uniform or a Lévy-scaled pull toward g*.

    v ← v + α·ε1·(g* − x) + β·ε2·(x* − x)        (pso)
    v ← v + α·L(λ)·(g* − x) + β·ε2·(x* − x)      (psolevy)
    x ← x + v

ε1, ε2 are fresh U[0, 1] draws per particle and dimension. Velocities are
capped at ``velocity_cap`` domain widths per dimension and positions are
clamped to the bounds. One evaluation per particle per generation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import DEFAULT_LAMBDA, check_lambda
from ..errors import ParameterError
from .base import BaseOptimizer


@dataclass(frozen=True)
class PsoParams:
    alpha: float = 2.0          # pull toward the global best
    beta: float = 2.0           # pull toward the personal best
    velocity_cap: float = 0.2   # fraction of the domain width
    levy_mode: bool = False
    lam: float = DEFAULT_LAMBDA


class ParticleSwarm(BaseOptimizer):
    """Classic PSO without inertia weight."""

    id = "pso"
    evals_per_step = 1

    @classmethod
    def default_params(cls) -> PsoParams:
        return PsoParams()

    def validate_params(self) -> None:
        p = self.params
        if p.velocity_cap < 0:
            raise ParameterError(f"velocity_cap must be >= 0, got {p.velocity_cap}")
        check_lambda(p.lam)

    def _setup(self, positions: np.ndarray) -> None:
        self.positions = positions
        self.velocities = np.zeros_like(positions)
        fitness = self._evaluate(positions)
        self.personal_best = positions.copy()
        self.personal_fitness = fitness
        self._offer_best(self.personal_best, self.personal_fitness)

    def _step(self) -> None:
        p = self.params
        x, v = self.positions, self.velocities
        shape = x.shape
        g = self._g_best.position

        if p.levy_mode:
            pull = self._levy(shape, p.lam)
        else:
            pull = self.rng.random(shape)
        eps2 = self.rng.random(shape)

        v = v + p.alpha * pull * (g - x) + p.beta * eps2 * (self.personal_best - x)
        vmax = p.velocity_cap * self.objective.bounds.width
        v = np.clip(v, -vmax, vmax)
        x = self._clamp(x + v)
        fitness = self._evaluate(x)

        improved = fitness < self.personal_fitness
        self.personal_best[improved] = x[improved]
        self.personal_fitness[improved] = fitness[improved]
        self.positions, self.velocities = x, v
        self._offer_best(self.personal_best, self.personal_fitness)


class LevyParticleSwarm(ParticleSwarm):
    """PSO whose global-best pull is scaled by a Lévy draw."""

    id = "psolevy"

    @classmethod
    def default_params(cls) -> PsoParams:
        return PsoParams(levy_mode=True)
