"""Bat algorithm, with Gaussian or Lévy local search around g*.

Per bat and generation:

    f_i = f_min + β·(f_max − f_min),      β ~ U[0, 1]
    v_i ← v_i + (x_i − g*)·f_i
    x'  = x_i + v_i                         global move
    x'  = g* + σ·ε·Ā                        local move, with probability r_i

ε is N(0, 1) per dimension (``levy_mode``: a Lévy draw) and Ā is the mean
loudness. The candidate is accepted when it improves on the bat's own
fitness and a U[0, 1] draw falls below its loudness; acceptance decays
A_i ← α·A_i and sets r_i ← r_i⁰·(1 − e^(−γt)). Every evaluated candidate
may become g*. One evaluation per bat per generation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import DEFAULT_LAMBDA, check_lambda
from ..errors import ParameterError
from .base import BaseOptimizer


@dataclass(frozen=True)
class BatParams:
    f_min: float = 0.0
    f_max: float = 2.0
    alpha: float = 0.9          # loudness decay, in (0, 1)
    gamma: float = 0.9          # pulse-rate growth, > 0
    sigma: float = 0.1          # local-search scale
    loudness: float = 1.0       # A⁰
    pulse_rate: float = 0.5     # r⁰
    velocity_cap: float = 0.2   # fraction of the domain width
    levy_mode: bool = False
    lam: float = DEFAULT_LAMBDA


class Bat(BaseOptimizer):
    id = "bat"
    evals_per_step = 1

    @classmethod
    def default_params(cls) -> BatParams:
        return BatParams()

    def validate_params(self) -> None:
        p = self.params
        if not 0.0 < p.alpha < 1.0:
            raise ParameterError(f"alpha must lie in (0, 1), got {p.alpha}")
        if p.gamma <= 0:
            raise ParameterError(f"gamma must be > 0, got {p.gamma}")
        if p.f_min > p.f_max:
            raise ParameterError(f"f_min {p.f_min} exceeds f_max {p.f_max}")
        if not 0.0 <= p.pulse_rate <= 1.0:
            raise ParameterError(f"pulse_rate must lie in [0, 1], got {p.pulse_rate}")
        if p.loudness < 0 or p.velocity_cap < 0:
            raise ParameterError("loudness and velocity_cap must be >= 0")
        check_lambda(p.lam)

    def _setup(self, positions: np.ndarray) -> None:
        p = self.params
        self.positions = positions
        self.velocities = np.zeros_like(positions)
        self.fitness = self._evaluate(positions)
        self.frequencies = np.zeros(self.n)
        self.loudness = np.full(self.n, p.loudness)
        self.initial_pulse_rate = np.full(self.n, p.pulse_rate)
        self.pulse_rate = self.initial_pulse_rate.copy()
        self._offer_best(self.positions, self.fitness)

    def _step(self) -> None:
        p = self.params
        x = self.positions
        n, d = x.shape
        g = self._g_best.position

        beta = self.rng.random(n)
        self.frequencies = p.f_min + beta * (p.f_max - p.f_min)
        vmax = p.velocity_cap * self.objective.bounds.width
        v = np.clip(self.velocities + (x - g) * self.frequencies[:, None], -vmax, vmax)
        moved = self._clamp(x + v)

        local = self.rng.random(n) < self.pulse_rate
        if p.levy_mode:
            noise = self._levy((n, d), p.lam)
        else:
            noise = self.rng.standard_normal((n, d))
        near_best = self._clamp(g + p.sigma * noise * self.loudness.mean())

        candidates = np.where(local[:, None], near_best, moved)
        cand_fitness = self._evaluate(candidates)

        accept = (cand_fitness < self.fitness) & (self.rng.random(n) < self.loudness)
        x[accept] = candidates[accept]
        self.fitness[accept] = cand_fitness[accept]
        self.loudness[accept] *= p.alpha
        self.pulse_rate[accept] = (self.initial_pulse_rate[accept]
                                   * (1.0 - np.exp(-p.gamma * self.generation)))
        self.velocities = v
        self._offer_best(candidates, cand_fitness)


class LevyBat(Bat):
    """Bat algorithm whose local search uses Lévy steps."""

    id = "batlevy"

    @classmethod
    def default_params(cls) -> BatParams:
        return BatParams(levy_mode=True)
