"""Cuckoo search.

A generation has two phases, each costing one evaluation per nest:

1. Lévy flight. Every nest lays a cuckoo at x_i + α·L(λ), α being
   ``step_scale`` domain widths. The cuckoo takes over the nest it was laid
   from if it is at least as good; with ``random_nest`` it challenges a
   uniformly chosen nest instead.
2. Abandonment. The ⌊p_a·n⌋ worst nests are rebuilt by the biased walk
   x_i + s·H(p_a − ε)⊗(x_j − x_k), with j and k two random permutations of
   the population and s ~ U[0, 1]·``walk_scale``.

g* is refreshed from the surviving nests at the end of the generation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import DEFAULT_LAMBDA, check_lambda
from ..errors import ParameterError
from ..types import EvaluatedSolution
from .base import BaseOptimizer


@dataclass(frozen=True)
class CuckooParams:
    discovery: float = 0.25     # p_a, fraction of nests abandoned
    step_scale: float = 0.01    # α, in domain widths
    walk_scale: float = 1.0
    lam: float = DEFAULT_LAMBDA
    random_nest: bool = False


class CuckooSearch(BaseOptimizer):
    id = "cs"
    evals_per_step = 2

    @classmethod
    def default_params(cls) -> CuckooParams:
        return CuckooParams()

    def validate_params(self) -> None:
        p = self.params
        if not 0.0 <= p.discovery < 1.0:
            raise ParameterError(f"discovery must lie in [0, 1), got {p.discovery}")
        if p.step_scale < 0 or p.walk_scale < 0:
            raise ParameterError("step_scale and walk_scale must be >= 0")
        check_lambda(p.lam)

    def _setup(self, positions: np.ndarray) -> None:
        self.positions = positions
        self.fitness = self._evaluate(positions)
        self._offer_best(self.positions, self.fitness)

    def abandon_count(self) -> int:
        return math.floor(self.params.discovery * self.n)

    def _step(self) -> None:
        self._lay_eggs()
        self._abandon()
        self._offer_best(self.positions, self.fitness)

    def _lay_eggs(self) -> None:
        p = self.params
        x = self.positions
        alpha = p.step_scale * self.objective.bounds.width
        cuckoos = self._clamp(x + alpha * self._levy(x.shape, p.lam))
        cuckoo_fitness = self._evaluate(cuckoos)

        if not p.random_nest:
            keep = cuckoo_fitness <= self.fitness
            x[keep] = cuckoos[keep]
            self.fitness[keep] = cuckoo_fitness[keep]
            return

        # Sequential: two cuckoos may land in the same nest.
        targets = self.rng.integers(self.n, size=self.n)
        for i, j in enumerate(targets):
            if cuckoo_fitness[i] <= self.fitness[j]:
                x[j] = cuckoos[i]
                self.fitness[j] = cuckoo_fitness[i]

    def _abandon(self) -> None:
        k = self.abandon_count()
        if k == 0:
            return
        p = self.params
        x = self.positions
        n, d = x.shape

        worst = np.argsort(-self.fitness, kind="stable")[:k]
        j = self.rng.permutation(n)[:k]
        other = self.rng.permutation(n)[:k]
        s = self.rng.random((k, 1)) * p.walk_scale
        mask = self.rng.random((k, d)) < p.discovery

        rebuilt = self._clamp(x[worst] + s * mask * (x[j] - x[other]))
        x[worst] = rebuilt
        self.fitness[worst] = self._evaluate(rebuilt)

    def _inject(self, team_best: EvaluatedSolution) -> None:
        self._replace_random_member(self.positions, self.fitness, team_best)
