"""Communication schemes: fuse the team's global bests into one team best.

Every scheme takes a ``TeamSnapshot`` (one evaluated global best per
optimizer) and returns a position. The weighting schemes rank the bests by
ascending fitness, weight them by rank and normalize the weights to sum 1,
so the result is a convex combination of the snapshot positions.

``apply_scheme`` is what the master loop calls: it clamps the aggregate to
the bounds and evaluates it once; ``best`` reuses the stored fitness and
costs no evaluation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Union

import numpy as np

from .core import clamp_to_bounds
from .errors import ConfigError, DimensionError
from .types import EvaluatedSolution, Objective, SolutionVector

log = logging.getLogger("communication")

# Decay base of the exponential rank weights.
EXPONENTIAL_ALPHA = 0.2


class SchemeId(str, Enum):
    AVERAGING = "averaging"
    RANK = "rank"
    EXPONENTIAL = "exponential"
    BEST = "best"
    META = "meta"

    @classmethod
    def parse(cls, name: Union[str, "SchemeId"]) -> "SchemeId":
        """Accept a short CLI name, a long name, or a SchemeId."""
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        key = SCHEME_ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            available = ", ".join(s.value for s in cls)
            raise ConfigError(f"unknown scheme '{name}'. Available: {available}") from None

    @property
    def evaluates(self) -> bool:
        """Whether applying the scheme costs one objective evaluation."""
        return self is not SchemeId.BEST


SCHEME_ALIASES: dict[str, str] = {
    "rank_weighted": "rank",
    "exponential_weighted": "exponential",
    "best_rank": "best",
    "meta_weighted": "meta",
}


@dataclass(frozen=True, eq=False)
class TeamSnapshot:
    """The K optimizers' global bests, aligned with their ids."""
    bests: tuple[EvaluatedSolution, ...]
    ids: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        bests = tuple(self.bests)
        if not bests:
            raise ConfigError("team snapshot is empty")
        ids = tuple(self.ids) or tuple(str(i) for i in range(len(bests)))
        if len(ids) != len(bests):
            raise ConfigError(f"{len(ids)} ids for {len(bests)} bests")
        dims = {b.dimension for b in bests}
        if len(dims) != 1:
            raise DimensionError(f"snapshot mixes dimensions {sorted(dims)}")
        object.__setattr__(self, "bests", bests)
        object.__setattr__(self, "ids", ids)

    @property
    def size(self) -> int:
        return len(self.bests)

    def positions(self) -> np.ndarray:
        return np.stack([b.position for b in self.bests])

    def fitnesses(self) -> np.ndarray:
        return np.array([b.fitness for b in self.bests], dtype=np.float64)

    def ranked_positions(self) -> np.ndarray:
        """Positions sorted by ascending fitness; ties keep snapshot order."""
        order = np.argsort(self.fitnesses(), kind="stable")
        return self.positions()[order]


# ── Weights ───────────────────────────────────────────────────

def rank_values(k: int) -> np.ndarray:
    """W* = [K, K−1, …, 1]; the best-ranked entry gets K."""
    if k < 1:
        raise ConfigError(f"need at least one rank, got {k}")
    return np.arange(k, 0, -1, dtype=np.float64)


def rank_weights(k: int) -> np.ndarray:
    w = rank_values(k)
    return w / w.sum()


def exponential_weights(k: int, alpha: float = EXPONENTIAL_ALPHA,
                        normalize: bool = True) -> np.ndarray:
    """W*[i]·α^(W*[1] − W*[i]), optionally normalized to sum 1."""
    w = rank_values(k)
    raw = w * alpha ** (w[0] - w)
    return raw / raw.sum() if normalize else raw


# ── Schemes ───────────────────────────────────────────────────

def averaging(snapshot: TeamSnapshot) -> SolutionVector:
    """Coordinate-wise mean of the K best positions."""
    # Summed in rank order, so reordering the snapshot cannot change the bits.
    return snapshot.ranked_positions().mean(axis=0)


def rank_weighted(snapshot: TeamSnapshot) -> SolutionVector:
    return rank_weights(snapshot.size) @ snapshot.ranked_positions()


def exponential_weighted(snapshot: TeamSnapshot) -> SolutionVector:
    return exponential_weights(snapshot.size) @ snapshot.ranked_positions()


def best_rank(snapshot: TeamSnapshot) -> SolutionVector:
    """Position of the lowest-fitness entry; the lowest index wins ties."""
    i = int(np.argmin(snapshot.fitnesses()))
    return np.array(snapshot.bests[i].position)


def meta_weighted(snapshot: TeamSnapshot) -> SolutionVector:
    """Equal-weight mean of the other four schemes' outputs."""
    parts = [averaging(snapshot), rank_weighted(snapshot),
             exponential_weighted(snapshot), best_rank(snapshot)]
    return np.mean(np.stack(parts), axis=0)


SCHEMES: dict[SchemeId, Callable[[TeamSnapshot], SolutionVector]] = {
    SchemeId.AVERAGING: averaging,
    SchemeId.RANK: rank_weighted,
    SchemeId.EXPONENTIAL: exponential_weighted,
    SchemeId.BEST: best_rank,
    SchemeId.META: meta_weighted,
}


def aggregate(scheme: Union[str, SchemeId], snapshot: TeamSnapshot) -> SolutionVector:
    return SCHEMES[SchemeId.parse(scheme)](snapshot)


def apply_scheme(scheme: Union[str, SchemeId], snapshot: TeamSnapshot,
                 objective: Objective) -> EvaluatedSolution:
    """Fuse the snapshot into an evaluated team best."""
    scheme = SchemeId.parse(scheme)
    if snapshot.bests[0].dimension != objective.dimension:
        raise DimensionError(
            f"snapshot has dimension {snapshot.bests[0].dimension}, "
            f"objective has {objective.dimension}")

    if scheme is SchemeId.BEST:
        i = int(np.argmin(snapshot.fitnesses()))
        team_best = snapshot.bests[i]
        log.debug("best: %s wins with %.6g", snapshot.ids[i], team_best.fitness)
        return team_best

    position = clamp_to_bounds(aggregate(scheme, snapshot), objective.bounds)
    fitness = objective.evaluate(position)
    if not math.isfinite(fitness):
        log.warning("%s: non-finite aggregate fitness treated as +inf", scheme.value)
        fitness = math.inf
    log.debug("%s: aggregate fitness %.6g (team min %.6g)",
              scheme.value, fitness, float(snapshot.fitnesses().min()))
    return EvaluatedSolution(position, fitness)
