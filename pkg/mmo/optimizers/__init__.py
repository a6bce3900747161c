"""Optimizer registry: decorator-based, explicit imports.

Each optimizer class is imported and registered explicitly under its stable
CLI id. ``OPTIMIZER_IDS`` is the canonical team order; an optimizer's
position in it is also the index of its random sub-stream.
"""

from __future__ import annotations

from typing import Any, Optional

from ..errors import ConfigError
from .base import BaseOptimizer

# Global registry: optimizer id -> BaseOptimizer subclass
OPTIMIZER_REGISTRY: dict[str, type[BaseOptimizer]] = {}


def register_optimizer(cls: type[BaseOptimizer]) -> type[BaseOptimizer]:
    """Class decorator that registers a BaseOptimizer subclass by its id."""
    if cls.id in OPTIMIZER_REGISTRY:
        raise ConfigError(f"optimizer id '{cls.id}' registered twice")
    OPTIMIZER_REGISTRY[cls.id] = cls
    return cls


def get_optimizer_class(optimizer_id: str) -> type[BaseOptimizer]:
    try:
        return OPTIMIZER_REGISTRY[optimizer_id]
    except KeyError:
        raise ConfigError(
            f"unknown optimizer '{optimizer_id}'. Available: {', '.join(OPTIMIZER_IDS)}"
        ) from None


def create_optimizer(optimizer_id: str,
                     overrides: Optional[dict[str, Any]] = None) -> BaseOptimizer:
    """Fresh, uninitialized optimizer with default hyperparameters plus overrides."""
    return get_optimizer_class(optimizer_id)(overrides=overrides)


def stream_index(optimizer_id: str) -> int:
    """Index of the optimizer's random sub-stream under a master seed."""
    get_optimizer_class(optimizer_id)
    return OPTIMIZER_IDS.index(optimizer_id)


# ── Explicit registration ─────────────────────────────────────
# Registration order is the canonical team order.

from .pso import ParticleSwarm, LevyParticleSwarm
from .de import DifferentialEvolution
from .bat import Bat, LevyBat
from .cuckoo import CuckooSearch
from .pollination import FlowerPollination

register_optimizer(ParticleSwarm)
register_optimizer(LevyParticleSwarm)
register_optimizer(DifferentialEvolution)
register_optimizer(Bat)
register_optimizer(LevyBat)
register_optimizer(CuckooSearch)
register_optimizer(FlowerPollination)

OPTIMIZER_IDS: tuple[str, ...] = tuple(OPTIMIZER_REGISTRY)

__all__ = [
    "OPTIMIZER_REGISTRY",
    "OPTIMIZER_IDS",
    "BaseOptimizer",
    "register_optimizer",
    "get_optimizer_class",
    "create_optimizer",
    "stream_index",
]
