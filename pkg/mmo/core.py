"""Numeric building blocks shared by every optimizer.

Random streams are numpy ``Generator`` objects over PCG64. A run has one
master seed; each optimizer draws from its own sub-stream derived from the
master seed by index, so stepping optimizers in parallel cannot change
results.

Lévy steps use Mantegna's construction: step = u / |v|^(1/λ) with
u ~ N(0, σ_u²), v ~ N(0, 1), which has a symmetric tail of index λ.
"""

from __future__ import annotations

import functools
import math
from typing import Optional, Union

import numpy as np
from scipy.special import gamma

from .errors import DimensionError, ParameterError
from .types import Bounds, SolutionVector


RngStream = np.random.Generator

DEFAULT_LAMBDA = 1.5

# Lévy draws are truncated to this many domain widths per coordinate.
LEVY_TRUNCATION_WIDTHS = 10.0

_SEED_LIMIT = 2 ** 64


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < _SEED_LIMIT:
        raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def make_stream(seed: int) -> RngStream:
    """A fresh PCG64 stream for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(_check_seed(seed)))


def derive_stream(master_seed: int, index: int) -> RngStream:
    """Sub-stream ``index`` of a master seed; independent of every other index."""
    seq = np.random.SeedSequence(_check_seed(master_seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(seq))


def check_lambda(lam: float) -> float:
    lam = float(lam)
    if not 1.0 < lam <= 2.0:
        raise ParameterError(f"Lévy exponent must lie in (1, 2], got {lam}")
    return lam


@functools.lru_cache(maxsize=32)
def levy_sigma(lam: float) -> float:
    """Scale of the numerator Gaussian in Mantegna's construction."""
    lam = check_lambda(lam)
    num = gamma(1.0 + lam) * math.sin(math.pi * lam / 2.0)
    den = gamma((1.0 + lam) / 2.0) * lam * 2.0 ** ((lam - 1.0) / 2.0)
    return float((num / den) ** (1.0 / lam))


def levy_steps(lam: float, rng: RngStream, size: Union[int, tuple[int, ...]],
               limit: Optional[np.ndarray] = None) -> np.ndarray:
    """Array of Lévy draws; when ``limit`` is given, |step| <= limit elementwise."""
    sigma = levy_sigma(lam)
    u = rng.normal(0.0, sigma, size=size)
    v = rng.normal(0.0, 1.0, size=size)
    steps = u / np.abs(v) ** (1.0 / lam)
    if limit is not None:
        steps = np.clip(steps, -limit, limit)
    return steps


def levy_sample(lam: float, rng: RngStream) -> float:
    """One symmetric heavy-tailed draw with tail exponent ``lam``."""
    return float(levy_steps(lam, rng, 1)[0])


def levy_limit(bounds: Bounds) -> np.ndarray:
    """Per-coordinate truncation for Lévy draws inside ``bounds``."""
    return LEVY_TRUNCATION_WIDTHS * bounds.width


def clamp_to_bounds(x: np.ndarray, bounds: Bounds) -> SolutionVector:
    """Project ``x`` coordinate-wise into the box. Idempotent."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (bounds.dimension,):
        raise DimensionError(f"expected shape ({bounds.dimension},), got {x.shape}")
    out = np.clip(x, bounds.lower, bounds.upper)
    out.setflags(write=False)
    return out


def uniform_random_solution(bounds: Bounds, rng: RngStream) -> SolutionVector:
    """Each coordinate uniform on [lower[d], upper[d]]."""
    x = rng.uniform(bounds.lower, bounds.upper)
    x.setflags(write=False)
    return x


def uniform_population(bounds: Bounds, n: int, rng: RngStream) -> np.ndarray:
    """(n, D) array of independent uniform solutions."""
    return rng.uniform(bounds.lower, bounds.upper, size=(n, bounds.dimension))
