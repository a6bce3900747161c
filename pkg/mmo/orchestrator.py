"""Master loop: run a team of optimizers and share their bests periodically.

Each generation steps every roster member once, in parallel on a thread
pool, then folds every member's g* into an all-time archive. On generations
that are multiples of the frequency γ, the master builds a snapshot of the
team's bests, fuses it with the configured scheme and injects the result
into every member. The archive is what the run reports: an averaging scheme
may move every member's g* to a point worse than the archive.

Each optimizer draws from its own random sub-stream, indexed by its
position in the canonical optimizer order, so results do not depend on the
thread count or on which other optimizers are in the roster.
"""

from __future__ import annotations

import asyncio
import dataclasses
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np
from scipy import stats

from .benchmarks import make_benchmark
from .communication import SchemeId, TeamSnapshot, apply_scheme
from .core import derive_stream
from .errors import ConfigError
from .optimizers import OPTIMIZER_IDS, BaseOptimizer, create_optimizer, stream_index
from .types import EvaluatedSolution, Objective

log = logging.getLogger("orchestrator")

# ── Type aliases ──────────────────────────────────────────────

GenerationCallback = Callable[[int, float], None]
BroadcastCallback = Callable[[int, EvaluatedSolution], None]

DEFAULT_TRIALS = 10


# ── Config / result dataclasses ───────────────────────────────

@dataclass
class MmoConfig:
    """Configuration for one MMO run. No pydantic dependency."""

    roster: tuple[str, ...] = OPTIMIZER_IDS
    agents: int = 100                       # n, same for every member
    scheme: Union[SchemeId, str] = SchemeId.RANK
    frequency: int = 10                     # γ; γ > generations never communicates
    generations: int = 2000                 # G
    master_seed: int = 0
    overrides: dict[str, dict[str, Any]] = field(default_factory=dict)
    threads: int = 0                        # 0 = one per roster member
    stop_fitness: Optional[float] = None
    on_generation: Optional[GenerationCallback] = None
    on_broadcast: Optional[BroadcastCallback] = None

    def __post_init__(self) -> None:
        if isinstance(self.roster, str):
            self.roster = (self.roster,)
        self.roster = tuple(self.roster)
        self.scheme = SchemeId.parse(self.scheme)
        self.validate()

    def validate(self) -> None:
        if not self.roster:
            raise ConfigError("roster is empty")
        dupes = sorted({r for r in self.roster if self.roster.count(r) > 1})
        if dupes:
            raise ConfigError(f"duplicate optimizer(s) in roster: {', '.join(dupes)}")
        for optimizer_id in (*self.roster, *self.overrides):
            stream_index(optimizer_id)
        if self.agents < 1:
            raise ConfigError(f"agents must be positive, got {self.agents}")
        if self.frequency < 1:
            raise ConfigError(f"frequency must be >= 1, got {self.frequency}")
        if self.generations < 1:
            raise ConfigError(f"generations must be positive, got {self.generations}")
        if self.threads < 0:
            raise ConfigError(f"threads must be >= 0, got {self.threads}")

    def replace(self, **changes: Any) -> "MmoConfig":
        return dataclasses.replace(self, **changes)


@dataclass
class MmoResult:
    best: EvaluatedSolution                             # all-time archive best
    trajectory: list[tuple[int, float]]                 # (generation, archive fitness)
    per_optimizer_final: dict[str, float]
    evaluation_count: int
    team_final: EvaluatedSolution                       # best of the final g* values
    broadcasts: int = 0

    @property
    def generations_run(self) -> int:
        return self.trajectory[-1][0]

    def fitness_curve(self) -> np.ndarray:
        return np.array([f for _, f in self.trajectory], dtype=np.float64)


@dataclass(frozen=True)
class TrialSummary:
    mean: float
    se: float
    values: tuple[float, ...]


# ── Master loop ───────────────────────────────────────────────

class MasterLoop:
    """One MMO run over a fixed objective."""

    def __init__(self, config: MmoConfig, objective: Objective) -> None:
        self.config = config
        self.objective = objective
        self.scheme = SchemeId.parse(config.scheme)
        self.team: list[BaseOptimizer] = [
            create_optimizer(oid, config.overrides.get(oid)) for oid in config.roster
        ]
        self.archive: Optional[EvaluatedSolution] = None
        self.trajectory: list[tuple[int, float]] = []
        self.scheme_evaluations = 0
        self.broadcasts = 0
        self._executor: Optional[ThreadPoolExecutor] = None

    # ── Public API ────────────────────────────────────────────

    def initialize(self) -> None:
        for optimizer in self.team:
            rng = derive_stream(self.config.master_seed, stream_index(optimizer.id))
            optimizer.initialize(self.config.agents, self.objective, rng)
        self._update_archive()
        self.trajectory = [(0, self.archive.fitness)]

    async def step_all(self) -> None:
        """Advance every member one generation and wait for all of them."""
        if self._executor is None:
            self._executor = ThreadPoolExecutor(
                max_workers=self.config.threads or len(self.team),
                thread_name_prefix="mmo")
        loop = asyncio.get_running_loop()
        await asyncio.gather(*(loop.run_in_executor(self._executor, optimizer.step)
                               for optimizer in self.team))

    def snapshot(self) -> TeamSnapshot:
        return TeamSnapshot(tuple(o.global_best() for o in self.team),
                            tuple(o.id for o in self.team))

    def communicate(self, generation: int) -> EvaluatedSolution:
        """Fuse the team's bests, archive the result and inject it everywhere."""
        team_best = apply_scheme(self.scheme, self.snapshot(), self.objective)
        if self.scheme.evaluates:
            self.scheme_evaluations += 1
        self._offer_archive(team_best)
        for optimizer in self.team:
            optimizer.inject(team_best)
        self.broadcasts += 1
        log.debug("gen %d: broadcast %s fitness=%.6g archive=%.6g", generation,
                  self.scheme.value, team_best.fitness, self.archive.fitness)
        self._notify(self.config.on_broadcast, generation, team_best)
        return team_best

    async def run(self) -> MmoResult:
        cfg = self.config
        log.info("MMO start: roster=%s n=%d scheme=%s gamma=%d G=%d seed=%d on %s",
                 ",".join(cfg.roster), cfg.agents, self.scheme.value, cfg.frequency,
                 cfg.generations, cfg.master_seed, self.objective.name)
        self.initialize()
        try:
            for generation in range(1, cfg.generations + 1):
                await self.step_all()
                self._update_archive()
                if generation % cfg.frequency == 0:
                    self.communicate(generation)
                self.trajectory.append((generation, self.archive.fitness))
                self._notify(cfg.on_generation, generation, self.archive.fitness)
                if cfg.stop_fitness is not None and self.archive.fitness <= cfg.stop_fitness:
                    log.info("MMO stop: archive %.6g <= %.6g at generation %d",
                             self.archive.fitness, cfg.stop_fitness, generation)
                    break
        finally:
            self.close()
        result = self.result()
        log.info("MMO done: best=%.6g evaluations=%d broadcasts=%d",
                 result.best.fitness, result.evaluation_count, result.broadcasts)
        return result

    def result(self) -> MmoResult:
        finals = {o.id: o.global_best() for o in self.team}
        team_final = min(finals.values(), key=lambda b: b.fitness)
        return MmoResult(
            best=self.archive,
            trajectory=list(self.trajectory),
            per_optimizer_final={oid: b.fitness for oid, b in finals.items()},
            evaluation_count=self.evaluation_count,
            team_final=team_final,
            broadcasts=self.broadcasts,
        )

    @property
    def evaluation_count(self) -> int:
        return sum(o.evaluations for o in self.team) + self.scheme_evaluations

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    # ── Internals ─────────────────────────────────────────────

    def _update_archive(self) -> None:
        for optimizer in self.team:
            self._offer_archive(optimizer.global_best())

    def _offer_archive(self, candidate: EvaluatedSolution) -> None:
        if self.archive is None or candidate.fitness < self.archive.fitness:
            self.archive = candidate

    @staticmethod
    def _notify(callback: Optional[Callable], *args: Any) -> None:
        if callback is None:
            return
        try:
            callback(*args)
        except Exception as e:
            log.warning("Callback %s failed: %s", getattr(callback, "__name__", callback), e)


# ── Entry points ──────────────────────────────────────────────

async def run_mmo_async(config: MmoConfig, objective: Objective) -> MmoResult:
    return await MasterLoop(config, objective).run()


def run_mmo(config: MmoConfig, objective: Objective) -> MmoResult:
    """Run the master loop to completion on a private event loop."""
    return asyncio.run(run_mmo_async(config, objective))


def run_ablation(config: MmoConfig, objective: Objective, excluded: str) -> MmoResult:
    """run_mmo with one optimizer removed from the roster."""
    if excluded not in config.roster:
        raise ConfigError(f"cannot exclude '{excluded}': not in roster {','.join(config.roster)}")
    if len(config.roster) < 2:
        raise ConfigError("ablation needs a roster of at least two optimizers")
    roster = tuple(r for r in config.roster if r != excluded)
    log.info("Ablation: without %s", excluded)
    return run_mmo(config.replace(roster=roster), objective)


def run_single(optimizer_id: str, objective: Objective, agents: int = 100,
               generations: int = 2000, seed: int = 0,
               overrides: Optional[dict[str, Any]] = None,
               stop_fitness: Optional[float] = None) -> MmoResult:
    """Run one optimizer on its own, with the sub-stream it has inside a team."""
    if generations < 1:
        raise ConfigError(f"generations must be positive, got {generations}")
    optimizer = create_optimizer(optimizer_id, overrides)
    optimizer.initialize(agents, objective, derive_stream(seed, stream_index(optimizer_id)))
    best = optimizer.global_best()
    trajectory = [(0, best.fitness)]
    for generation in range(1, generations + 1):
        optimizer.step()
        if optimizer.global_best().fitness < best.fitness:
            best = optimizer.global_best()
        trajectory.append((generation, best.fitness))
        if stop_fitness is not None and best.fitness <= stop_fitness:
            break
    log.info("%s done: best=%.6g after %d generations", optimizer_id, best.fitness, generation)
    return MmoResult(
        best=best,
        trajectory=trajectory,
        per_optimizer_final={optimizer_id: optimizer.global_best().fitness},
        evaluation_count=optimizer.evaluations,
        team_final=optimizer.global_best(),
    )


# ── Trials ────────────────────────────────────────────────────

def trial_seeds(base_seed: int, trials: int = DEFAULT_TRIALS) -> list[int]:
    if trials < 1:
        raise ConfigError(f"trials must be positive, got {trials}")
    return [base_seed + i for i in range(trials)]


def summarize(values: Sequence[float]) -> TrialSummary:
    """Mean and standard error (ddof=1) of a list of final errors."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ConfigError("no trial values to summarize")
    se = float(stats.sem(arr, ddof=1)) if arr.size > 1 else 0.0
    if math.isnan(se):
        se = math.inf
    return TrialSummary(mean=float(arr.mean()), se=se, values=tuple(float(v) for v in arr))


def run_trials(fn: Callable[[int], float], seeds: Sequence[int]) -> TrialSummary:
    """Call ``fn(seed)`` for every seed and summarize the returned errors."""
    values = []
    for seed in seeds:
        values.append(float(fn(seed)))
        log.debug("trial seed=%d error=%.6g", seed, values[-1])
    return summarize(values)


# ── Cross-dimension comparison ────────────────────────────────

DEFAULT_CROSS_DIMS = (5, 10, 15, 25)
DEFAULT_CROSS_GENERATIONS = (2000, 2000, 2000, 4000)


@dataclass(frozen=True)
class CrossDimensionRow:
    dimension: int
    generations: int
    mmo: TrialSummary
    baseline: TrialSummary


def run_cross_dimension(config: MmoConfig, dims: Sequence[int] = DEFAULT_CROSS_DIMS,
                        generations: Sequence[int] = DEFAULT_CROSS_GENERATIONS,
                        seeds: Optional[Sequence[int]] = None,
                        benchmark: str = "rosenbrock",
                        baseline: str = "batlevy") -> list[CrossDimensionRow]:
    """Team versus one optimizer at matched generation budgets, per dimension.

    Errors are final fitness values; every built-in benchmark has minimum 0.
    """
    if not dims:
        raise ConfigError("dims is empty")
    if len(generations) != len(dims):
        raise ConfigError(f"{len(generations)} generation budgets for {len(dims)} dimensions")
    seeds = list(seeds) if seeds is not None else trial_seeds(config.master_seed)
    baseline_overrides = config.overrides.get(baseline)

    rows = []
    for dim, budget in zip(dims, generations):
        objective = make_benchmark(benchmark, dim)
        mmo = run_trials(
            lambda seed: run_mmo(config.replace(generations=budget, master_seed=seed),
                                 objective).best.fitness,
            seeds)
        single = run_trials(
            lambda seed: run_single(baseline, objective, config.agents, budget, seed,
                                    baseline_overrides).best.fitness,
            seeds)
        log.info("D=%d G=%d: mmo %.6g ± %.3g, %s %.6g ± %.3g",
                 dim, budget, mmo.mean, mmo.se, baseline, single.mean, single.se)
        rows.append(CrossDimensionRow(dim, budget, mmo, single))
    return rows
