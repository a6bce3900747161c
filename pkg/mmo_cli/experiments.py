"""Experiment definitions: the validated config model and one function per subcommand.

Each ``cmd_*`` takes a resolved ``ExperimentConfig`` and returns an
``ExperimentOutput`` (a results table plus optional trajectory tables);
writing them to disk is the caller's job. Errors are reported as fitness
values: every built-in benchmark has minimum 0.
"""

from __future__ import annotations

import importlib.util
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np
import pandas as pd
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from mmo.benchmarks import BENCHMARKS, make_benchmark
from mmo.communication import SchemeId
from mmo.errors import ConfigError, EvaluatorError
from mmo.optimizers import OPTIMIZER_IDS, stream_index
from mmo.orchestrator import (
    MmoConfig, MmoResult, run_ablation, run_cross_dimension, run_mmo, run_single,
    run_trials, trial_seeds,
)
from mmo.svm import (
    DATASET_FORMATS, SvmHyperparams, evaluate_model, load_dataset, mmo_train,
    sgd_train, split_dataset,
)
from mmo.types import Bounds, Objective

from .config import settings

log = logging.getLogger("experiments")

SUBCOMMANDS = ("bench-single", "bench-mmo", "ablation", "cross-dim", "svm", "optimize")

# Applied above the model defaults and below the config file and flags.
SUBCOMMAND_DEFAULTS: dict[str, dict[str, Any]] = {
    "bench-single": {"agents": [20, 50, 100]},
    "svm": {"schemes": ["best"], "frequencies": [1], "trials": 5},
}

_LIST_FIELDS = ("optimizers", "agents", "roster", "schemes", "frequencies", "dims",
                "dim_generations", "regularizations", "learning_rates")

OVERRIDE_PREFIX = "override."


# ── Config model ──────────────────────────────────────────────

class ExperimentConfig(BaseModel):
    """Every parameter a subcommand reads, with all defaults materialized."""

    model_config = ConfigDict(extra="forbid")

    subcommand: str
    seed: int = Field(0, ge=0, lt=2 ** 64)
    trials: int = Field(10, ge=1)

    # Objective
    benchmark: str = "rosenbrock"
    dim: int = Field(15, ge=1)
    lower: Optional[float] = None
    upper: Optional[float] = None
    evaluator: str = ""

    # Team / standalone runs
    optimizers: list[str] = Field(default_factory=lambda: list(OPTIMIZER_IDS))
    roster: list[str] = Field(default_factory=lambda: list(OPTIMIZER_IDS))
    agents: list[int] = Field(default_factory=lambda: [100])
    generations: int = Field(2000, ge=1)
    scheme: str = "exponential"
    frequency: int = Field(1, ge=1)
    schemes: list[str] = Field(default_factory=lambda: ["rank", "exponential", "best"])
    frequencies: list[int] = Field(default_factory=lambda: [1, 10, 50, 500, 1000, 2000])
    overrides: dict[str, dict[str, Any]] = Field(default_factory=dict)

    # Cross-dimension
    dims: list[int] = Field(default_factory=lambda: [5, 10, 15, 25])
    dim_generations: list[int] = Field(default_factory=lambda: [2000, 2000, 2000, 4000])
    baseline: str = "batlevy"

    # SVM
    dataset: str = "bcw"
    data_path: str = ""
    regularizations: list[float] = Field(default_factory=lambda: [0.0])
    learning_rates: list[float] = Field(default_factory=lambda: [0.01])
    iterations: int = Field(1000, ge=1)

    @field_validator(*_LIST_FIELDS, mode="before")
    @classmethod
    def _split_commas(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @field_validator("lower", "upper", mode="before")
    @classmethod
    def _blank_is_none(cls, value: Any) -> Any:
        return None if isinstance(value, str) and not value.strip() else value

    @field_validator("subcommand")
    @classmethod
    def _known_subcommand(cls, value: str) -> str:
        if value not in SUBCOMMANDS:
            raise ValueError(f"unknown subcommand '{value}'")
        return value

    @field_validator("benchmark")
    @classmethod
    def _known_benchmark(cls, value: str) -> str:
        if value not in BENCHMARKS:
            raise ValueError(f"unknown benchmark '{value}'. Available: {', '.join(BENCHMARKS)}")
        return value

    @field_validator("optimizers", "roster")
    @classmethod
    def _known_optimizers(cls, value: list[str]) -> list[str]:
        if not value:
            raise ValueError("must name at least one optimizer")
        for optimizer_id in value:
            stream_index(optimizer_id)
        if len(set(value)) != len(value):
            raise ValueError("duplicate optimizer ids")
        return value

    @field_validator("baseline")
    @classmethod
    def _known_baseline(cls, value: str) -> str:
        stream_index(value)
        return value

    @field_validator("scheme")
    @classmethod
    def _known_scheme(cls, value: str) -> str:
        return SchemeId.parse(value).value

    @field_validator("schemes")
    @classmethod
    def _known_schemes(cls, value: list[str]) -> list[str]:
        if not value:
            raise ValueError("must name at least one scheme")
        return [SchemeId.parse(s).value for s in value]

    @field_validator("agents", "frequencies", "dims", "dim_generations")
    @classmethod
    def _positive(cls, value: list[int]) -> list[int]:
        if not value or any(v < 1 for v in value):
            raise ValueError("must be a non-empty list of positive integers")
        return value

    @field_validator("regularizations", "learning_rates")
    @classmethod
    def _non_negative(cls, value: list[float]) -> list[float]:
        if not value or any(v < 0 for v in value):
            raise ValueError("must be a non-empty list of non-negative numbers")
        return value

    @field_validator("dataset")
    @classmethod
    def _known_dataset(cls, value: str) -> str:
        if value.lower() not in DATASET_FORMATS:
            raise ValueError(f"unknown dataset '{value}'. Available: {', '.join(DATASET_FORMATS)}")
        return DATASET_FORMATS[value.lower()]

    @field_validator("overrides")
    @classmethod
    def _known_override_targets(cls, value: dict[str, dict[str, Any]]) -> dict[str, dict[str, Any]]:
        for optimizer_id in value:
            stream_index(optimizer_id)
        return value

    @model_validator(mode="after")
    def _consistent(self) -> "ExperimentConfig":
        if len(self.dims) != len(self.dim_generations):
            raise ValueError(f"{len(self.dims)} dims but {len(self.dim_generations)} dim_generations")
        if self.subcommand != "bench-single" and len(self.agents) > 1:
            raise ValueError(f"{self.subcommand} takes one agent count, got {len(self.agents)}")
        if (self.lower is None) != (self.upper is None):
            raise ValueError("lower and upper must be given together")
        if self.lower is not None and self.lower > self.upper:
            raise ValueError("lower exceeds upper")
        return self

    # ── Serialization ─────────────────────────────────────────

    def to_lines(self) -> list[str]:
        """Sorted ``key = value`` lines; reading them back gives an equal config."""
        lines = []
        for key, value in self.model_dump().items():
            if key == "overrides":
                for optimizer_id, params in value.items():
                    for name, v in params.items():
                        lines.append(f"{OVERRIDE_PREFIX}{optimizer_id}.{name} = {_format_value(v)}")
                continue
            lines.append(f"{key} = {_format_value(value)}")
        return sorted(lines)

    def mmo_config(self, **changes: Any) -> MmoConfig:
        base = dict(roster=tuple(self.roster), agents=self.agents[0], scheme=self.scheme,
                    frequency=self.frequency, generations=self.generations,
                    master_seed=self.seed, overrides=self.overrides,
                    threads=settings.mmo_threads)
        base.update(changes)
        return MmoConfig(**base)

    def objective(self) -> Objective:
        if self.evaluator:
            if self.lower is None:
                raise ConfigError("--evaluator needs --lower and --upper")
            return load_evaluator(self.evaluator, self.dim, self.lower, self.upper)
        return make_benchmark(self.benchmark, self.dim, self.lower, self.upper)

    def seeds(self) -> list[int]:
        return trial_seeds(self.seed, self.trials)


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(v) for v in value)
    return str(value)


def parse_scalar(text: str) -> Any:
    """Override values: true/false, integers, or floats."""
    lowered = text.strip().lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    try:
        return int(lowered)
    except ValueError:
        pass
    try:
        return float(lowered)
    except ValueError:
        raise ConfigError(f"override value '{text}' is not a number or boolean") from None


def read_config_file(path: str) -> dict[str, Any]:
    """Parse a ``key = value`` file into raw config values.

    ``#`` starts a comment only at line start or after whitespace, so
    ``data_path = /data/run#2/bcw.data`` keeps its full value.
    """
    file = Path(path)
    if not file.is_file():
        raise ConfigError(f"cannot read config file {path}: no such file")
    values: dict[str, Any] = {}
    for key, value in dotenv_values(file, interpolate=False).items():
        if value is None:
            raise ConfigError(f"{path}:{_line_of(file, key)}: expected 'key = value', got '{key}'")
        merge_setting(values, key, value.strip())
    return values


def _line_of(file: Path, key: str) -> int:
    for line_no, raw in enumerate(file.read_text().splitlines(), start=1):
        if raw.strip() == key or raw.strip().startswith(f"{key} "):
            return line_no
    return 0


def merge_setting(values: dict[str, Any], key: str, value: str) -> None:
    """Store one raw setting; ``override.<id>.<param>`` keys nest into overrides."""
    if key.startswith(OVERRIDE_PREFIX):
        target = key[len(OVERRIDE_PREFIX):]
        optimizer_id, dot, name = target.partition(".")
        if not dot or not name:
            raise ConfigError(f"override key '{key}' must look like override.<optimizer>.<param>")
        values.setdefault("overrides", {}).setdefault(optimizer_id, {})[name] = parse_scalar(value)
        return
    values[key.replace("-", "_")] = value


def resolve_config(subcommand: str, file_values: Optional[dict[str, Any]] = None,
                   flag_values: Optional[dict[str, Any]] = None) -> ExperimentConfig:
    """Model defaults < subcommand defaults < config file < flags."""
    merged: dict[str, Any] = {"subcommand": subcommand}
    merged.update(SUBCOMMAND_DEFAULTS.get(subcommand, {}))
    for source in (file_values or {}, flag_values or {}):
        for key, value in source.items():
            if key == "overrides":
                for optimizer_id, params in value.items():
                    merged.setdefault("overrides", {}).setdefault(optimizer_id, {}).update(params)
            else:
                merged[key] = value
    if merged["subcommand"] != subcommand:
        raise ConfigError(
            f"config file is for '{merged['subcommand']}', not '{subcommand}'")
    return ExperimentConfig(**merged)


# ── External evaluator ────────────────────────────────────────

def load_evaluator(target: str, dimension: int, lower: float, upper: float) -> Objective:
    """Objective from ``path.py[:function]``; the function defaults to ``objective``."""
    path, _, func_name = target.partition(":")
    func_name = func_name or "objective"
    spec = importlib.util.spec_from_file_location("mmo_user_objective", path)
    if spec is None or spec.loader is None:
        raise ConfigError(f"cannot import evaluator from {path}")
    module = importlib.util.module_from_spec(spec)
    try:
        spec.loader.exec_module(module)
    except FileNotFoundError:
        raise ConfigError(f"evaluator file not found: {path}") from None
    except Exception as e:
        raise EvaluatorError(f"evaluator {path} failed to import: {e}") from e
    function = getattr(module, func_name, None)
    if not callable(function):
        raise ConfigError(f"evaluator function '{func_name}' not found in {path}")

    def checked(x: np.ndarray) -> float:
        try:
            value = float(function(x))
        except Exception as e:
            raise EvaluatorError(f"evaluator {func_name} raised: {e}") from e
        if not math.isfinite(value):
            raise EvaluatorError(f"evaluator {func_name} returned {value} at {x.tolist()}")
        return value

    return Objective(dimension=dimension, function=checked,
                     bounds=Bounds.box(lower, upper, dimension), name=f"{Path(path).stem}:{func_name}")


# ── Subcommands ───────────────────────────────────────────────

@dataclass
class ExperimentOutput:
    results: pd.DataFrame
    trajectories: dict[str, pd.DataFrame] = field(default_factory=dict)
    summary: dict[str, Any] = field(default_factory=dict)


ProgressCallback = Callable[[str], None]


def _noop(_: str) -> None:
    pass


def _trajectory_frame(trajectory: list[tuple[int, float]], column: str = "generation") -> pd.DataFrame:
    return pd.DataFrame(trajectory, columns=[column, "loss" if column == "iteration" else "fitness"])


def cmd_bench_single(cfg: ExperimentConfig, progress: ProgressCallback = _noop) -> ExperimentOutput:
    objective = cfg.objective()
    rows = []
    for optimizer_id in cfg.optimizers:
        for agents in cfg.agents:
            progress(f"{optimizer_id} n={agents}")
            summary = run_trials(
                lambda seed: run_single(optimizer_id, objective, agents, cfg.generations,
                                        seed, cfg.overrides.get(optimizer_id)).best.fitness,
                cfg.seeds())
            rows.append((objective.name, optimizer_id, agents, summary.mean, summary.se))
    return ExperimentOutput(pd.DataFrame(
        rows, columns=["objective", "optimizer", "agents", "mean_error", "se_error"]))


def cmd_bench_mmo(cfg: ExperimentConfig, progress: ProgressCallback = _noop) -> ExperimentOutput:
    objective = cfg.objective()
    rows = []
    for frequency in cfg.frequencies:
        for scheme in cfg.schemes:
            progress(f"gamma={frequency} {scheme}")
            summary = run_trials(
                lambda seed: run_mmo(cfg.mmo_config(scheme=scheme, frequency=frequency,
                                                    master_seed=seed),
                                     objective).best.fitness,
                cfg.seeds())
            rows.append((objective.name, frequency, scheme, summary.mean, summary.se))
    return ExperimentOutput(pd.DataFrame(
        rows, columns=["objective", "frequency", "scheme", "mean_error", "se_error"]))


def cmd_ablation(cfg: ExperimentConfig, progress: ProgressCallback = _noop) -> ExperimentOutput:
    objective = cfg.objective()
    rows = []
    progress("no ablation")
    baseline = run_trials(
        lambda seed: run_mmo(cfg.mmo_config(master_seed=seed), objective).best.fitness,
        cfg.seeds())
    rows.append(("none", baseline.mean, baseline.se))
    for excluded in cfg.roster:
        progress(f"without {excluded}")
        summary = run_trials(
            lambda seed: run_ablation(cfg.mmo_config(master_seed=seed), objective,
                                      excluded).best.fitness,
            cfg.seeds())
        rows.append((excluded, summary.mean, summary.se))
    return ExperimentOutput(pd.DataFrame(rows, columns=["excluded", "mean_error", "se_error"]))


def cmd_cross_dim(cfg: ExperimentConfig, progress: ProgressCallback = _noop) -> ExperimentOutput:
    progress(f"dims {','.join(map(str, cfg.dims))}")
    table = run_cross_dimension(cfg.mmo_config(), cfg.dims, cfg.dim_generations,
                                seeds=cfg.seeds(), benchmark=cfg.benchmark,
                                baseline=cfg.baseline)
    b = cfg.baseline
    rows = [(r.dimension, r.generations, r.baseline.mean, r.baseline.se, r.mmo.mean, r.mmo.se)
            for r in table]
    return ExperimentOutput(pd.DataFrame(
        rows, columns=["dimension", "generations", f"{b}_mean", f"{b}_se", "mmo_mean", "mmo_se"]))


def _dataset_path(cfg: ExperimentConfig) -> str:
    if cfg.data_path:
        return cfg.data_path
    path = settings.mmo_bcw_path if cfg.dataset == "bcw" else settings.mmo_is_path
    if not path:
        raise ConfigError("svm needs --data-path (or MMO_BCW_PATH / MMO_IS_PATH)")
    return path


def cmd_svm(cfg: ExperimentConfig, progress: ProgressCallback = _noop) -> ExperimentOutput:
    data = load_dataset(_dataset_path(cfg), cfg.dataset)
    rows = []
    trajectories: dict[str, pd.DataFrame] = {}

    def record(trainer: str, label: str, model, trajectory, lam: float) -> None:
        report = evaluate_model(model, split, lam)
        rows.append((cfg.dataset, trainer, label, report.loss,
                     report.train_acc, report.valid_acc, report.test_acc))
        trajectories[f"{trainer}_{label}"] = _trajectory_frame(trajectory, "iteration")

    for seed in cfg.seeds():
        split = split_dataset(data, seed)
        for lam in cfg.regularizations:
            for alpha in cfg.learning_rates:
                label = f"lambda={lam:g}_alpha={alpha:g}_seed={seed}"
                progress(f"sgd {label}")
                hp = SvmHyperparams(regularization=lam, learning_rate=alpha,
                                    iterations=cfg.iterations)
                model, trajectory = sgd_train(split, hp, seed)
                record("sgd", label, model, trajectory, lam)
            for scheme in cfg.schemes:
                for frequency in cfg.frequencies:
                    label = f"lambda={lam:g}_f={frequency}_{scheme}_seed={seed}"
                    progress(f"mmo {label}")
                    mmo_cfg = cfg.mmo_config(scheme=scheme, frequency=frequency,
                                             generations=cfg.iterations, master_seed=seed)
                    model, trajectory = mmo_train(split, lam, mmo_cfg)
                    record("mmo", label, model, trajectory, lam)

    return ExperimentOutput(
        pd.DataFrame(rows, columns=["dataset", "trainer", "config", "loss",
                                    "train_acc", "valid_acc", "test_acc"]),
        trajectories)


def cmd_optimize(cfg: ExperimentConfig, progress: ProgressCallback = _noop) -> ExperimentOutput:
    objective = cfg.objective()
    progress(objective.name)
    started = time.perf_counter()
    result: MmoResult = run_mmo(cfg.mmo_config(), objective)
    wall_time = time.perf_counter() - started
    summary = {
        "objective": objective.name,
        "best_position": result.best.position.tolist(),
        "best_fitness": result.best.fitness,
        "evaluations": result.evaluation_count,
        "wall_time": round(wall_time, 3),
    }
    results = pd.DataFrame([(objective.name, result.best.fitness, result.evaluation_count,
                             result.generations_run)],
                           columns=["objective", "best_fitness", "evaluations", "generations"])
    return ExperimentOutput(results, {"archive": _trajectory_frame(result.trajectory)}, summary)


COMMANDS: dict[str, Callable[[ExperimentConfig, ProgressCallback], ExperimentOutput]] = {
    "bench-single": cmd_bench_single,
    "bench-mmo": cmd_bench_mmo,
    "ablation": cmd_ablation,
    "cross-dim": cmd_cross_dim,
    "svm": cmd_svm,
    "optimize": cmd_optimize,
}
