"""Linear SVM training: datasets, hinge loss, an SGD baseline and MMO as trainer.

Binary problems use one weight row and labels y ∈ {−1, +1}:

    loss = mean_n max(0, 1 − y_n·(w·x_n + b)) + λ‖w‖²

Multi-class problems use one weight row per class and the one-vs-rest
margin sum:

    loss = mean_n Σ_{c≠y_n} max(0, 1 − (s_{y_n} − s_c)) + λ Σ_c ‖W_c‖²

Model parameters flatten row by row as [W_c, b_c], so a binary model on d
features is a vector of d+1 values and a C-class model one of C·(d+1).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from .core import make_stream
from .errors import ConfigError, DatasetError, DimensionError, ParameterError
from .orchestrator import MmoConfig, run_mmo
from .types import Bounds, Objective

log = logging.getLogger("svm")

PARAMETER_BOUND = 10.0
SPLIT_FRACTIONS = (0.6, 0.2)        # train, validation; test takes the rest
MIN_SPLIT_ROWS = 5

BCW_FEATURES = (
    "clump_thickness", "uniformity_cell_size", "uniformity_cell_shape",
    "marginal_adhesion", "single_epithelial_cell_size", "bare_nuclei",
    "bland_chromatin", "normal_nucleoli", "mitoses",
)
BCW_LABELS = {"2": 0, "4": 1}       # benign, malignant

IS_FEATURES = (
    "region_centroid_col", "region_centroid_row", "region_pixel_count",
    "short_line_density_5", "short_line_density_2", "vedge_mean", "vedge_sd",
    "hedge_mean", "hedge_sd", "intensity_mean", "rawred_mean", "rawblue_mean",
    "rawgreen_mean", "exred_mean", "exblue_mean", "exgreen_mean", "value_mean",
    "saturation_mean", "hue_mean",
)
IS_CLASSES = ("BRICKFACE", "CEMENT", "FOLIAGE", "GRASS", "PATH", "SKY", "WINDOW")

DATASET_FORMATS = {"bcw": "bcw", "image_segmentation": "image_segmentation",
                   "is": "image_segmentation"}


# ── Data types ────────────────────────────────────────────────

@dataclass(frozen=True)
class Normalization:
    """Per-column z-score fitted on one matrix."""
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, features: np.ndarray) -> "Normalization":
        mean = features.mean(axis=0)
        std = features.std(axis=0)
        constant = std == 0
        if constant.any():
            log.warning("%d constant feature column(s) left at 0 after normalization",
                        int(constant.sum()))
            std = np.where(constant, 1.0, std)
        return cls(mean, std)

    def apply(self, features: np.ndarray) -> np.ndarray:
        return (features - self.mean) / self.std


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray                # (N, d) float64
    labels: np.ndarray                  # (N,) ints in [0, class_count)
    class_count: int
    feature_names: tuple[str, ...] = ()
    class_names: tuple[str, ...] = ()
    normalization: Optional[Normalization] = None

    def __post_init__(self) -> None:
        if self.features.ndim != 2 or self.labels.shape != (self.features.shape[0],):
            raise DimensionError(
                f"features {self.features.shape} and labels {self.labels.shape} disagree")
        if self.class_count < 2:
            raise ConfigError(f"need at least two classes, got {self.class_count}")

    @property
    def size(self) -> int:
        return int(self.features.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.features.shape[1])

    def subset(self, rows: np.ndarray) -> "Dataset":
        return replace(self, features=self.features[rows], labels=self.labels[rows])


@dataclass(frozen=True)
class DataSplit:
    train: Dataset
    validation: Dataset
    test: Dataset


@dataclass(frozen=True)
class SvmHyperparams:
    regularization: float = 0.0     # λ
    learning_rate: float = 0.01     # α, SGD only
    iterations: int = 1000

    def __post_init__(self) -> None:
        if self.regularization < 0:
            raise ParameterError(f"regularization must be >= 0, got {self.regularization}")
        if self.learning_rate < 0:
            raise ParameterError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.iterations < 1:
            raise ParameterError(f"iterations must be positive, got {self.iterations}")


@dataclass(frozen=True, eq=False)
class LinearModel:
    """One weight row and bias per score: 1 row for binary, C rows otherwise."""
    weights: np.ndarray     # (rows, d)
    bias: np.ndarray        # (rows,)

    @classmethod
    def zeros(cls, class_count: int, dimension: int) -> "LinearModel":
        rows = score_rows(class_count)
        return cls(np.zeros((rows, dimension)), np.zeros(rows))

    @property
    def rows(self) -> int:
        return int(self.weights.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.weights.shape[1])

    @property
    def parameter_count(self) -> int:
        return self.rows * (self.dimension + 1)

    def flatten(self) -> np.ndarray:
        return np.hstack([self.weights, self.bias[:, None]]).ravel()

    @classmethod
    def unflatten(cls, vector: np.ndarray, class_count: int, dimension: int) -> "LinearModel":
        rows = score_rows(class_count)
        vector = np.asarray(vector, dtype=np.float64)
        if vector.shape != (rows * (dimension + 1),):
            raise DimensionError(
                f"expected {rows * (dimension + 1)} parameters, got shape {vector.shape}")
        table = vector.reshape(rows, dimension + 1)
        return cls(table[:, :-1].copy(), table[:, -1].copy())

    def scores(self, features: np.ndarray) -> np.ndarray:
        return features @ self.weights.T + self.bias

    def __neg__(self) -> "LinearModel":
        return LinearModel(-self.weights, -self.bias)


def score_rows(class_count: int) -> int:
    return 1 if class_count == 2 else int(class_count)


# ── Ingestion ─────────────────────────────────────────────────

def _read_rows(path: Union[str, Path], columns: int) -> pd.DataFrame:
    """Raw string cells indexed by 1-based line number; blank lines dropped."""
    try:
        frame = pd.read_csv(path, header=None, names=list(range(columns)), dtype=str,
                            skip_blank_lines=False, keep_default_na=False,
                            skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise DatasetError(f"{path}: file is empty") from None
    except pd.errors.ParserError as e:
        raise DatasetError(f"{path}: {e}") from None
    except OSError as e:
        raise DatasetError(f"{path}: {e}") from None
    frame = frame.fillna("").apply(lambda col: col.str.strip())
    frame.index = pd.RangeIndex(1, len(frame) + 1)
    frame = frame[(frame != "").any(axis=1)]
    if frame.empty:
        raise DatasetError(f"{path}: no data rows")
    return frame


def _numeric(cells: pd.DataFrame, path: Union[str, Path]) -> np.ndarray:
    values = cells.apply(pd.to_numeric, errors="coerce")
    bad = values.isna().any(axis=1)
    if bad.any():
        line = int(bad.idxmax())
        raise DatasetError(f"{path}: non-numeric attribute", line=line)
    return values.to_numpy(dtype=np.float64)


def _load_bcw(path: Union[str, Path]) -> Dataset:
    frame = _read_rows(path, 11)
    short = (frame == "").any(axis=1)
    if short.any():
        raise DatasetError(f"{path}: expected 11 columns", line=int(short.idxmax()))

    missing = (frame == "?").any(axis=1)
    frame = frame[~missing]
    labels = frame[10].map(BCW_LABELS)
    if labels.isna().any():
        line = int(labels.isna().idxmax())
        raise DatasetError(f"{path}: unknown label '{frame.loc[line, 10]}'", line=line)

    features = _numeric(frame.iloc[:, 1:10], path)
    log.info("BCW loaded: %d rows (%d with missing values dropped)",
             len(frame), int(missing.sum()))
    return Dataset(features, labels.to_numpy(dtype=np.int64), 2,
                   BCW_FEATURES, ("benign", "malignant"))


def _load_image_segmentation(path: Union[str, Path]) -> Dataset:
    frame = _read_rows(path, 1 + len(IS_FEATURES))
    attributes = frame.iloc[:, 1:].apply(pd.to_numeric, errors="coerce")
    complete = attributes.notna().all(axis=1)
    if not complete.any():
        raise DatasetError(f"{path}: no data rows")
    # Everything before the first complete row is header.
    first = complete.idxmax()
    frame = frame.loc[first:]
    classes = pd.Categorical(frame[0], categories=IS_CLASSES)
    unknown = pd.isna(classes)
    if unknown.any():
        line = int(frame.index[unknown.argmax()])
        raise DatasetError(f"{path}: unknown class '{frame.loc[line, 0]}'", line=line)

    features = _numeric(frame.iloc[:, 1:], path)
    log.info("Image segmentation loaded: %d rows, %d header line(s) skipped",
             len(frame), int(first) - 1)
    return Dataset(features, np.asarray(classes.codes, dtype=np.int64), len(IS_CLASSES),
                   IS_FEATURES, IS_CLASSES)


def load_dataset(path: Union[str, Path], fmt: str) -> Dataset:
    """Parse a UCI file in the BCW or image-segmentation CSV layout."""
    try:
        kind = DATASET_FORMATS[fmt.lower()]
    except KeyError:
        raise ConfigError(
            f"unknown dataset format '{fmt}'. Available: {', '.join(DATASET_FORMATS)}") from None
    if kind == "bcw":
        return _load_bcw(path)
    return _load_image_segmentation(path)


def split_dataset(data: Dataset, seed: int) -> DataSplit:
    """Shuffle, cut 60/20/20 (floor for train and validation) and z-score on train."""
    n = data.size
    if n < MIN_SPLIT_ROWS:
        raise ConfigError(f"need at least {MIN_SPLIT_ROWS} rows to split, got {n}")
    order = make_stream(seed).permutation(n)
    n_train = math.floor(SPLIT_FRACTIONS[0] * n)
    n_valid = math.floor(SPLIT_FRACTIONS[1] * n)
    parts = np.split(order, [n_train, n_train + n_valid])

    norm = Normalization.fit(data.features[parts[0]])

    def _normalized(rows: np.ndarray) -> Dataset:
        return replace(data, features=norm.apply(data.features[rows]),
                       labels=data.labels[rows], normalization=norm)

    train, valid, test = (_normalized(rows) for rows in parts)
    log.info("Split %d rows: train=%d validation=%d test=%d",
             n, train.size, valid.size, test.size)
    return DataSplit(train, valid, test)


# ── Loss, subgradient, accuracy ───────────────────────────────

def _check(model: LinearModel, data: Dataset) -> None:
    if model.dimension != data.dimension or model.rows != score_rows(data.class_count):
        raise DimensionError(
            f"model is {model.rows}x{model.dimension}, data has d={data.dimension} "
            f"and {data.class_count} classes")


def _hinge_terms(scores: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Per-row hinge values for scores of shape (..., N, rows)."""
    if scores.shape[-1] == 1:
        y = 2.0 * labels - 1.0
        return np.maximum(0.0, 1.0 - y * scores[..., 0])
    index = labels.reshape((1,) * (scores.ndim - 2) + (-1, 1))
    true = np.take_along_axis(scores, index, axis=-1)
    terms = np.maximum(0.0, 1.0 - (true - scores))
    own = np.zeros(scores.shape[-2:], dtype=bool)
    own[np.arange(len(labels)), labels] = True
    return np.where(own, 0.0, terms).sum(axis=-1)


def svm_loss(model: LinearModel, data: Dataset, lam: float) -> float:
    _check(model, data)
    hinge = _hinge_terms(model.scores(data.features), data.labels).mean()
    return float(hinge + lam * np.sum(model.weights ** 2))


def svm_subgradient(model: LinearModel, data: Dataset, lam: float) -> LinearModel:
    """Subgradient of ``svm_loss`` with respect to weights and biases."""
    _check(model, data)
    n = data.size
    scores = model.scores(data.features)
    if model.rows == 1:
        y = 2.0 * data.labels - 1.0
        active = (1.0 - y * scores[:, 0]) > 0
        coeff = (-(y * active) / n)[:, None]
    else:
        true = scores[np.arange(n), data.labels][:, None]
        active = (1.0 - (true - scores)) > 0
        active[np.arange(n), data.labels] = False
        coeff = active.astype(np.float64)
        coeff[np.arange(n), data.labels] = -coeff.sum(axis=1)
        coeff /= n
    grad_w = coeff.T @ data.features + 2.0 * lam * model.weights
    return LinearModel(grad_w, coeff.sum(axis=0))


def predict(model: LinearModel, features: np.ndarray) -> np.ndarray:
    scores = model.scores(features)
    if model.rows == 1:
        return (scores[:, 0] > 0).astype(np.int64)
    return np.argmax(scores, axis=1)


def accuracy(model: LinearModel, data: Dataset) -> float:
    """Percentage of rows classified correctly."""
    _check(model, data)
    return float(100.0 * np.mean(predict(model, data.features) == data.labels))


def svm_objective(data: Dataset, lam: float,
                  bound: float = PARAMETER_BOUND) -> Objective:
    """Training loss over flattened parameters, batch-evaluable and thread-safe."""
    rows = score_rows(data.class_count)
    d = data.dimension
    features, labels = data.features, data.labels

    def batch_loss(params: np.ndarray) -> np.ndarray:
        table = params.reshape(len(params), rows, d + 1)
        weights, bias = table[:, :, :-1], table[:, :, -1]
        scores = features @ weights.transpose(0, 2, 1) + bias[:, None, :]
        hinge = _hinge_terms(scores, labels).mean(axis=-1)
        return hinge + lam * np.sum(weights ** 2, axis=(1, 2))

    dimension = rows * (d + 1)
    return Objective(dimension=dimension, function=batch_loss,
                     bounds=Bounds.box(-bound, bound, dimension),
                     name=f"svm loss ({data.size} rows, {rows}x{d + 1})", vectorized=True)


# ── Trainers ──────────────────────────────────────────────────

Trajectory = list[tuple[int, float]]


def sgd_train(split: DataSplit, hp: SvmHyperparams,
              seed: int) -> tuple[LinearModel, Trajectory]:
    """Per-row subgradient descent from the zero model, one pass per iteration."""
    train = split.train
    model = LinearModel.zeros(train.class_count, train.dimension)
    weights, bias = model.weights, model.bias
    rng = make_stream(seed)
    lam, alpha = hp.regularization, hp.learning_rate
    trajectory = [(0, svm_loss(model, train, lam))]

    for iteration in range(1, hp.iterations + 1):
        for i in rng.permutation(train.size):
            x, label = train.features[i], int(train.labels[i])
            scores = weights @ x + bias
            if weights.shape[0] == 1:
                y = 2.0 * label - 1.0
                coeff = np.array([-y]) if 1.0 - y * scores[0] > 0 else np.zeros(1)
            else:
                coeff = ((1.0 - (scores[label] - scores)) > 0).astype(np.float64)
                coeff[label] = 0.0
                coeff[label] = -coeff.sum()
            weights -= alpha * (np.outer(coeff, x) + 2.0 * lam * weights)
            bias -= alpha * coeff
        trajectory.append((iteration, svm_loss(model, train, lam)))
        log.debug("sgd iteration %d loss=%.6g", iteration, trajectory[-1][1])

    log.info("SGD done: λ=%g α=%g loss=%.6g", lam, alpha, trajectory[-1][1])
    return model, trajectory


def mmo_train(split: DataSplit, lam: float,
              config: MmoConfig) -> tuple[LinearModel, Trajectory]:
    """Search the flattened parameters with the master loop; return the archive best."""
    train = split.train
    objective = svm_objective(train, lam)
    result = run_mmo(config, objective)
    model = LinearModel.unflatten(result.best.position, train.class_count, train.dimension)
    log.info("MMO trainer done: λ=%g loss=%.6g", lam, result.best.fitness)
    return model, result.trajectory


@dataclass(frozen=True)
class ModelReport:
    loss: float
    train_acc: float
    valid_acc: float
    test_acc: float


def evaluate_model(model: LinearModel, split: DataSplit, lam: float) -> ModelReport:
    return ModelReport(
        loss=svm_loss(model, split.train, lam),
        train_acc=accuracy(model, split.train),
        valid_acc=accuracy(model, split.validation),
        test_acc=accuracy(model, split.test),
    )
