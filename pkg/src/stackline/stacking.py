"""Stacked generalization with a logistic-regression meta-learner.

Base-learner probabilities produced out-of-fold become the meta-learner's
training inputs. Every fit draws its seed from the stacking seed as
``seed + learner_index * 1000 + fold_index``; the final refit of learner
``r`` on the whole training set uses fold index ``n_folds``.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, SchemaError, ShapeError, StacklineError, StratificationError, TrainingError
from .frame import LabeledSet, make_rng
from .learners import Learner, LogRegModel, learner_from_dict, make_learner

DEFAULT_BASES = ("knn", "svm", "mlp", "adaboost")
THREADS_ENV = "STACKLINE_THREADS"


def worker_count() -> int:
    """Worker cap from ``STACKLINE_THREADS``; 0 or unset means serial."""
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError(f"{THREADS_ENV} must be >= 0, got {n}")
    return n


def run_jobs(fn, jobs):
    """Apply ``fn`` to each job, in order, optionally on a thread pool."""
    n = worker_count()
    if n <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, jobs))


@dataclass
class StackingConfig:
    """Base learners may be given as names, ``{"name", "params"}`` dicts or
    unfitted ``Learner`` prototypes (cloned before every fit)."""

    base_learners: list = field(default_factory=lambda: list(DEFAULT_BASES))
    n_folds: int = 5
    seed: int = 0
    learner_params: dict = field(default_factory=dict)
    meta_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.base_learners) < 2:
            raise ConfigError("stacking needs at least two base learners")
        if int(self.n_folds) != self.n_folds or self.n_folds < 2:
            raise ConfigError(f"n_folds must be an integer >= 2, got {self.n_folds}")

    def make_base(self, r: int) -> Learner:
        spec = self.base_learners[r]
        if isinstance(spec, Learner):
            return spec.clone()
        if isinstance(spec, str):
            return make_learner(spec, **self.learner_params.get(spec, {}))
        if isinstance(spec, dict):
            name = spec["name"]
            params = {**self.learner_params.get(name, {}), **spec.get("params", {})}
            return make_learner(name, **params)
        raise ConfigError(f"bad base learner spec {spec!r}")

    def make_meta(self) -> LogRegModel:
        return LogRegModel(**self.meta_params)

    def to_dict(self) -> dict:
        bases = []
        for r in range(len(self.base_learners)):
            model = self.make_base(r)
            bases.append({"name": model.name, "params": model.params})
        return {
            "base_learners": bases,
            "n_folds": self.n_folds,
            "seed": self.seed,
            "meta_params": self.make_meta().params,
        }

    def digest(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()


def stratified_folds(labels, n_folds: int, seed: int) -> np.ndarray:
    """Fold index per row: each class is shuffled then dealt round-robin."""
    labels = np.asarray(labels)
    if n_folds > labels.size:
        raise ConfigError(f"n_folds={n_folds} exceeds {labels.size} training rows")
    rng = make_rng(seed)
    folds = np.empty(labels.size, dtype=np.int64)
    for c in (0, 1):
        idx = np.flatnonzero(labels == c)
        if idx.size < n_folds:
            raise StratificationError(
                f"class {c} has {idx.size} rows, too few for {n_folds} stratified folds"
            )
        folds[rng.permutation(idx)] = np.arange(idx.size) % n_folds
    return folds


def _seed(cfg: StackingConfig, r: int, f: int) -> int:
    return cfg.seed + r * 1000 + f


def _fit_base(cfg, r, f, data):
    model = cfg.make_base(r)
    try:
        return model.fit(data, seed=_seed(cfg, r, f))
    except StacklineError as exc:
        where = "full training set" if f == cfg.n_folds else f"fold {f}"
        raise TrainingError(f"base learner {r} ({model.name}), {where}: {exc}") from exc


def build_meta_features(train: LabeledSet, cfg: StackingConfig):
    """Out-of-fold probability matrix (rows x base learners) and the fold assignment."""
    folds = stratified_folds(train.labels, cfg.n_folds, cfg.seed)
    R = len(cfg.base_learners)

    def job(rf):
        r, f = rf
        held = folds == f
        model = _fit_base(cfg, r, f, train.take(np.flatnonzero(~held)))
        return model.predict_proba(train.features[held])

    jobs = [(r, f) for r in range(R) for f in range(cfg.n_folds)]
    meta = np.empty((train.n_rows, R))
    for (r, f), proba in zip(jobs, run_jobs(job, jobs)):
        meta[folds == f, r] = proba
    return meta, folds


@dataclass
class StackingModel:
    bases: list[Learner]
    meta: LogRegModel
    folds: np.ndarray
    config: StackingConfig

    def meta_features(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise ShapeError(f"expected a 2-D feature matrix, got shape {X.shape}")
        return np.column_stack([b.predict_proba(X) for b in self.bases])

    def predict_proba(self, X) -> np.ndarray:
        return self.meta.predict_proba(self.meta_features(X))

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        return {
            "format": "stackline-stack",
            "version": 1,
            "config": self.config.to_dict(),
            "config_digest": self.config.digest(),
            "bases": [b.to_dict() for b in self.bases],
            "meta": self.meta.to_dict(),
            "folds": self.folds.tolist(),
        }

    @classmethod
    def from_dict(cls, doc) -> StackingModel:
        if doc.get("format") != "stackline-stack" or doc.get("version") != 1:
            raise SchemaError("not a version-1 stacked model document")
        c = doc["config"]
        config = StackingConfig(
            base_learners=c["base_learners"], n_folds=c["n_folds"], seed=c["seed"],
            meta_params=c["meta_params"],
        )
        meta = learner_from_dict(doc["meta"])
        return cls(
            [learner_from_dict(b) for b in doc["bases"]], meta,
            np.asarray(doc["folds"], dtype=np.int64), config,
        )


def stack_fit(train: LabeledSet, cfg: StackingConfig) -> StackingModel:
    meta_X, folds = build_meta_features(train, cfg)
    meta = cfg.make_meta()
    try:
        meta.fit(LabeledSet(meta_X, train.labels, [f"base{r}" for r in range(meta_X.shape[1])]),
                 seed=cfg.seed)
    except StacklineError as exc:
        raise TrainingError(f"meta-learner: {exc}") from exc
    R = len(cfg.base_learners)
    bases = run_jobs(lambda r: _fit_base(cfg, r, cfg.n_folds, train), list(range(R)))
    return StackingModel(bases, meta, folds, cfg)


def stack_predict_proba(model: StackingModel, X) -> np.ndarray:
    return model.predict_proba(X)
