"""Seeded synthetic survey-like data with a known amount of signal.

Informative numeric features are unit-variance Gaussians centred at +1 for
the positive class and -1 for the negative class; noise features are
standard normal for both. Categorical columns draw from per-class weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .frame import CATEGORICAL, NUMERIC, Frame, make_rng

TARGET = "Depression"


@dataclass
class CategoricalSpec:
    name: str
    categories: list[str]
    positive_weights: list[float]
    negative_weights: list[float]

    def __post_init__(self):
        k = len(self.categories)
        if k == 0 or len(self.positive_weights) != k or len(self.negative_weights) != k:
            raise ConfigError(f"categorical {self.name!r}: one weight per category required")
        for w in (self.positive_weights, self.negative_weights):
            if min(w) < 0 or sum(w) <= 0:
                raise ConfigError(f"categorical {self.name!r}: weights must be non-negative, not all 0")


def default_categoricals() -> list[CategoricalSpec]:
    return [
        CategoricalSpec(
            "Sleep Duration",
            ["Less than 5 hours", "5-6 hours", "7-8 hours", "More than 8 hours"],
            [0.35, 0.30, 0.20, 0.15],
            [0.15, 0.20, 0.30, 0.35],
        ),
        CategoricalSpec(
            "Dietary Habits",
            ["Unhealthy", "Moderate", "Healthy"],
            [0.5, 0.3, 0.2],
            [0.2, 0.3, 0.5],
        ),
        CategoricalSpec(
            "Have you ever had suicidal thoughts ?",
            ["Yes", "No"],
            [0.7, 0.3],
            [0.3, 0.7],
        ),
    ]


@dataclass
class SynthConfig:
    n_rows: int = 2000
    class_balance: float = 0.5
    informative_features: int = 5
    noise_features: int = 5
    categorical_specs: list[CategoricalSpec] = field(default_factory=default_categoricals)
    missing_rate: float | dict[str, float] = 0.0
    seed: int = 0
    separation: float = 1.0

    def __post_init__(self):
        if self.n_rows < 2:
            raise ConfigError(f"n_rows must be >= 2, got {self.n_rows}")
        if not 0.0 < self.class_balance < 1.0:
            raise ConfigError(f"class_balance must lie strictly between 0 and 1, got {self.class_balance}")
        if self.informative_features < 0 or self.noise_features < 0:
            raise ConfigError("feature counts must be non-negative")
        self.categorical_specs = [
            s if isinstance(s, CategoricalSpec) else CategoricalSpec(**s)
            for s in self.categorical_specs
        ]
        rates = self.missing_rate.values() if isinstance(self.missing_rate, dict) else [self.missing_rate]
        if any(not 0.0 <= r <= 1.0 for r in rates):
            raise ConfigError("missing rates must lie in [0, 1]")

    def positive_count(self) -> int:
        n_pos = math.floor(self.n_rows * self.class_balance + 1e-9)
        if n_pos == 0 or n_pos == self.n_rows:
            raise ConfigError("class_balance leaves one class empty")
        return n_pos


def generate(cfg: SynthConfig) -> Frame:
    rng = make_rng(cfg.seed)
    n = cfg.n_rows
    n_pos = cfg.positive_count()
    labels = rng.permutation(np.r_[np.ones(n_pos, dtype=np.int64), np.zeros(n - n_pos, dtype=np.int64)])
    sign = np.where(labels == 1, 1.0, -1.0)

    names, kinds, columns = [], [], []
    for i in range(cfg.informative_features):
        values = sign * cfg.separation + rng.standard_normal(n)
        names.append(f"informative_{i + 1}")
        kinds.append(NUMERIC)
        columns.append([round(float(v), 4) for v in values])
    for i in range(cfg.noise_features):
        names.append(f"noise_{i + 1}")
        kinds.append(NUMERIC)
        columns.append([round(float(v), 4) for v in rng.standard_normal(n)])
    for spec in cfg.categorical_specs:
        pw = np.asarray(spec.positive_weights, dtype=float)
        nw = np.asarray(spec.negative_weights, dtype=float)
        draws_pos = rng.choice(len(spec.categories), size=n, p=pw / pw.sum())
        draws_neg = rng.choice(len(spec.categories), size=n, p=nw / nw.sum())
        codes = np.where(labels == 1, draws_pos, draws_neg)
        names.append(spec.name)
        kinds.append(CATEGORICAL)
        columns.append([spec.categories[c] for c in codes])

    for j, name in enumerate(names):
        rate = cfg.missing_rate.get(name, 0.0) if isinstance(cfg.missing_rate, dict) else cfg.missing_rate
        n_missing = math.floor(rate * n + 1e-9)
        if n_missing:
            for i in rng.choice(n, size=n_missing, replace=False):
                columns[j][i] = None

    names.append(TARGET)
    kinds.append(CATEGORICAL)
    columns.append(["Yes" if t == 1 else "No" for t in labels])
    return Frame(names, kinds, list(zip(*columns)))
