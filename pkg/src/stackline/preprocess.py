"""Cleaning, categorical encoding and quantile binning."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, PipelineError, SchemaError
from .frame import CATEGORICAL, NUMERIC, Frame, LabeledSet, format_number

log = logging.getLogger(__name__)

# Identifier-like columns of the professional-survey export.
DEFAULT_DROP_COLUMNS = (
    "Name",
    "Working Professional or Student",
    "City",
    "Profession",
    "Degree",
)

DEFAULT_ORDINAL_MAPS = {
    "Sleep Duration": ["Less than 5 hours", "5-6 hours", "7-8 hours", "More than 8 hours"],
    "Dietary Habits": ["Unhealthy", "Moderate", "Healthy"],
}


@dataclass
class PreprocessConfig:
    drop_columns: list[str] = field(default_factory=lambda: list(DEFAULT_DROP_COLUMNS))
    null_col_threshold: float = 0.60
    ordinal_maps: dict[str, list[str]] = field(
        default_factory=lambda: {k: list(v) for k, v in DEFAULT_ORDINAL_MAPS.items()}
    )
    n_bins: int = 5
    scale: str = "none"

    def __post_init__(self):
        if not 0.0 <= self.null_col_threshold <= 1.0:
            raise ConfigError(f"null_col_threshold must be in [0, 1], got {self.null_col_threshold}")
        if int(self.n_bins) != self.n_bins or self.n_bins < 2:
            raise ConfigError(f"n_bins must be an integer >= 2, got {self.n_bins}")
        if self.scale not in ("none", "minmax"):
            raise ConfigError(f"scale must be 'none' or 'minmax', got {self.scale!r}")


@dataclass
class CleanReport:
    """Shape trail of one ``clean`` call."""

    shapes: list[tuple[str, int, int]] = field(default_factory=list)
    dropped_named: list[str] = field(default_factory=list)
    ignored_named: list[str] = field(default_factory=list)
    dropped_sparse: list[str] = field(default_factory=list)
    rows_dropped: int = 0

    def to_dict(self):
        return {
            "shapes": [{"step": s, "rows": r, "cols": c} for s, r, c in self.shapes],
            "dropped_named_columns": self.dropped_named,
            "ignored_named_columns": self.ignored_named,
            "dropped_sparse_columns": self.dropped_sparse,
            "rows_dropped": self.rows_dropped,
        }


def clean(frame: Frame, cfg: PreprocessConfig, report: CleanReport | None = None) -> Frame:
    """Drop named columns, then sparse columns, then incomplete rows."""
    report = report if report is not None else CleanReport()
    report.shapes.append(("raw", frame.n_rows, frame.n_cols))
    if frame.n_rows == 0 or frame.n_cols == 0:
        raise PipelineError("cannot clean an empty frame")

    present = [c for c in cfg.drop_columns if c in frame.column_names]
    report.dropped_named = present
    report.ignored_named = [c for c in cfg.drop_columns if c not in frame.column_names]
    if report.ignored_named:
        log.info("drop list names absent columns, ignored: %s", report.ignored_named)
    frame = frame.drop(present)
    report.shapes.append(("drop_columns", frame.n_rows, frame.n_cols))

    sparse = [
        c for c in frame.column_names
        if frame.missing_count(c) / frame.n_rows > cfg.null_col_threshold
    ]
    report.dropped_sparse = sparse
    frame = frame.drop(sparse)
    report.shapes.append(("drop_sparse_columns", frame.n_rows, frame.n_cols))

    complete = [i for i, row in enumerate(frame.rows) if all(c is not None for c in row)]
    report.rows_dropped = frame.n_rows - len(complete)
    frame = frame.take(complete)
    report.shapes.append(("drop_incomplete_rows", frame.n_rows, frame.n_cols))
    log.info(
        "clean: dropped columns %s + %s, %d incomplete rows",
        present, sparse, report.rows_dropped,
    )
    if frame.n_rows == 0 or frame.n_cols == 0:
        raise PipelineError(
            f"frame is empty after cleaning ({frame.n_rows} rows x {frame.n_cols} columns)"
        )
    return frame


@dataclass
class FeatureCoding:
    name: str
    kind: str
    categories: list[str] = field(default_factory=list)
    edges: list[float] = field(default_factory=list)

    def to_dict(self):
        d = {"name": self.name, "kind": self.kind}
        if self.kind == CATEGORICAL:
            d["categories"] = list(self.categories)
        else:
            d["edges"] = [format(e, ".17g") for e in self.edges]
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(
            d["name"], d["kind"], list(d.get("categories", [])),
            [float(e) for e in d.get("edges", [])],
        )


@dataclass
class FittedEncoder:
    """Category codes and bin edges learned from the training split."""

    target: str
    positive_label: str
    negative_label: str
    features: list[FeatureCoding]

    @property
    def feature_names(self) -> list[str]:
        return [f.name for f in self.features]

    def coding(self, name: str) -> FeatureCoding:
        for f in self.features:
            if f.name == name:
                return f
        raise SchemaError(f"encoder has no feature {name!r}")

    def bin_codes(self, name: str, values) -> tuple[np.ndarray, int]:
        """Discrete codes for chi-square tables and the number of codes possible."""
        coding = self.coding(name)
        values = np.asarray(values, dtype=float)
        if coding.kind == CATEGORICAL:
            return values.astype(np.int64), len(coding.categories) + 1
        codes = np.searchsorted(np.asarray(coding.edges, dtype=float), values, side="right")
        return codes.astype(np.int64), len(coding.edges) + 1

    def to_dict(self):
        return {
            "target": self.target,
            "positive_label": self.positive_label,
            "negative_label": self.negative_label,
            "features": [f.to_dict() for f in self.features],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            d["target"], d["positive_label"], d["negative_label"],
            [FeatureCoding.from_dict(f) for f in d["features"]],
        )


def _label_text(cell) -> str:
    return format_number(cell) if isinstance(cell, float) else str(cell)


def fit_encoder(train: Frame, cfg: PreprocessConfig, target: str,
                positive_label: str = "Yes") -> FittedEncoder:
    if train.n_rows == 0:
        raise PipelineError("cannot fit an encoder on an empty training split")
    target_values = [_label_text(v) for v in train.column(target)]
    distinct = list(dict.fromkeys(target_values))
    if len(distinct) != 2 or positive_label not in distinct:
        raise SchemaError(
            f"target {target!r} must hold exactly two values including {positive_label!r}, "
            f"found {distinct}"
        )
    negative_label = next(v for v in distinct if v != positive_label)

    features = []
    for name, kind in zip(train.column_names, train.column_kinds):
        if name == target:
            continue
        values = train.column(name)
        if any(v is None for v in values):
            raise SchemaError(f"column {name!r} has missing cells; clean before encoding")
        if kind == CATEGORICAL:
            seen = list(dict.fromkeys(values))
            if name in cfg.ordinal_maps:
                order = list(cfg.ordinal_maps[name])
                extra = [v for v in seen if v not in order]
                if extra:
                    log.warning("column %r has values outside its ordinal map: %s", name, extra)
                categories = order + extra
            else:
                categories = seen
            if len(seen) == 1:
                log.warning("column %r has a single category; encoded as constant", name)
            features.append(FeatureCoding(name, CATEGORICAL, categories=categories))
        else:
            arr = np.asarray(values, dtype=float)
            qs = np.arange(1, cfg.n_bins) / cfg.n_bins
            edges = np.unique(np.quantile(arr, qs))
            features.append(FeatureCoding(name, NUMERIC, edges=edges.tolist()))
    return FittedEncoder(target, positive_label, negative_label, features)


def encode_features(frame: Frame, enc: FittedEncoder) -> np.ndarray:
    """Numeric feature matrix in encoder column order; target not required."""
    cols = []
    for coding in enc.features:
        values = frame.column(coding.name)
        if frame.kind_of(coding.name) != coding.kind:
            raise SchemaError(
                f"column {coding.name!r} is {frame.kind_of(coding.name)}, encoder expects {coding.kind}"
            )
        for i, v in enumerate(values):
            if v is None:
                raise SchemaError(f"missing cell in column {coding.name!r} at row {i}")
        if coding.kind == CATEGORICAL:
            lookup = {c: k for k, c in enumerate(coding.categories)}
            reserved = len(coding.categories)
            cols.append([float(lookup.get(v, reserved)) for v in values])
        else:
            cols.append(values)
    if not cols:
        return np.zeros((frame.n_rows, 0))
    return np.array(cols, dtype=float).T.reshape(frame.n_rows, len(cols))


def transform(frame: Frame, enc: FittedEncoder) -> LabeledSet:
    X = encode_features(frame, enc)
    labels = []
    for i, v in enumerate(frame.column(enc.target)):
        text = None if v is None else _label_text(v)
        if text == enc.positive_label:
            labels.append(1)
        elif text == enc.negative_label:
            labels.append(0)
        else:
            raise SchemaError(
                f"target {enc.target!r} is not binary: row {i} holds {text!r}, "
                f"expected {enc.positive_label!r} or {enc.negative_label!r}"
            )
    return LabeledSet(X, np.asarray(labels, dtype=np.int64), enc.feature_names)


@dataclass
class MinMaxScaler:
    """Per-column affine map of the training range onto [0, 1]."""

    mins: list[float]
    spans: list[float]

    @classmethod
    def fit(cls, X) -> MinMaxScaler:
        X = np.asarray(X, dtype=float)
        lo = X.min(axis=0)
        span = X.max(axis=0) - lo
        span[span == 0] = 1.0
        return cls(lo.tolist(), span.tolist())

    def apply(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - np.asarray(self.mins)) / np.asarray(self.spans)

    def to_dict(self):
        return {
            "mins": [format(v, ".17g") for v in self.mins],
            "spans": [format(v, ".17g") for v in self.spans],
        }

    @classmethod
    def from_dict(cls, d):
        return cls([float(v) for v in d["mins"]], [float(v) for v in d["spans"]])
