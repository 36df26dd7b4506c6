"""Tabular containers, CSV I/O, seeded splitting and class balancing.

Randomness throughout the package comes from NumPy's ``PCG64`` bit
generator wrapped in ``numpy.random.Generator``; every stochastic
operation takes an explicit integer seed.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BalanceError, ConfigError, ParseError, PipelineError, SchemaError

NUMERIC = "numeric"
CATEGORICAL = "categorical"
MISSING_MARKERS = frozenset({"", "NA"})

Cell = float | str | None


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


@dataclass(frozen=True)
class Frame:
    """Row-major table with named, typed columns.

    Cells are ``float`` in numeric columns, ``str`` in categorical columns,
    and ``None`` where missing.
    """

    column_names: tuple[str, ...]
    column_kinds: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "column_names", tuple(self.column_names))
        object.__setattr__(self, "column_kinds", tuple(self.column_kinds))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if len(set(self.column_names)) != len(self.column_names):
            dupes = sorted({c for c in self.column_names if self.column_names.count(c) > 1})
            raise SchemaError(f"duplicate column names: {dupes}")
        if len(self.column_kinds) != len(self.column_names):
            raise SchemaError("column_kinds and column_names differ in length")
        for kind in self.column_kinds:
            if kind not in (NUMERIC, CATEGORICAL):
                raise SchemaError(f"unknown column kind {kind!r}")
        n_cols = len(self.column_names)
        for i, row in enumerate(self.rows):
            if len(row) != n_cols:
                raise SchemaError(f"row {i} has {len(row)} cells, expected {n_cols}")
            for cell, kind, name in zip(row, self.column_kinds, self.column_names):
                if cell is None:
                    continue
                if kind == NUMERIC and not isinstance(cell, float):
                    raise SchemaError(f"non-numeric cell {cell!r} in numeric column {name!r}")
                if kind == CATEGORICAL and not isinstance(cell, str):
                    raise SchemaError(f"non-text cell {cell!r} in categorical column {name!r}")

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.column_names)

    def index_of(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise SchemaError(f"no column named {name!r}") from None

    def kind_of(self, name: str) -> str:
        return self.column_kinds[self.index_of(name)]

    def column(self, name: str) -> list[Cell]:
        j = self.index_of(name)
        return [row[j] for row in self.rows]

    def take(self, indices: Iterable[int]) -> Frame:
        rows = self.rows
        return Frame(self.column_names, self.column_kinds, [rows[i] for i in indices])

    def drop(self, names: Iterable[str]) -> Frame:
        drop = set(names)
        keep = [j for j, c in enumerate(self.column_names) if c not in drop]
        return Frame(
            [self.column_names[j] for j in keep],
            [self.column_kinds[j] for j in keep],
            [[row[j] for j in keep] for row in self.rows],
        )

    def missing_count(self, name: str) -> int:
        return sum(cell is None for cell in self.column(name))


@dataclass(frozen=True)
class LabeledSet:
    """Model-ready dense features with binary labels."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        X = np.array(self.features, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.asarray(self.labels)
        if X.ndim != 2:
            raise SchemaError("features must be a 2-D matrix")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise SchemaError(f"{X.shape[0]} feature rows but {y.shape[0]} labels")
        if y.size and not np.all((y == 0) | (y == 1)):
            raise SchemaError("labels must be 0 or 1")
        y = y.astype(np.int64)
        names = tuple(self.feature_names) or tuple(f"x{j}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise SchemaError(f"{len(names)} feature names for {X.shape[1]} columns")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    def take(self, indices) -> LabeledSet:
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledSet(self.features[idx], self.labels[idx], self.feature_names)

    def select(self, names: Sequence[str]) -> LabeledSet:
        cols = []
        for name in names:
            if name not in self.feature_names:
                raise SchemaError(f"no feature named {name!r}")
            cols.append(self.feature_names.index(name))
        return LabeledSet(self.features[:, cols], self.labels, tuple(names))


@dataclass(frozen=True)
class SplitSpec:
    train_frac: float = 0.70
    test_frac: float = 0.20
    val_frac: float = 0.10
    seed: int = 0

    def __post_init__(self):
        fracs = (self.train_frac, self.test_frac, self.val_frac)
        if any(not 0.0 <= f <= 1.0 for f in fracs):
            raise ConfigError(f"split fractions must lie in [0, 1], got {fracs}")
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise ConfigError(f"split fractions must sum to 1, got {sum(fracs)!r}")


def _parse_number(text: str) -> float | None:
    try:
        value = float(text)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def read_csv(path, schema_hint: Mapping[str, str] | None = None) -> Frame:
    """Read a headed, comma-delimited UTF-8 file into a ``Frame``.

    ``""`` and ``"NA"`` are missing. A column is numeric when every
    non-missing cell parses as a finite number, unless ``schema_hint``
    says otherwise.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        return _read(fh, schema_hint)


def read_csv_text(text: str, schema_hint: Mapping[str, str] | None = None) -> Frame:
    return _read(io.StringIO(text, newline=""), schema_hint)


def _read(fh, schema_hint) -> Frame:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty file: no header row", row=1) from None
    if len(set(header)) != len(header):
        dupes = sorted({c for c in header if header.count(c) > 1})
        raise SchemaError(f"duplicate header names: {dupes}")
    raw = []
    for i, record in enumerate(reader, start=2):
        if not record:
            continue
        if len(record) != len(header):
            raise ParseError(
                f"row {i} has {len(record)} fields, header has {len(header)}", row=i
            )
        raw.append(record)

    hint = dict(schema_hint or {})
    unknown = set(hint) - set(header)
    if unknown:
        raise SchemaError(f"schema hint names unknown columns: {sorted(unknown)}")
    kinds = []
    columns = []
    for j, name in enumerate(header):
        texts = [rec[j] for rec in raw]
        parsed = [None if t in MISSING_MARKERS else _parse_number(t) for t in texts]
        all_numeric = all(p is not None for p, t in zip(parsed, texts) if t not in MISSING_MARKERS)
        kind = hint.get(name, NUMERIC if all_numeric else CATEGORICAL)
        if kind == NUMERIC:
            if not all_numeric:
                bad = next(t for p, t in zip(parsed, texts) if p is None and t not in MISSING_MARKERS)
                raise SchemaError(f"column {name!r} forced numeric but holds {bad!r}")
            columns.append(parsed)
        elif kind == CATEGORICAL:
            columns.append([None if t in MISSING_MARKERS else t for t in texts])
        else:
            raise SchemaError(f"unknown column kind {kind!r} for {name!r}")
        kinds.append(kind)
    rows = list(zip(*columns)) if columns else []
    return Frame(header, kinds, rows if raw else [])


def format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _format_cell(cell: Cell) -> str:
    if cell is None:
        return ""
    if isinstance(cell, float):
        return format_number(cell)
    return cell


def to_csv_text(frame: Frame) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(frame.column_names)
    for row in frame.rows:
        writer.writerow([_format_cell(c) for c in row])
    return buf.getvalue()


def write_csv(frame: Frame, path) -> None:
    Path(path).write_text(to_csv_text(frame), encoding="utf-8")


def labeled_to_frame(data: LabeledSet, target: str) -> Frame:
    names = list(data.feature_names) + [target]
    rows = [
        [float(v) for v in x] + [float(t)]
        for x, t in zip(data.features.tolist(), data.labels.tolist())
    ]
    return Frame(names, [NUMERIC] * len(names), rows)


def frame_to_labeled(frame: Frame, target: str) -> LabeledSet:
    """Inverse of ``labeled_to_frame`` for all-numeric frames."""
    if any(k != NUMERIC for k in frame.column_kinds):
        raise SchemaError("encoded frames must be all-numeric")
    j = frame.index_of(target)
    arr = np.array(frame.rows, dtype=float).reshape(frame.n_rows, frame.n_cols)
    if np.isnan(arr).any():
        raise SchemaError("encoded frame contains missing cells")
    names = [c for c in frame.column_names if c != target]
    return LabeledSet(np.delete(arr, j, axis=1), arr[:, j].astype(np.int64), names)


def split(frame: Frame, spec: SplitSpec) -> tuple[Frame, Frame, Frame]:
    """Shuffle rows with ``spec.seed`` and cut them into train/test/val."""
    n = frame.n_rows
    if n < 10:
        raise PipelineError(f"split needs at least 10 rows, got {n}")
    n_test = math.floor(spec.test_frac * n + 1e-9)
    n_val = math.floor(spec.val_frac * n + 1e-9)
    n_train = n - n_test - n_val
    order = make_rng(spec.seed).permutation(n)
    return (
        frame.take(order[:n_train]),
        frame.take(order[n_train:n_train + n_test]),
        frame.take(order[n_train + n_test:]),
    )


def balanced_indices(labels: np.ndarray, seed: int) -> np.ndarray:
    """Indices that undersample the majority class to the minority count."""
    labels = np.asarray(labels)
    pos = np.flatnonzero(labels == 1)
    neg = np.flatnonzero(labels == 0)
    if pos.size == 0 or neg.size == 0:
        raise BalanceError("balancing needs both classes present")
    rng = make_rng(seed)
    m = min(pos.size, neg.size)
    if pos.size > m:
        pos = np.sort(rng.choice(pos, size=m, replace=False))
    elif neg.size > m:
        neg = np.sort(rng.choice(neg, size=m, replace=False))
    return rng.permutation(np.concatenate([pos, neg]))


def balance(data: LabeledSet, seed: int) -> LabeledSet:
    return data.take(balanced_indices(data.labels, seed))
