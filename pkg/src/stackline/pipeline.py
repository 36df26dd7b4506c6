"""Pipeline configuration and the stages behind each CLI command.

Artifacts land in ``output_dir``::

    train.csv test.csv val.csv   encoded splits (features + 0/1 target)
    encoder.json                 category codes and bin edges
    chi2.csv chi2.svg            per-feature test results
    selected.json                kept feature names
    model.json                   pipeline envelope around the stacked model
    models/*.json                each fitted base learner and the meta-learner
    report_<split>.json          evaluation report
    roc_<split>.svg confusion_<split>.svg
    comparison.csv comparison.txt comparison.svg roc_compare.svg
    manifest-<command>.json      run manifest

Seeds: the split uses ``seed``, balancing ``seed + 1``, stacking
``seed + 2`` and the standalone models of ``compare`` ``seed + 3 + i``.
"""

from __future__ import annotations

import copy
import csv
import hashlib
import io
import json
import logging
import os
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import plots
from .chi2 import select_features
from .errors import ConfigError, SchemaError, StacklineError
from .frame import (
    NUMERIC,
    Frame,
    LabeledSet,
    SplitSpec,
    balanced_indices,
    format_number,
    frame_to_labeled,
    labeled_to_frame,
    read_csv,
    split,
    to_csv_text,
)
from .learners import make_learner
from .metrics import evaluate
from .preprocess import (
    CleanReport,
    FittedEncoder,
    MinMaxScaler,
    PreprocessConfig,
    clean,
    encode_features,
    fit_encoder,
    transform,
)
from .stacking import DEFAULT_BASES, StackingConfig, StackingModel, stack_fit

log = logging.getLogger(__name__)

PIPELINE_FORMAT = "stackline-pipeline"

# Display names in the order of the published comparison table.
COMPARE_MODELS = (
    ("Logistic Regression", "logreg"),
    ("K-Nearest Neighbors", "knn"),
    ("SVM", "svm"),
    ("Gradient Boosting", "gboost"),
    ("AdaBoost", "adaboost"),
    ("Naive Bayes", "naive_bayes"),
    ("MLP Classifier", "mlp"),
    ("Stacking Ensemble", "stacking"),
)


@dataclass
class PipelineConfig:
    input: str | None = None
    target: str = "Depression"
    positive_label: str = "Yes"
    output_dir: str = "stackline-out"
    seed: int = 42
    schema_hint: dict = field(default_factory=dict)
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    split: dict = field(default_factory=lambda: {"train": 0.70, "test": 0.20, "val": 0.10})
    alpha: float = 0.05
    stacking: dict = field(default_factory=lambda: {"base_learners": list(DEFAULT_BASES), "n_folds": 5})
    learners: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> PipelineConfig:
        d = copy.deepcopy(d)
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        pre = d.pop("preprocess", {})
        if not isinstance(pre, dict):
            raise ConfigError("'preprocess' must be an object")
        try:
            pre_cfg = PreprocessConfig(**pre)
        except TypeError as exc:
            raise ConfigError(f"preprocess: {exc}") from None
        cfg = cls(preprocess=pre_cfg, **d)
        cfg.split_spec()
        cfg.stacking_config()
        for name, params in cfg.learners.items():
            make_learner(name, **params)
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()

    def split_spec(self) -> SplitSpec:
        s = self.split
        unknown = set(s) - {"train", "test", "val"}
        if unknown:
            raise ConfigError(f"unknown split keys: {sorted(unknown)}")
        return SplitSpec(s.get("train", 0.7), s.get("test", 0.2), s.get("val", 0.1), self.seed)

    def stacking_config(self) -> StackingConfig:
        s = dict(self.stacking)
        unknown = set(s) - {"base_learners", "n_folds", "meta_params"}
        if unknown:
            raise ConfigError(f"unknown stacking keys: {sorted(unknown)}")
        return StackingConfig(
            base_learners=list(s.get("base_learners", DEFAULT_BASES)),
            n_folds=s.get("n_folds", 5),
            seed=self.seed + 2,
            learner_params=self.learners,
            meta_params=s.get("meta_params", self.learners.get("logreg", {})),
        )


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(d: dict, assignments) -> dict:
    """Apply ``dotted.path=value`` assignments; values parse as JSON when they can."""
    d = copy.deepcopy(d)
    for item in assignments or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        parts = key.strip().split(".")
        node = d
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r} descends into a non-object")
        node[parts[-1]] = _parse_value(raw)
    return d


def load_config(path=None, overrides=()) -> PipelineConfig:
    data = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file {path} does not exist") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    return PipelineConfig.from_dict(apply_overrides(data, overrides))


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_json(path, doc) -> None:
    atomic_write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


class Run:
    """Collects stage timings, counts and artifacts for one command's manifest."""

    def __init__(self, cfg: PipelineConfig, command: str):
        self.cfg = cfg
        self.command = command
        self.out = Path(cfg.output_dir)
        self.stages: list[str] = []
        self.timings: dict[str, float] = {}
        self.counts: dict = {}
        self.artifacts: list[str] = []
        self._current = None

    def stage(self, name):
        run = self

        class _Stage:
            def __enter__(self):
                run._current = name
                self.t0 = time.perf_counter()

            def __exit__(self, exc_type, exc, tb):
                run.timings[name] = round(time.perf_counter() - self.t0, 6)
                if exc_type is None:
                    run.stages.append(name)
                    run._current = None
                return False

        return _Stage()

    def path(self, name) -> Path:
        return self.out / name

    def wrote(self, name):
        if name not in self.artifacts:
            self.artifacts.append(name)

    def write_text(self, name, text):
        atomic_write(self.path(name), text)
        self.wrote(name)

    def write_json(self, name, doc):
        write_json(self.path(name), doc)
        self.wrote(name)

    def manifest(self, error=None) -> dict:
        doc = {
            "command": self.command,
            "config_digest": self.cfg.digest(),
            "completed_stages": self.stages,
            "counts": self.counts,
            "artifacts": [
                {"path": a, "sha256": sha256_file(self.path(a))}
                for a in sorted(self.artifacts) if self.path(a).exists()
            ],
            "timings": self.timings,
        }
        if error is not None:
            doc["failed_stage"] = self._current
            doc["error"] = str(error)
        return doc

    def finish(self, error=None):
        self.out.mkdir(parents=True, exist_ok=True)
        write_json(self.path(f"manifest-{self.command}.json"), self.manifest(error))


def _target_labels(frame: Frame, cfg: PipelineConfig) -> np.ndarray:
    values = frame.column(cfg.target)
    text = [format_number(v) if isinstance(v, float) else v for v in values]
    return np.array([1 if v == cfg.positive_label else 0 for v in text], dtype=np.int64)


def check_input(cfg: PipelineConfig) -> Path:
    if not cfg.input:
        raise ConfigError("no input CSV configured (set 'input' in the config or use --set input=PATH)")
    path = Path(cfg.input)
    if not path.is_file():
        raise ConfigError(f"input file {path} does not exist")
    return path


def preprocess_stage(run: Run) -> dict:
    """clean -> split -> balance(train) -> fit encoder(train) -> transform every split."""
    cfg = run.cfg
    path = check_input(cfg)
    with run.stage("read"):
        frame = read_csv(path, cfg.schema_hint)
    with run.stage("clean"):
        report = CleanReport()
        cleaned = clean(frame, cfg.preprocess, report)
        if cfg.target not in cleaned.column_names:
            raise SchemaError(f"target column {cfg.target!r} is missing after cleaning")
        run.counts["clean"] = report.to_dict()
    with run.stage("split"):
        train_f, test_f, val_f = split(cleaned, cfg.split_spec())
        run.counts["split"] = {"train": train_f.n_rows, "test": test_f.n_rows, "val": val_f.n_rows}
    with run.stage("balance"):
        idx = balanced_indices(_target_labels(train_f, cfg), cfg.seed + 1)
        train_f = train_f.take(idx)
        run.counts["balanced_train"] = {
            "rows": train_f.n_rows,
            "positives": int(_target_labels(train_f, cfg).sum()),
        }
    with run.stage("encode"):
        enc = fit_encoder(train_f, cfg.preprocess, cfg.target, cfg.positive_label)
        sets = {"train": transform(train_f, enc), "test": transform(test_f, enc),
                "val": transform(val_f, enc)}
    run.out.mkdir(parents=True, exist_ok=True)
    for name, data in sets.items():
        run.write_text(f"{name}.csv", to_csv_text(labeled_to_frame(data, cfg.target)))
    run.write_json("encoder.json", enc.to_dict())
    return {"encoder": enc, **sets}


def load_split(run: Run, name: str) -> LabeledSet:
    path = run.path(f"{name}.csv")
    if not path.is_file():
        raise ConfigError(f"{path} not found; run 'preprocess' first")
    return frame_to_labeled(read_csv(path), run.cfg.target)


def load_encoder(run: Run) -> FittedEncoder:
    path = run.path("encoder.json")
    if not path.is_file():
        raise ConfigError(f"{path} not found; run 'preprocess' first")
    return FittedEncoder.from_dict(json.loads(path.read_text(encoding="utf-8")))


def chi2_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["feature", "statistic", "dof", "p_value", "kept"])
    for r in results:
        w.writerow([r.feature_name, repr(r.statistic), r.dof, repr(r.p_value), int(r.kept)])
    return buf.getvalue()


def select_stage(run: Run, train: LabeledSet | None = None, enc: FittedEncoder | None = None):
    train = train if train is not None else load_split(run, "train")
    enc = enc if enc is not None else load_encoder(run)
    with run.stage("select"):
        kept, results = select_features(train, enc, run.cfg.alpha)
    run.write_text("chi2.csv", chi2_csv(results))
    plots.chi2_bar_chart(results, run.path("chi2.svg"), run.cfg.alpha)
    run.wrote("chi2.svg")
    run.write_json("selected.json", {"alpha": run.cfg.alpha, "features": kept})
    run.counts["selected_features"] = len(kept)
    return kept, results


def load_selected(run: Run) -> list[str]:
    path = run.path("selected.json")
    if not path.is_file():
        raise ConfigError(f"{path} not found; run 'select' first")
    return json.loads(path.read_text(encoding="utf-8"))["features"]


@dataclass
class PipelineModel:
    """Fitted stack plus everything needed to score raw survey rows."""

    encoder: FittedEncoder
    features: list[str]
    scaler: MinMaxScaler | None
    stack: StackingModel

    def matrix(self, data: LabeledSet) -> np.ndarray:
        X = data.select(self.features).features
        return self.scaler.apply(X) if self.scaler else X

    def raw_matrix(self, frame: Frame) -> np.ndarray:
        X = encode_features(frame, self.encoder)
        cols = [self.encoder.feature_names.index(f) for f in self.features]
        X = X[:, cols]
        return self.scaler.apply(X) if self.scaler else X

    def to_dict(self) -> dict:
        return {
            "format": PIPELINE_FORMAT,
            "version": 1,
            "encoder": self.encoder.to_dict(),
            "features": list(self.features),
            "scaler": self.scaler.to_dict() if self.scaler else None,
            "stack": self.stack.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc) -> PipelineModel:
        if doc.get("format") != PIPELINE_FORMAT or doc.get("version") != 1:
            raise SchemaError("not a version-1 pipeline model document")
        scaler = MinMaxScaler.from_dict(doc["scaler"]) if doc.get("scaler") else None
        return cls(FittedEncoder.from_dict(doc["encoder"]), doc["features"], scaler,
                   StackingModel.from_dict(doc["stack"]))


def load_model(path) -> PipelineModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"model file {path} does not exist") from None
    return PipelineModel.from_dict(doc)


def _fit_scaler(cfg, X):
    return MinMaxScaler.fit(X) if cfg.preprocess.scale == "minmax" else None


def train_stage(run: Run, train=None, enc=None, kept=None) -> PipelineModel:
    cfg = run.cfg
    train = train if train is not None else load_split(run, "train")
    enc = enc if enc is not None else load_encoder(run)
    kept = kept if kept is not None else load_selected(run)
    data = train.select(kept)
    scaler = _fit_scaler(cfg, data.features)
    if scaler:
        data = LabeledSet(scaler.apply(data.features), data.labels, data.feature_names)
    with run.stage("train"):
        stack = stack_fit(data, cfg.stacking_config())
    model = PipelineModel(enc, list(kept), scaler, stack)
    run.write_json("model.json", model.to_dict())
    for r, base in enumerate(stack.bases):
        run.write_json(f"models/{r}_{base.name}.json", base.to_dict())
    run.write_json("models/meta_logreg.json", stack.meta.to_dict())
    return model


def evaluate_stage(run: Run, model: PipelineModel, split_name: str = "test", data=None) -> dict:
    if split_name not in ("train", "test", "val"):
        raise ConfigError(f"unknown split {split_name!r}")
    data = data if data is not None else load_split(run, split_name)
    with run.stage(f"evaluate_{split_name}"):
        X = model.matrix(data)
        report = evaluate(data.labels, model.stack.predict_proba(X))
        doc = {"split": split_name, "n_rows": data.n_rows, "model": "stacking", **report.to_dict()}
        curves = {"Stacking": (report.roc_points, report.auc)}
        doc["bases"] = {}
        for base in model.stack.bases:
            rep = evaluate(data.labels, base.predict_proba(X))
            doc["bases"][base.name] = {
                "confusion": rep.matrix.to_dict(), "scores": rep.scores.to_dict(), "auc": rep.auc,
            }
            curves[base.name] = (rep.roc_points, rep.auc)
    run.write_json(f"report_{split_name}.json", doc)
    plots.roc_chart(curves, run.path(f"roc_{split_name}.svg"))
    run.wrote(f"roc_{split_name}.svg")
    plots.confusion_chart(report.matrix, run.path(f"confusion_{split_name}.svg"),
                          title=f"Stacking ensemble, {split_name} split")
    run.wrote(f"confusion_{split_name}.svg")
    return doc


def _fmt_pct(x: float) -> str:
    return f"{100 * x:.2f}"


def comparison_text(rows) -> str:
    header = ["Model", "Acc.", "Prec.", "Recall", "F1"]
    body = [[r["model"]] + [_fmt_pct(r[k]) for k in ("accuracy", "precision", "recall", "f1")]
            for r in rows]
    widths = [max(len(line[i]) for line in [header] + body) for i in range(5)]
    lines = []
    for line in [header] + body:
        cells = [line[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(line[1:], widths[1:])]
        lines.append("  ".join(cells))
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def comparison_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", "accuracy", "precision", "recall", "f1"])
    for r in rows:
        w.writerow([r["model"]] + [repr(r[k]) for k in ("accuracy", "precision", "recall", "f1")])
    return buf.getvalue()


def compare_stage(run: Run, train: LabeledSet, test: LabeledSet, kept, average="weighted"):
    """Fit every comparison model on identical data and score each on ``test``."""
    cfg = run.cfg
    data = train.select(kept)
    test = test.select(kept)
    scaler = _fit_scaler(cfg, data.features)
    if scaler:
        data = LabeledSet(scaler.apply(data.features), data.labels, data.feature_names)
        test = LabeledSet(scaler.apply(test.features), test.labels, test.feature_names)
    rows, curves = [], {}
    for i, (label, name) in enumerate(COMPARE_MODELS):
        with run.stage(f"compare_{name}"):
            if name == "stacking":
                model = stack_fit(data, cfg.stacking_config())
            else:
                model = make_learner(name, **cfg.learners.get(name, {})).fit(data, seed=cfg.seed + 3 + i)
            report = evaluate(test.labels, model.predict_proba(test.features))
        acc, prec, rec, f1 = report.scores.as_tuple(average)
        rows.append({"model": label, "accuracy": acc, "precision": prec, "recall": rec,
                     "f1": f1, "auc": report.auc})
        curves[label] = (report.roc_points, report.auc)
    run.write_text("comparison.csv", comparison_csv(rows))
    run.write_text("comparison.txt", comparison_text(rows))
    plots.comparison_chart(rows, run.path("comparison.svg"))
    run.wrote("comparison.svg")
    plots.roc_chart(curves, run.path("roc_compare.svg"))
    run.wrote("roc_compare.svg")
    return rows


def run_pipeline(cfg: PipelineConfig) -> dict:
    """preprocess -> select -> train -> evaluate(test), as one command."""
    run = Run(cfg, "run")
    try:
        sets = preprocess_stage(run)
        kept, results = select_stage(run, sets["train"], sets["encoder"])
        model = train_stage(run, sets["train"], sets["encoder"], kept)
        report = evaluate_stage(run, model, "test", sets["test"])
    except StacklineError as exc:
        run.finish(exc)
        raise
    run.finish()
    return {"run": run, "model": model, "report": report, "chi2": results, "kept": kept}


def predict_rows(model: PipelineModel, path) -> str:
    """Score a raw CSV; returns its text with ``proba`` and ``label`` columns appended."""
    hint = {f.name: f.kind for f in model.encoder.features}
    with open(path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), [])
    frame = read_csv(path, {k: v for k, v in hint.items() if k in header})
    missing = [f for f in model.encoder.feature_names if f not in frame.column_names]
    if missing:
        raise SchemaError(f"input lacks encoder columns: {missing}")
    proba = model.stack.predict_proba(model.raw_matrix(frame))
    names = list(frame.column_names) + ["proba", "label"]
    kinds = list(frame.column_kinds) + [NUMERIC, NUMERIC]
    rows = [list(r) + [float(p), float(p >= 0.5)] for r, p in zip(frame.rows, proba)]
    return to_csv_text(Frame(names, kinds, rows))

