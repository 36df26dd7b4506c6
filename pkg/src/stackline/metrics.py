"""Confusion matrix, threshold metrics and ROC analysis for binary labels (positive = 1)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, StatError


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def to_dict(self):
        return {"tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn}


def _binary_vector(v, what):
    v = np.asarray(v)
    if v.ndim != 1:
        raise ShapeError(f"{what} must be a vector")
    if v.size and not np.all((v == 0) | (v == 1)):
        raise StatError(f"{what} must hold only 0 and 1")
    return v.astype(np.int64)


def confusion(labels, predictions) -> ConfusionMatrix:
    y = _binary_vector(labels, "labels")
    p = _binary_vector(predictions, "predictions")
    if y.shape != p.shape:
        raise ShapeError(f"{y.size} labels but {p.size} predictions")
    if y.size == 0:
        raise StatError("confusion matrix of empty input")
    return ConfusionMatrix(
        tp=int(np.sum((y == 1) & (p == 1))),
        tn=int(np.sum((y == 0) & (p == 0))),
        fp=int(np.sum((y == 0) & (p == 1))),
        fn=int(np.sum((y == 1) & (p == 0))),
    )


def _ratio(num, den, flag, flags):
    if den == 0:
        flags.append(flag)
        return 0.0
    return num / den


def _class_scores(tp, fp, fn, suffix, flags):
    precision = _ratio(tp, tp + fp, "precision" + suffix, flags)
    recall = _ratio(tp, tp + fn, "recall" + suffix, flags)
    f1 = _ratio(2 * precision * recall, precision + recall, "f1" + suffix, flags)
    return precision, recall, f1


@dataclass(frozen=True)
class Averaged:
    binary: float
    macro: float
    weighted: float

    def to_dict(self):
        return {"binary": self.binary, "macro": self.macro, "weighted": self.weighted}


@dataclass(frozen=True)
class Scores:
    """Accuracy, precision, recall and F1 in binary, macro and weighted form.

    ``degenerate`` names every ratio whose denominator was zero and that
    was therefore reported as 0.
    """

    accuracy: Averaged
    precision: Averaged
    recall: Averaged
    f1: Averaged
    degenerate: tuple[str, ...] = ()

    def as_tuple(self, average: str = "binary"):
        return tuple(getattr(getattr(self, k), average) for k in ("accuracy", "precision", "recall", "f1"))

    def to_dict(self):
        d = {k: getattr(self, k).to_dict() for k in ("accuracy", "precision", "recall", "f1")}
        d["degenerate"] = list(self.degenerate)
        return d


def scores(m: ConfusionMatrix) -> Scores:
    if m.total == 0:
        raise StatError("scores of an empty confusion matrix")
    flags: list[str] = []
    acc = (m.tp + m.tn) / m.total
    pos = _class_scores(m.tp, m.fp, m.fn, "", flags)
    # Class 0 as the positive class: its true positives are tn.
    neg = _class_scores(m.tn, m.fn, m.fp, "[class 0]", flags)
    support_pos = m.tp + m.fn
    support_neg = m.tn + m.fp

    def averaged(i):
        macro = (pos[i] + neg[i]) / 2.0
        weighted = (support_pos * pos[i] + support_neg * neg[i]) / m.total
        return Averaged(pos[i], macro, weighted)

    return Scores(Averaged(acc, acc, acc), averaged(0), averaged(1), averaged(2), tuple(flags))


def roc_auc(labels, probabilities):
    """ROC points over grouped descending thresholds and the trapezoidal AUC."""
    y = _binary_vector(labels, "labels")
    p = np.asarray(probabilities, dtype=float)
    if p.shape != y.shape:
        raise ShapeError(f"{y.size} labels but {p.size} probabilities")
    if not np.isfinite(p).all():
        raise StatError("probabilities must be finite")
    n_pos = int(y.sum())
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise StatError("AUC undefined: labels hold a single class")
    order = np.argsort(-p, kind="stable")
    ps, ys = p[order], y[order]
    # Last index of every group of equal probabilities.
    ends = np.append(np.flatnonzero(ps[1:] != ps[:-1]), ps.size - 1)
    tps = np.cumsum(ys)[ends]
    fps = (ends + 1) - tps
    tps = np.concatenate([[0], tps])
    fps = np.concatenate([[0], fps])
    # Integer arithmetic keeps the area exact until the final division.
    twice_area = int(np.sum((fps[1:] - fps[:-1]) * (tps[1:] + tps[:-1])))
    auc = twice_area / (2.0 * n_pos * n_neg)
    points = [(f / n_neg, t / n_pos) for f, t in zip(fps.tolist(), tps.tolist())]
    return points, auc


@dataclass(frozen=True)
class EvalReport:
    matrix: ConfusionMatrix
    scores: Scores
    roc_points: list
    auc: float
    threshold: float = 0.5

    def to_dict(self):
        return {
            "confusion": self.matrix.to_dict(),
            "scores": self.scores.to_dict(),
            "auc": self.auc,
            "threshold": self.threshold,
            "roc": [[f, t] for f, t in self.roc_points],
        }


def evaluate(labels, probabilities, threshold: float = 0.5) -> EvalReport:
    p = np.asarray(probabilities, dtype=float)
    m = confusion(labels, (p >= threshold).astype(np.int64))
    points, auc = roc_auc(labels, p)
    return EvalReport(m, scores(m), points, auc, threshold)
