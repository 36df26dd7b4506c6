"""Common classifier contract and JSON model documents."""

from __future__ import annotations

import copy
import json
from abc import ABC, abstractmethod

import numpy as np

from ..errors import ConfigError, SchemaError, ShapeError, TrainingError
from ..frame import LabeledSet

FORMAT = "stackline-model"
FORMAT_VERSION = 1


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def log_loss_from_logits(z, t) -> float:
    """Mean binary cross-entropy of sigmoid(z) against targets t."""
    z = np.asarray(z, dtype=float)
    return float(np.mean(np.logaddexp(0.0, z) - np.asarray(t, dtype=float) * z))


def encode_array(a) -> dict:
    a = np.asarray(a, dtype=float)
    return {"shape": list(a.shape), "values": [format(v, ".17g") for v in a.ravel().tolist()]}


def decode_array(d) -> np.ndarray:
    return np.array([float(v) for v in d["values"]], dtype=float).reshape(d["shape"])


class Learner(ABC):
    """Binary classifier: ``fit``, ``predict_proba`` and ``predict``.

    Subclasses declare their hyperparameters in ``defaults`` and their
    fitted arrays in ``state_keys``; that is enough for cloning and JSON
    round trips.
    """

    name: str = ""
    defaults: dict = {}
    state_keys: tuple[str, ...] = ()

    def __init__(self, **params):
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise ConfigError(f"{self.name}: unknown hyperparameters {sorted(unknown)}")
        self.params = {**self.defaults, **params}
        self.n_features_ = None
        self._validate_params()

    def _validate_params(self):
        pass

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__name__}({args})"

    def clone(self) -> Learner:
        return type(self)(**copy.deepcopy(self.params))

    @property
    def fitted(self) -> bool:
        return self.n_features_ is not None

    def fit(self, data: LabeledSet, seed: int = 0) -> Learner:
        if data.n_rows == 0:
            raise TrainingError(f"{self.name}: empty training set")
        if np.unique(data.labels).size < 2:
            raise TrainingError(f"{self.name}: training labels hold a single class")
        if not np.isfinite(data.features).all():
            raise TrainingError(f"{self.name}: training features contain non-finite values")
        self._fit(np.asarray(data.features, dtype=float), np.asarray(data.labels), int(seed))
        self.n_features_ = data.features.shape[1]
        return self

    @abstractmethod
    def _fit(self, X: np.ndarray, y: np.ndarray, seed: int) -> None:
        ...

    def _check_X(self, X) -> np.ndarray:
        if not self.fitted:
            raise TrainingError(f"{self.name}: model is not fitted")
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2 or X.shape[1] != self.n_features_:
            raise ShapeError(
                f"{self.name}: expected {self.n_features_} features, got shape {X.shape}"
            )
        return X

    def predict_proba(self, X) -> np.ndarray:
        return np.clip(self._proba(self._check_X(X)), 0.0, 1.0)

    @abstractmethod
    def _proba(self, X: np.ndarray) -> np.ndarray:
        ...

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)

    def get_state(self) -> dict:
        return {k: getattr(self, k) for k in self.state_keys}

    def set_state(self, state: dict) -> None:
        for k in self.state_keys:
            setattr(self, k, state[k])

    def to_dict(self) -> dict:
        if not self.fitted:
            raise TrainingError(f"{self.name}: cannot serialize an unfitted model")
        return {
            "format": FORMAT,
            "version": FORMAT_VERSION,
            "type": self.name,
            "params": self.params,
            "n_features": self.n_features_,
            "state": {k: encode_array(v) for k, v in self.get_state().items()},
        }


_REGISTRY: dict[str, type[Learner]] = {}


def register(cls):
    _REGISTRY[cls.name] = cls
    return cls


def learner_names() -> list[str]:
    return sorted(_REGISTRY)


def make_learner(name: str, **params) -> Learner:
    try:
        cls = _REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown learner {name!r}; choose from {learner_names()}") from None
    return cls(**params)


def learner_from_dict(doc: dict) -> Learner:
    if doc.get("format") != FORMAT:
        raise SchemaError(f"not a model document (format={doc.get('format')!r})")
    if doc.get("version") != FORMAT_VERSION:
        raise SchemaError(f"unsupported model version {doc.get('version')!r}")
    model = make_learner(doc["type"], **doc["params"])
    model.set_state({k: decode_array(v) for k, v in doc["state"].items()})
    model.n_features_ = int(doc["n_features"])
    return model


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
