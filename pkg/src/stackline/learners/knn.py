"""k-nearest-neighbour vote."""

import numpy as np

from ..errors import ConfigError
from .base import Learner, register

_CHUNK = 256


def euclidean_distance(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.sqrt(np.sum((a - b) ** 2)))


@register
class KnnModel(Learner):
    """Fraction of positive labels among the k closest training rows.

    Distances are Euclidean; equal distances resolve to the lower training
    row index.
    """

    name = "knn"
    defaults = {"k": 5}
    state_keys = ("X_", "y_")

    def _validate_params(self):
        if int(self.params["k"]) != self.params["k"] or self.params["k"] < 1:
            raise ConfigError(f"knn: k must be a positive integer, got {self.params['k']}")

    def _fit(self, X, y, seed):
        if self.params["k"] > X.shape[0]:
            raise ConfigError(f"knn: k={self.params['k']} exceeds {X.shape[0]} training rows")
        self.X_ = X.copy()
        self.y_ = y.astype(float)

    def neighbors(self, X) -> np.ndarray:
        """Training-row indices of the k nearest neighbours of each query row."""
        X = self._check_X(X)
        k = int(self.params["k"])
        out = np.empty((X.shape[0], k), dtype=np.int64)
        for start in range(0, X.shape[0], _CHUNK):
            q = X[start:start + _CHUNK]
            d2 = ((q[:, None, :] - self.X_[None, :, :]) ** 2).sum(axis=2)
            out[start:start + _CHUNK] = np.argsort(d2, axis=1, kind="stable")[:, :k]
        return out

    def _proba(self, X):
        return (self.y_[self.neighbors(X)] == 1).mean(axis=1)
