"""Discrete AdaBoost over decision stumps."""

import math

import numpy as np

from ..errors import ConfigError, TrainingError
from .base import Learner, register, sigmoid
from .stumps import best_classification_stump

MIN_ERROR = 1e-10


def stump_weight(error: float) -> float:
    """Vote weight 0.5*ln((1 - e)/e) of a weak learner with weighted error e."""
    return 0.5 * math.log((1.0 - error) / error)


def stump_predict(X, feature, threshold, polarity):
    return polarity * np.where(X[:, feature] > threshold, 1.0, -1.0)


@register
class AdaBoostModel(Learner):
    """Boosted stumps; probability is sigmoid(2 * margin / sum of vote weights).

    Boosting stops early when a stump is perfect (its error is floored at
    ``MIN_ERROR`` and it is kept) or no better than chance (it is discarded).
    ``weight_sums_`` records the sample-weight total after every round.
    """

    name = "adaboost"
    defaults = {"rounds": 50}
    state_keys = ("features_", "thresholds_", "polarities_", "betas_")

    def _validate_params(self):
        if int(self.params["rounds"]) != self.params["rounds"] or self.params["rounds"] < 1:
            raise ConfigError("adaboost: rounds must be a positive integer")

    def _fit(self, X, y, seed):
        y_pm = np.where(y == 1, 1.0, -1.0)
        w = np.full(X.shape[0], 1.0 / X.shape[0])
        stumps, betas = [], []
        self.weight_sums_ = []
        self.errors_ = []
        for _ in range(int(self.params["rounds"])):
            found = best_classification_stump(X, y_pm, w)
            if found is None:
                raise TrainingError("adaboost: no valid stump, every feature is constant")
            j, thr, pol, err = found
            self.errors_.append(err)
            if err >= 0.5:
                break
            perfect = err < MIN_ERROR
            beta = stump_weight(max(err, MIN_ERROR))
            stumps.append((j, thr, pol))
            betas.append(beta)
            if perfect:
                break
            w = w * np.exp(-beta * y_pm * stump_predict(X, j, thr, pol))
            w = w / w.sum()
            self.weight_sums_.append(float(w.sum()))
        if not stumps:
            raise TrainingError("adaboost: first stump is no better than chance")
        self.features_ = np.array([s[0] for s in stumps], dtype=float)
        self.thresholds_ = np.array([s[1] for s in stumps], dtype=float)
        self.polarities_ = np.array([s[2] for s in stumps], dtype=float)
        self.betas_ = np.array(betas, dtype=float)

    def margin(self, X):
        """Weighted vote sum divided by the total vote weight, in [-1, 1]."""
        X = self._check_X(X)
        total = np.zeros(X.shape[0])
        for j, thr, pol, beta in zip(self.features_, self.thresholds_, self.polarities_, self.betas_):
            total += beta * stump_predict(X, int(j), thr, pol)
        return total / self.betas_.sum()

    def _proba(self, X):
        return sigmoid(2.0 * self.margin(X))
