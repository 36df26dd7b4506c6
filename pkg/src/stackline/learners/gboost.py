"""Gradient-boosted stumps on the logistic loss."""

import math

import numpy as np

from ..errors import ConfigError, DivergenceError, TrainingError
from .base import Learner, register, sigmoid
from .stumps import best_regression_stump


@register
class GradBoostModel(Learner):
    """Additive log-odds model of regression stumps.

    Each round fits a stump to the residuals ``t - p`` and sets each leaf
    to the Newton step ``sum(r) / sum(p(1-p))``, scaled by ``shrinkage``.
    """

    name = "gboost"
    defaults = {"rounds": 100, "shrinkage": 0.1}
    state_keys = ("init_", "features_", "thresholds_", "left_", "right_")

    def _validate_params(self):
        if self.params["rounds"] < 1 or not 0 < self.params["shrinkage"] <= 1:
            raise ConfigError("gboost: rounds must be >= 1 and shrinkage in (0, 1]")

    def _fit(self, X, y, seed):
        t = y.astype(float)
        prior = t.mean()
        init = math.log(prior / (1.0 - prior))
        F = np.full(X.shape[0], init)
        nu = float(self.params["shrinkage"])
        features, thresholds, left, right = [], [], [], []
        for round_ in range(int(self.params["rounds"])):
            p = sigmoid(F)
            r = t - p
            found = best_regression_stump(X, r)
            if found is None:
                raise TrainingError("gboost: no valid stump, every feature is constant")
            j, thr = found
            mask = X[:, j] > thr
            hess = p * (1.0 - p)
            values = []
            for side in (~mask, mask):
                values.append(r[side].sum() / max(hess[side].sum(), 1e-12))
            F = F + nu * np.where(mask, values[1], values[0])
            if not np.isfinite(F).all():
                raise DivergenceError(f"gboost: non-finite scores at round {round_}", round_)
            features.append(j)
            thresholds.append(thr)
            left.append(values[0])
            right.append(values[1])
        self.init_ = np.array(init)
        self.features_ = np.array(features, dtype=float)
        self.thresholds_ = np.array(thresholds)
        self.left_ = np.array(left)
        self.right_ = np.array(right)

    def decision_function(self, X):
        X = self._check_X(X)
        nu = float(self.params["shrinkage"])
        F = np.full(X.shape[0], float(self.init_))
        for j, thr, lv, rv in zip(self.features_, self.thresholds_, self.left_, self.right_):
            F += nu * np.where(X[:, int(j)] > thr, rv, lv)
        return F

    def _proba(self, X):
        return sigmoid(self.decision_function(X))
