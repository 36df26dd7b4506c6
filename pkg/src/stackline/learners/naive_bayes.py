"""Gaussian naive Bayes."""

import numpy as np

from .base import Learner, register, sigmoid

VAR_FLOOR = 1e-9


@register
class NaiveBayesModel(Learner):
    name = "naive_bayes"
    defaults = {}
    state_keys = ("means_", "vars_", "log_priors_")

    def _fit(self, X, y, seed):
        means, variances, priors = [], [], []
        for c in (0, 1):
            Xc = X[y == c]
            means.append(Xc.mean(axis=0))
            variances.append(np.maximum(Xc.var(axis=0), VAR_FLOOR))
            priors.append(np.log(Xc.shape[0] / X.shape[0]))
        self.means_ = np.array(means)
        self.vars_ = np.array(variances)
        self.log_priors_ = np.array(priors)

    def _log_likelihood(self, X, c):
        var = self.vars_[c]
        return -0.5 * (np.log(2.0 * np.pi * var) + (X - self.means_[c]) ** 2 / var).sum(axis=1)

    def _proba(self, X):
        log_odds = (
            self.log_priors_[1] - self.log_priors_[0]
            + self._log_likelihood(X, 1) - self._log_likelihood(X, 0)
        )
        return sigmoid(log_odds)
