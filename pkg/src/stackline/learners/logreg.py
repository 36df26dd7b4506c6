"""Logistic regression by full-batch gradient descent."""

import math

import numpy as np

from ..errors import ConfigError, DivergenceError
from .base import Learner, log_loss_from_logits, register, sigmoid


def logreg_loss_grad(weights, bias, X, t):
    """Cross-entropy loss, weight gradient X^T(p - t)/M and bias gradient mean(p - t)."""
    logits = X @ weights + bias
    residual = sigmoid(logits) - t
    m = X.shape[0]
    return log_loss_from_logits(logits, t), X.T @ residual / m, float(residual.mean())


@register
class LogRegModel(Learner):
    name = "logreg"
    defaults = {"lr": 0.1, "epochs": 1000}
    state_keys = ("weights_", "bias_")

    def _validate_params(self):
        if not self.params["lr"] > 0 or self.params["epochs"] < 1:
            raise ConfigError("logreg: lr must be positive and epochs >= 1")

    def _fit(self, X, y, seed):
        lr = float(self.params["lr"])
        t = y.astype(float)
        w = np.zeros(X.shape[1])
        b = 0.0
        for epoch in range(int(self.params["epochs"])):
            loss, gw, gb = logreg_loss_grad(w, b, X, t)
            if not math.isfinite(loss):
                raise DivergenceError(f"logreg: loss became non-finite at epoch {epoch}", epoch)
            w = w - lr * gw
            b = b - lr * gb
        self.weights_ = w
        self.bias_ = np.array(b)
        self.final_loss_ = logreg_loss_grad(w, b, X, t)[0]

    def _proba(self, X):
        return sigmoid(X @ self.weights_ + float(self.bias_))
