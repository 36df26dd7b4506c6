"""One-hidden-layer sigmoid network trained by full-batch gradient descent."""

import math

import numpy as np

from ..errors import ConfigError, DivergenceError
from ..frame import make_rng
from .base import Learner, log_loss_from_logits, register, sigmoid


def mlp_forward(params, X):
    hidden = sigmoid(X @ params["W1"] + params["b1"])
    logits = hidden @ params["W2"] + params["b2"]
    return hidden, logits


def mlp_loss_grad(params, X, t):
    """Cross-entropy loss and its gradient with respect to every parameter."""
    hidden, logits = mlp_forward(params, X)
    m = X.shape[0]
    delta_out = (sigmoid(logits) - t) / m
    delta_hidden = np.outer(delta_out, params["W2"]) * hidden * (1.0 - hidden)
    grads = {
        "W1": X.T @ delta_hidden,
        "b1": delta_hidden.sum(axis=0),
        "W2": hidden.T @ delta_out,
        "b2": np.array(delta_out.sum()),
    }
    return log_loss_from_logits(logits, t), grads


@register
class MlpModel(Learner):
    name = "mlp"
    defaults = {"hidden_units": 16, "lr": 0.05, "epochs": 500}
    state_keys = ("W1", "b1", "W2", "b2")

    def _validate_params(self):
        if int(self.params["hidden_units"]) != self.params["hidden_units"] or self.params["hidden_units"] < 1:
            raise ConfigError("mlp: hidden_units must be a positive integer")
        if not self.params["lr"] > 0 or self.params["epochs"] < 1:
            raise ConfigError("mlp: lr must be positive and epochs >= 1")

    def _fit(self, X, y, seed):
        h = int(self.params["hidden_units"])
        rng = make_rng(seed)
        params = {
            "W1": rng.uniform(-0.5, 0.5, size=(X.shape[1], h)),
            "b1": rng.uniform(-0.5, 0.5, size=h),
            "W2": rng.uniform(-0.5, 0.5, size=h),
            "b2": np.array(rng.uniform(-0.5, 0.5)),
        }
        lr = float(self.params["lr"])
        t = y.astype(float)
        loss = math.nan
        for epoch in range(int(self.params["epochs"])):
            loss, grads = mlp_loss_grad(params, X, t)
            if not math.isfinite(loss):
                raise DivergenceError(f"mlp: loss became non-finite at epoch {epoch}", epoch)
            for key in params:
                params[key] = params[key] - lr * grads[key]
        self.set_state(params)
        self.final_loss_ = log_loss_from_logits(mlp_forward(params, X)[1], t)

    def _proba(self, X):
        return sigmoid(mlp_forward(self.get_state(), X)[1])
