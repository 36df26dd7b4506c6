"""Linear soft-margin SVM trained in the primal, with Platt-scaled probabilities."""

import math

import numpy as np

from ..errors import ConfigError, DivergenceError
from ..frame import make_rng
from .base import Learner, register, sigmoid


def svm_objective(theta, bias, X, y_pm, lam) -> float:
    """0.5*|theta|^2 + lam * sum of hinge losses; labels in {-1, +1}."""
    margins = y_pm * (X @ theta + bias)
    return float(0.5 * theta @ theta + lam * np.maximum(0.0, 1.0 - margins).sum())


def platt_fit(scores, labels, max_iter=100):
    """Fit (a, b) so that sigmoid(a*score + b) estimates P(label = 1).

    Uses Platt's smoothed targets and a damped Newton iteration on the
    cross-entropy.
    """
    f = np.asarray(scores, dtype=float)
    y = np.asarray(labels)
    n_pos = float((y == 1).sum())
    n_neg = float(y.size - n_pos)
    t = np.where(y == 1, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))

    def loss(a, b):
        z = a * f + b
        return float(np.sum(np.logaddexp(0.0, z) - t * z))

    a, b = 0.0, math.log((n_pos + 1.0) / (n_neg + 1.0))
    current = loss(a, b)
    for _ in range(max_iter):
        p = sigmoid(a * f + b)
        r = p - t
        g = np.array([r @ f, r.sum()])
        w = p * (1.0 - p)
        H = np.array([[w @ (f * f), w @ f], [w @ f, w.sum()]]) + 1e-12 * np.eye(2)
        if np.abs(g).max() < 1e-10:
            break
        step = np.linalg.solve(H, g)
        scale = 1.0
        while scale > 1e-10:
            na, nb = a - scale * step[0], b - scale * step[1]
            new = loss(na, nb)
            if new < current + 1e-4 * scale * (g @ -step):
                break
            scale /= 2.0
        else:
            break
        a, b, current = na, nb, new
    return a, b


@register
class SvmModel(Learner):
    """Hinge-loss linear classifier.

    The objective ``0.5*|theta|^2 + lam*sum(hinge)`` is rescaled by
    ``1/(lam*m)`` to the per-sample form with regularisation
    ``mu = 1/(lam*m)`` and minimised by seeded mini-batch subgradient steps of
    size ``1/(mu*t)`` (Pegasos), with the norm projection and a
    ``t``-weighted average of the iterates as the returned solution.
    """

    name = "svm"
    defaults = {"lam": 0.01, "epochs": 100, "batch_size": 32}
    state_keys = ("theta_", "bias_", "platt_")

    def _validate_params(self):
        if not self.params["lam"] > 0:
            raise ConfigError(f"svm: lam must be positive, got {self.params['lam']}")
        if self.params["epochs"] < 1 or self.params["batch_size"] < 1:
            raise ConfigError("svm: epochs and batch_size must be >= 1")

    def _fit(self, X, y, seed):
        lam = float(self.params["lam"])
        m, d = X.shape
        y_pm = np.where(y == 1, 1.0, -1.0)
        mu = 1.0 / (lam * m)
        radius = 1.0 / math.sqrt(mu)
        batch = min(int(self.params["batch_size"]), m)
        rng = make_rng(seed)

        theta = np.zeros(d)
        bias = 0.0
        avg_theta = np.zeros(d)
        avg_bias = 0.0
        t = 0
        self.objective_history_ = []
        for epoch in range(int(self.params["epochs"])):
            order = rng.permutation(m)
            for start in range(0, m, batch):
                idx = order[start:start + batch]
                t += 1
                eta = 1.0 / (mu * t)
                xb, yb = X[idx], y_pm[idx]
                viol = yb * (xb @ theta + bias) < 1.0
                g_theta = (yb[viol] @ xb[viol]) / idx.size
                g_bias = yb[viol].sum() / idx.size
                theta = (1.0 - eta * mu) * theta + eta * g_theta
                bias = bias + eta * g_bias
                norm = math.sqrt(theta @ theta)
                if norm > radius:
                    theta *= radius / norm
                rho = 2.0 / (t + 1.0)
                avg_theta = (1.0 - rho) * avg_theta + rho * theta
                avg_bias = (1.0 - rho) * avg_bias + rho * bias
            obj = svm_objective(avg_theta, avg_bias, X, y_pm, lam)
            if not math.isfinite(obj):
                raise DivergenceError(f"svm: objective became non-finite at epoch {epoch}", epoch)
            self.objective_history_.append(obj)

        self.theta_ = avg_theta
        self.bias_ = np.array(avg_bias)
        self.platt_ = np.array(platt_fit(X @ avg_theta + avg_bias, y))

    def decision_function(self, X):
        X = self._check_X(X)
        return X @ self.theta_ + float(self.bias_)

    def _proba(self, X):
        a, b = self.platt_
        return sigmoid(a * (X @ self.theta_ + float(self.bias_)) + b)
