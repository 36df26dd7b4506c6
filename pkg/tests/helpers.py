"""Shared test utilities."""

import mpmath as mp
import numpy as np


def numeric_gradient(f, x, h=1e-5):
    """Central finite-difference gradient of scalar ``f`` at array ``x``."""
    x = np.array(x, dtype=float)
    grad = np.zeros_like(x)
    flat, gflat = x.reshape(-1), grad.reshape(-1)
    for i in range(flat.size):
        keep = flat[i]
        flat[i] = keep + h
        up = f(x)
        flat[i] = keep - h
        down = f(x)
        flat[i] = keep
        gflat[i] = (up - down) / (2 * h)
    return grad


def relative_error(a, b):
    a, b = np.ravel(a), np.ravel(b)
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)
    return float(np.linalg.norm(a - b) / scale)


def quad_sf(x, k):
    """Upper tail of the chi-square density by tanh-sinh quadrature.

    Breakpoints around the mode keep the quadrature from stepping over
    the peak when k is large.
    """
    if x == 0:
        return 1.0
    with mp.workdps(30):
        k = mp.mpf(k)
        density = lambda t: t ** (k / 2 - 1) * mp.e ** (-t / 2) / (2 ** (k / 2) * mp.gamma(k / 2))
        s = mp.sqrt(2 * k)
        marks = [k + j * s for j in (-8, -4, -2, -1, 0, 1, 2, 4, 8, 16)] + [k / 2, 2 * k, 4 * k]
        points = [mp.mpf(x)] + sorted(p for p in marks if p > x) + [mp.inf]
        return float(mp.quad(density, points))
