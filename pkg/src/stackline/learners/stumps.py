"""Exhaustive depth-1 split search shared by the boosting learners."""

import numpy as np


def _split_points(column):
    """Sort order, sorted values and the positions i where a cut between i and i+1 is possible."""
    order = np.argsort(column, kind="stable")
    xs = column[order]
    cuts = np.flatnonzero(xs[1:] > xs[:-1])
    return order, xs, cuts


def best_classification_stump(X, y_pm, w):
    """Stump ``polarity * (+1 if x[j] > threshold else -1)`` of least weighted error.

    Thresholds are midpoints between consecutive distinct values. Ties go
    to the lowest feature index, then polarity +1, then the lowest threshold.
    Returns ``(feature, threshold, polarity, error)`` or ``None`` when every
    feature is constant.
    """
    best = None
    pos_w = np.where(y_pm > 0, w, 0.0)
    neg_w = np.where(y_pm < 0, w, 0.0)
    total_neg = neg_w.sum()
    total = w.sum()
    for j in range(X.shape[1]):
        order, xs, cuts = _split_points(X[:, j])
        if cuts.size == 0:
            continue
        # Polarity +1 errs on positives left of the cut and negatives right of it.
        err_plus = np.cumsum(pos_w[order])[cuts] + (total_neg - np.cumsum(neg_w[order])[cuts])
        err_minus = total - err_plus
        i_plus = int(np.argmin(err_plus))
        i_minus = int(np.argmin(err_minus))
        if err_minus[i_minus] < err_plus[i_plus]:
            i, pol, err = i_minus, -1, err_minus[i_minus]
        else:
            i, pol, err = i_plus, 1, err_plus[i_plus]
        if best is None or err < best[3]:
            c = cuts[i]
            best = (j, 0.5 * (xs[c] + xs[c + 1]), pol, float(err))
    return best


def best_regression_stump(X, r):
    """Split minimising squared error of per-side means of ``r``.

    Returns ``(feature, threshold)`` or ``None`` when every feature is constant.
    """
    best = None
    best_gain = -np.inf
    n = r.size
    for j in range(X.shape[1]):
        order, xs, cuts = _split_points(X[:, j])
        if cuts.size == 0:
            continue
        cum = np.cumsum(r[order])
        left_n = cuts + 1.0
        left_s = cum[cuts]
        right_s = cum[-1] - left_s
        gain = left_s ** 2 / left_n + right_s ** 2 / (n - left_n)
        i = int(np.argmax(gain))
        if gain[i] > best_gain:
            best_gain = gain[i]
            c = cuts[i]
            best = (j, 0.5 * (xs[c] + xs[c + 1]))
    return best
