import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import numeric_gradient, relative_error
from stackline.errors import ConfigError, ShapeError, TrainingError
from stackline.frame import LabeledSet
from stackline.learners import (
    AdaBoostModel,
    GradBoostModel,
    KnnModel,
    LogRegModel,
    MlpModel,
    NaiveBayesModel,
    SvmModel,
    learner_from_dict,
    learner_names,
    make_learner,
)
from stackline.learners.adaboost import stump_weight
from stackline.learners.base import dumps, sigmoid
from stackline.learners.knn import euclidean_distance
from stackline.learners.logreg import logreg_loss_grad
from stackline.learners.mlp import mlp_forward, mlp_loss_grad
from stackline.learners.stumps import best_classification_stump, best_regression_stump

# Small hyperparameters keep the generic contract tests quick.
FAST = {
    "knn": {"k": 3},
    "svm": {"epochs": 10},
    "mlp": {"epochs": 50},
    "adaboost": {"rounds": 10},
    "logreg": {"epochs": 100},
    "naive_bayes": {},
    "gboost": {"rounds": 10},
}


def _set(X, y):
    X = np.asarray(X, dtype=float)
    return LabeledSet(X, np.asarray(y), [f"x{j}" for j in range(X.shape[1])])


# ---------------------------------------------------------------- contract

def test_registry_holds_seven_learners():
    assert learner_names() == sorted(FAST)


def test_unknown_learner_and_hyperparameter():
    with pytest.raises(ConfigError):
        make_learner("forest")
    with pytest.raises(ConfigError):
        make_learner("knn", depth=3)


@pytest.mark.parametrize("name", sorted(FAST))
def test_predict_matches_threshold_and_proba_in_unit_interval(name, blobs):
    model = make_learner(name, **FAST[name]).fit(blobs, seed=3)
    grid = np.random.default_rng(0).uniform(-4, 4, size=(300, 3))
    p = model.predict_proba(grid)
    assert p.shape == (300,)
    assert np.all((p >= 0) & (p <= 1))
    assert np.array_equal(model.predict(grid), (p >= 0.5).astype(int))


@pytest.mark.parametrize("name", sorted(FAST))
def test_fit_is_deterministic(name, blobs):
    a = make_learner(name, **FAST[name]).fit(blobs, seed=11)
    b = make_learner(name, **FAST[name]).fit(blobs, seed=11)
    assert dumps(a.to_dict()) == dumps(b.to_dict())


@pytest.mark.parametrize("name", sorted(FAST))
def test_json_round_trip_preserves_predictions(name, blobs):
    model = make_learner(name, **FAST[name]).fit(blobs, seed=1)
    doc = json.loads(dumps(model.to_dict()))
    back = learner_from_dict(doc)
    assert np.array_equal(back.predict_proba(blobs.features), model.predict_proba(blobs.features))
    assert dumps(back.to_dict()) == dumps(model.to_dict())


@pytest.mark.parametrize("name", sorted(FAST))
def test_single_class_input_is_rejected(name):
    data = _set(np.arange(12.0).reshape(6, 2), [1] * 6)
    with pytest.raises(TrainingError):
        make_learner(name).fit(data)


@pytest.mark.parametrize("name", sorted(FAST))
def test_wrong_feature_count_is_shape_error(name, blobs):
    model = make_learner(name, **FAST[name]).fit(blobs)
    with pytest.raises(ShapeError):
        model.predict_proba(np.zeros((2, 5)))


def test_unfitted_model_cannot_predict():
    with pytest.raises(TrainingError):
        KnnModel().predict_proba(np.zeros((1, 2)))


def test_non_finite_features_rejected():
    with pytest.raises(TrainingError):
        LogRegModel().fit(_set([[0.0], [np.nan]], [0, 1]))


# ---------------------------------------------------------------- KNN

def test_euclidean_distance_345():
    assert euclidean_distance((0, 0), (3, 4)) == 5.0


def test_knn_exact_match_k1():
    data = _set([[0, 0], [1, 1], [2, 2]], [0, 1, 0])
    model = KnnModel(k=1).fit(data)
    assert model.predict_proba([[1, 1]])[0] == 1.0


def test_knn_vote_fraction():
    data = _set([[0.0], [0.1], [0.2], [5.0]], [1, 1, 0, 0])
    model = KnnModel(k=3).fit(data)
    assert model.predict_proba([[0.05]])[0] == pytest.approx(2 / 3)


def test_knn_tie_goes_to_lower_row_index():
    data = _set([[-1.0], [1.0]], [0, 1])
    assert KnnModel(k=1).fit(data).predict_proba([[0.0]])[0] == 0.0
    flipped = _set([[1.0], [-1.0]], [1, 0])
    assert KnnModel(k=1).fit(flipped).predict_proba([[0.0]])[0] == 1.0


def test_knn_k_above_training_size():
    with pytest.raises(ConfigError):
        KnnModel(k=5).fit(_set([[0], [1]], [0, 1]))
    with pytest.raises(ConfigError):
        KnnModel(k=0)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2**31 - 1))
def test_knn_full_neighbourhood_is_class_fraction(n, seed):
    rng = np.random.default_rng(seed)
    y = np.r_[0, 1, rng.integers(0, 2, n - 2)]
    data = _set(rng.standard_normal((n, 2)), y)
    p = KnnModel(k=n).fit(data).predict_proba(rng.standard_normal((7, 2)))
    assert np.allclose(p, y.mean())


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 7))
def test_knn_row_permutation_invariance(seed, k):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((30, 3))
    y = np.r_[0, 1, rng.integers(0, 2, 28)]
    queries = rng.standard_normal((20, 3))
    perm = rng.permutation(30)
    a = KnnModel(k=k).fit(_set(X, y)).predict_proba(queries)
    b = KnnModel(k=k).fit(_set(X[perm], y[perm])).predict_proba(queries)
    assert np.array_equal(a, b)


def test_knn_chunking_matches_direct_computation():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((40, 2))
    y = np.r_[0, 1, rng.integers(0, 2, 38)]
    model = KnnModel(k=5).fit(_set(X, y))
    queries = rng.standard_normal((600, 2))
    expected = []
    for q in queries:
        d = [euclidean_distance(q, x) for x in X]
        expected.append(y[np.argsort(d, kind="stable")[:5]].mean())
    assert np.allclose(model.predict_proba(queries), expected)


# ---------------------------------------------------------------- SVM

def test_svm_two_point_separable():
    data = _set([[-1.0], [1.0]], [0, 1])
    model = SvmModel().fit(data)
    assert np.array_equal(model.predict(data.features), [0, 1])


def test_svm_objective_trend_over_windows(blobs):
    model = SvmModel(epochs=100).fit(blobs, seed=0)
    hist = np.asarray(model.objective_history_)
    windows = hist.reshape(10, 10).mean(axis=1)
    # Mini-batch steps leave a small wobble once the objective plateaus.
    assert np.all(np.diff(windows) <= 1e-4 * windows[:-1])
    assert windows[-1] < windows[0]


def test_svm_platt_midpoint_band(blobs):
    model = SvmModel().fit(blobs, seed=0)
    a, b = model.platt_
    assert 0.25 <= sigmoid(np.array([b]))[0] <= 0.75
    assert a > 0


def test_svm_accuracy_on_blobs(blobs):
    model = SvmModel().fit(blobs, seed=2)
    assert (model.predict(blobs.features) == blobs.labels).mean() >= 0.9
    assert np.all(np.isfinite(model.theta_))


def test_svm_invalid_lambda():
    with pytest.raises(ConfigError):
        SvmModel(lam=0.0)


# ---------------------------------------------------------------- MLP

def test_sigmoid_at_zero():
    assert sigmoid(np.array([0.0]))[0] == 0.5


def test_sigmoid_extremes_are_finite():
    out = sigmoid(np.array([-1000.0, 1000.0]))
    assert out[0] == 0.0 and out[1] == 1.0


def test_mlp_xor():
    X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=float)
    y = np.array([0, 1, 1, 0])
    model = MlpModel(hidden_units=16, lr=0.5, epochs=5000).fit(_set(X, y), seed=0)
    assert np.array_equal(model.predict(X), y)
    assert model.final_loss_ < 0.1


def test_mlp_zero_weights_give_half():
    model = MlpModel(hidden_units=4).fit(_set([[0.0, 1.0], [1.0, 0.0]], [0, 1]))
    model.set_state({"W1": np.zeros((2, 4)), "b1": np.zeros(4), "W2": np.zeros(4), "b2": np.array(0.0)})
    assert np.all(model.predict_proba(np.random.default_rng(0).normal(size=(9, 2))) == 0.5)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_mlp_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((5, 3))
    t = rng.integers(0, 2, 5).astype(float)
    params = {"W1": rng.uniform(-1, 1, (3, 4)), "b1": rng.uniform(-1, 1, 4),
              "W2": rng.uniform(-1, 1, 4), "b2": np.array(rng.uniform(-1, 1))}
    _, grads = mlp_loss_grad(params, X, t)
    for key in params:
        def f(v, key=key):
            return mlp_loss_grad({**params, key: v}, X, t)[0]
        assert relative_error(grads[key], numeric_gradient(f, params[key])) < 1e-4, key


def test_mlp_forward_shapes():
    params = {"W1": np.zeros((3, 5)), "b1": np.zeros(5), "W2": np.zeros(5), "b2": np.array(0.0)}
    hidden, logits = mlp_forward(params, np.ones((7, 3)))
    assert hidden.shape == (7, 5) and logits.shape == (7,)


# ---------------------------------------------------------------- AdaBoost

def test_stump_weight_values():
    assert stump_weight(0.5) == 0.0
    assert stump_weight(0.1) == pytest.approx(1.0986, abs=1e-4)
    assert stump_weight(0.1) == pytest.approx(0.5 * math.log(9))


def test_adaboost_separable_after_one_round():
    data = _set([[0.0], [1.0], [2.0], [3.0], [4.0], [5.0]], [0, 0, 0, 1, 1, 1])
    model = AdaBoostModel(rounds=50).fit(data)
    assert model.betas_.size == 1
    assert np.array_equal(model.predict(data.features), data.labels)


def test_adaboost_weights_sum_to_one(blobs):
    model = AdaBoostModel(rounds=30).fit(blobs)
    assert len(model.weight_sums_) > 0
    assert np.allclose(model.weight_sums_, 1.0, atol=1e-12, rtol=0)
    assert np.all(np.isfinite(model.betas_))


def test_adaboost_constant_features():
    with pytest.raises(TrainingError):
        AdaBoostModel().fit(_set(np.ones((6, 2)), [0, 1, 0, 1, 0, 1]))


def test_adaboost_margin_bounded(blobs):
    model = AdaBoostModel(rounds=20).fit(blobs)
    m = model.margin(np.random.default_rng(1).uniform(-5, 5, (50, 3)))
    assert np.all(np.abs(m) <= 1 + 1e-12)


def _brute_classification_stump(X, y_pm, w):
    best = None
    for j in range(X.shape[1]):
        vals = np.unique(X[:, j])
        for thr in (vals[:-1] + vals[1:]) / 2:
            for pol in (1.0, -1.0):
                pred = pol * np.where(X[:, j] > thr, 1.0, -1.0)
                err = w[pred != y_pm].sum()
                if best is None or err < best - 1e-12:
                    best = err
    return best


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_classification_stump_is_exhaustive_optimum(seed):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 5, (12, 3)).astype(float)
    y_pm = rng.choice([-1.0, 1.0], 12)
    w = rng.uniform(0.1, 1, 12)
    w /= w.sum()
    found = best_classification_stump(X, y_pm, w)
    brute = _brute_classification_stump(X, y_pm, w)
    if brute is None:
        assert found is None
    else:
        assert found[3] == pytest.approx(brute, abs=1e-12)


def test_regression_stump_finds_step():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    j, thr = best_regression_stump(X, np.array([-1.0, -1.0, 1.0, 1.0]))
    assert j == 0 and thr == 1.5


# ---------------------------------------------------------------- logistic regression

def test_logreg_zero_weights_give_half():
    model = LogRegModel(epochs=1).fit(_set([[0.0], [1.0]], [0, 1]))
    model.set_state({"weights_": np.zeros(1), "bias_": np.array(0.0)})
    assert np.all(model.predict_proba([[-3.0], [0.0], [8.0]]) == 0.5)


def test_logreg_separated_clusters():
    rng = np.random.default_rng(4)
    X = np.r_[rng.normal(-2, 0.3, 20), rng.normal(2, 0.3, 20)][:, None]
    y = np.repeat([0, 1], 20)
    model = LogRegModel(epochs=200).fit(_set(X, y))
    assert np.array_equal(model.predict(X), y)


def test_logreg_loss_approaches_zero_when_fitted():
    X = np.array([[-1.0], [1.0]])
    t = np.array([0.0, 1.0])
    losses = [logreg_loss_grad(np.array([s]), 0.0, X, t)[0] for s in (1, 10, 40)]
    assert losses[0] > losses[1] > losses[2]
    assert losses[2] < 1e-15


def test_logreg_starts_from_zero_and_trains_deterministically():
    data = _set([[-1.0], [1.0]], [0, 1])
    a = LogRegModel(epochs=5).fit(data, seed=0)
    b = LogRegModel(epochs=5).fit(data, seed=99)
    assert np.array_equal(a.weights_, b.weights_)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_logreg_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((5, 3))
    t = rng.integers(0, 2, 5).astype(float)
    w = rng.uniform(-1, 1, 3)
    b = float(rng.uniform(-1, 1))
    _, gw, gb = logreg_loss_grad(w, b, X, t)
    num_w = numeric_gradient(lambda v: logreg_loss_grad(v, b, X, t)[0], w)
    num_b = numeric_gradient(lambda v: logreg_loss_grad(w, float(v), X, t)[0], np.array(b))
    assert relative_error(gw, num_w) < 1e-4
    assert relative_error(gb, num_b) < 1e-4


# ---------------------------------------------------------------- naive Bayes and gradient boosting

@pytest.mark.parametrize("seed", range(5))
def test_naive_bayes_separated_blobs(seed):
    rng = np.random.default_rng(seed)
    y = np.repeat([0, 1], 250)
    X = rng.standard_normal((500, 2)) + np.where(y == 1, 3.0, -3.0)[:, None]
    model = NaiveBayesModel().fit(_set(X, y))
    assert (model.predict(X) == y).mean() >= 0.99


def test_naive_bayes_symmetric_classes():
    rng = np.random.default_rng(0)
    half = rng.standard_normal((2000, 2))
    X = np.r_[half, half]
    y = np.repeat([0, 1], 2000)
    model = NaiveBayesModel().fit(_set(X, y))
    p = model.predict_proba(rng.standard_normal((100, 2)))
    assert np.all(np.abs(p - 0.5) <= 0.05)


def test_naive_bayes_constant_feature_uses_variance_floor():
    X = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 5.0], [1.0, 6.0]])
    model = NaiveBayesModel().fit(_set(X, [0, 0, 1, 1]))
    p = model.predict_proba(X)
    assert np.all(np.isfinite(p))
    assert np.array_equal(model.predict(X), [0, 0, 1, 1])


def test_gboost_step_function_within_ten_rounds():
    X = np.linspace(-1, 1, 40)[:, None]
    y = (X[:, 0] > 0.1).astype(int)
    model = GradBoostModel(rounds=10).fit(_set(X, y))
    assert np.array_equal(model.predict(X), y)


def test_gboost_finite_stage_values(blobs):
    model = GradBoostModel().fit(blobs)
    assert np.all(np.isfinite(model.left_)) and np.all(np.isfinite(model.right_))
    assert (model.predict(blobs.features) == blobs.labels).mean() >= 0.95
