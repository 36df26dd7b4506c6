import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stackline.errors import ConfigError
from stackline.frame import CATEGORICAL, NUMERIC, SplitSpec, read_csv_text, split, to_csv_text
from stackline.learners import LogRegModel, NaiveBayesModel
from stackline.preprocess import PreprocessConfig, fit_encoder, transform
from stackline.synth import TARGET, CategoricalSpec, SynthConfig, generate


def _holdout_accuracy(frame, model, seed):
    train, test, _ = split(frame, SplitSpec(0.8, 0.2, 0.0, seed=seed))
    enc = fit_encoder(train, PreprocessConfig(), TARGET)
    tr, te = transform(train, enc), transform(test, enc)
    model.fit(tr, seed=seed)
    return (model.predict(te.features) == te.labels).mean()


def test_schema_and_target():
    frame = generate(SynthConfig(n_rows=50, informative_features=2, noise_features=1))
    assert frame.column_names[-1] == TARGET
    assert set(frame.column(TARGET)) == {"Yes", "No"}
    assert frame.column_kinds[:3] == (NUMERIC,) * 3
    assert frame.kind_of("Sleep Duration") == CATEGORICAL
    assert frame.n_cols == 2 + 1 + 3 + 1


def test_no_missing_cells_by_default():
    frame = generate(SynthConfig())
    assert sum(frame.missing_count(c) for c in frame.column_names) == 0


def test_exact_positive_count():
    frame = generate(SynthConfig(n_rows=2000, class_balance=0.5, seed=17))
    assert frame.column(TARGET).count("Yes") == 1000
    frame = generate(SynthConfig(n_rows=101, class_balance=0.3, seed=1))
    assert frame.column(TARGET).count("Yes") == 30


def test_missing_rate_counts():
    frame = generate(SynthConfig(n_rows=200, missing_rate=0.05, seed=2))
    for name in frame.column_names[:-1]:
        assert frame.missing_count(name) == 10
    assert frame.missing_count(TARGET) == 0
    per_col = generate(SynthConfig(n_rows=200, missing_rate={"noise_1": 0.7}, seed=2))
    assert per_col.missing_count("noise_1") == 140
    assert per_col.missing_count("informative_1") == 0


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.0, 0.3))
def test_identical_seed_gives_identical_bytes(seed, rate):
    cfg = SynthConfig(n_rows=60, missing_rate=rate, seed=seed)
    assert to_csv_text(generate(cfg)) == to_csv_text(generate(cfg))


def test_different_seeds_differ():
    assert to_csv_text(generate(SynthConfig(seed=1))) != to_csv_text(generate(SynthConfig(seed=2)))


def test_csv_round_trip():
    frame = generate(SynthConfig(n_rows=40, missing_rate=0.1, seed=3))
    text = to_csv_text(frame)
    assert to_csv_text(read_csv_text(text)) == text


@pytest.mark.parametrize("kwargs", [
    {"n_rows": 1},
    {"class_balance": 0.0},
    {"class_balance": 1.0},
    {"informative_features": -1},
    {"missing_rate": 1.5},
])
def test_impossible_configs(kwargs):
    with pytest.raises(ConfigError):
        SynthConfig(**kwargs)


def test_balance_leaving_a_class_empty():
    with pytest.raises(ConfigError):
        generate(SynthConfig(n_rows=3, class_balance=0.2))


def test_bad_categorical_spec():
    with pytest.raises(ConfigError):
        CategoricalSpec("c", ["a", "b"], [1.0], [0.5, 0.5])
    with pytest.raises(ConfigError):
        CategoricalSpec("c", ["a"], [-1.0], [1.0])


def test_informative_class_means():
    frame = generate(SynthConfig(n_rows=4000, informative_features=1, noise_features=1,
                                 categorical_specs=[], seed=5))
    x = np.asarray(frame.column("informative_1"))
    z = np.asarray(frame.column("noise_1"))
    pos = np.asarray(frame.column(TARGET)) == "Yes"
    assert x[pos].mean() == pytest.approx(1.0, abs=0.1)
    assert x[~pos].mean() == pytest.approx(-1.0, abs=0.1)
    assert x[pos].std() == pytest.approx(1.0, abs=0.1)
    assert abs(z[pos].mean() - z[~pos].mean()) < 0.1


def test_no_signal_gives_chance_accuracy():
    accs = []
    for seed in range(20):
        frame = generate(SynthConfig(n_rows=500, informative_features=0, noise_features=4,
                                     categorical_specs=[], seed=seed))
        accs.append(_holdout_accuracy(frame, NaiveBayesModel(), seed))
    assert abs(np.mean(accs) - 0.5) <= 0.05


def test_three_informative_features_are_learnable():
    accs = []
    for seed in range(10):
        frame = generate(SynthConfig(n_rows=2000, informative_features=3, noise_features=5, seed=seed))
        accs.append(_holdout_accuracy(frame, LogRegModel(), seed))
    assert min(accs) >= 0.85
