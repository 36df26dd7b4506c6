"""Tabular binary classification with a stacked ensemble, built from scratch on NumPy."""

from .chi2 import chi2_sf, chi_square_statistic, contingency, select_features
from .frame import Frame, LabeledSet, SplitSpec, balance, read_csv, split, write_csv
from .metrics import confusion, evaluate, roc_auc, scores
from .preprocess import PreprocessConfig, clean, fit_encoder, transform
from .stacking import StackingConfig, StackingModel, build_meta_features, stack_fit
from .synth import SynthConfig, generate

__version__ = "0.1.0"
