"""From-scratch binary classifiers sharing the ``Learner`` contract."""

from .adaboost import AdaBoostModel
from .base import Learner, learner_from_dict, learner_names, make_learner, sigmoid
from .gboost import GradBoostModel
from .knn import KnnModel
from .logreg import LogRegModel
from .mlp import MlpModel
from .naive_bayes import NaiveBayesModel
from .svm import SvmModel

__all__ = [
    "AdaBoostModel",
    "GradBoostModel",
    "KnnModel",
    "Learner",
    "LogRegModel",
    "MlpModel",
    "NaiveBayesModel",
    "SvmModel",
    "learner_from_dict",
    "learner_names",
    "make_learner",
    "sigmoid",
]
