"""Uniqueness classifier: encoding, imputation, boosting, cross-validation."""
from .encoding import EncoderState, fit_encoder
from .gbdt import GBDTModel, Hyperparams
from .imputing import ImputerState, fit_imputer
from .training import TrainedClassifier, load_classifier, predict, save_classifier, train

__all__ = [
    "EncoderState",
    "fit_encoder",
    "ImputerState",
    "fit_imputer",
    "GBDTModel",
    "Hyperparams",
    "TrainedClassifier",
    "train",
    "predict",
    "save_classifier",
    "load_classifier",
]
