"""The four from-scratch multiclass classifiers with deterministic training."""

from .base import NonFiniteLossError, TrainedModel  # noqa: F401
from .forest import DecisionForestConfig, DecisionForestModel, train_decision_forest  # noqa: F401
from .jungle import DecisionJungleConfig, DecisionJungleModel, train_decision_jungle  # noqa: F401
from .logistic import (  # noqa: F401
    LogisticRegressionConfig,
    LogisticRegressionModel,
    train_logistic_regression,
)
from .mlp import MlpConfig, MlpModel, train_mlp  # noqa: F401

MODEL_CLASSES = {
    cls.kind: cls
    for cls in (LogisticRegressionModel, DecisionForestModel, DecisionJungleModel, MlpModel)
}
