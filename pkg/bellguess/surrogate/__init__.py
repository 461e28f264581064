from .spec import LayerSpec, NetworkSpec, DEFAULT_TRUNK, DEFAULT_BRANCHED_TRUNK, DEFAULT_BRANCH
from .network import Dense, Network, activate, activation_derivative
from .training import TrainConfig, TrainHistory, Adam, learning_rate, train, numerical_gradient
from .metrics import MetricsReport, evaluate_predictions, evaluate, resolve_guessing_probability

__all__ = ['LayerSpec', 'NetworkSpec', 'DEFAULT_TRUNK', 'DEFAULT_BRANCHED_TRUNK', 'DEFAULT_BRANCH', 'Dense', 'Network',
           'activate', 'activation_derivative', 'TrainConfig', 'TrainHistory', 'Adam', 'learning_rate', 'train',
           'numerical_gradient', 'MetricsReport', 'evaluate_predictions', 'evaluate', 'resolve_guessing_probability']
