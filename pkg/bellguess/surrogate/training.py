import math
import sys
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, confloat, conint
from tqdm import tqdm

from .network import Network
from ..dataset import LabeledRecord, stack
from ..enums import ScheduleVariant
from ..errors import TrainingDivergedError

__all__ = ['TrainConfig', 'TrainHistory', 'Adam', 'learning_rate', 'train', 'numerical_gradient']

MILESTONES = {ScheduleVariant.EVERY_TENTH: (60, 70, 80, 90, 100),
              ScheduleVariant.AFTER_FIFTY: (50, 60, 70, 80, 90)}


class TrainConfig(BaseModel):
    epochs: conint(ge=1) = 100
    base_lr: confloat(gt=0) = 1e-3
    schedule: ScheduleVariant = ScheduleVariant.EVERY_TENTH
    batch_size: conint(ge=1) = 128
    seed: int = 0
    validation_fraction: confloat(ge=0, lt=1) = 0.125


class TrainHistory(BaseModel):
    train_loss: List[float] = []
    val_loss: List[float] = []
    learning_rate: List[float] = []


def learning_rate(epoch: int, config: TrainConfig) -> float:
    """
    Learning rate used during `epoch` (1-based): `base_lr`, multiplied by 0.1 after every milestone epoch that
    has been completed.
    """
    completed = sum(1 for milestone in MILESTONES[config.schedule] if milestone < epoch)
    return config.base_lr * 0.1 ** completed


class Adam:
    def __init__(self, parameters: Sequence[np.ndarray], beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in parameters]
        self.v = [np.zeros_like(p) for p in parameters]
        self.t = 0

    def step(self, parameters: Sequence[np.ndarray], gradients: Sequence[np.ndarray], lr: float):
        self.t += 1
        correction1 = 1 - self.beta1 ** self.t
        correction2 = 1 - self.beta2 ** self.t
        for p, g, m, v in zip(parameters, gradients, self.m, self.v):
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g * g
            p -= lr * (m / correction1) / (np.sqrt(v / correction2) + self.eps)


def _targets(network: Network, records: List[LabeledRecord]):
    p, h, p_guess = stack(records)
    return p, (h if network.kind.predicts_inequality else None), p_guess


def train(network: Network, records: List[LabeledRecord], config: TrainConfig = None,
          progress: bool = True) -> TrainHistory:
    """
    Mini-batch Adam on the summed MSE of the network's heads. A seeded permutation holds out
    `validation_fraction` of the records; batches are reshuffled every epoch from the same seed.
    """
    config = TrainConfig() if config is None else config
    if not records:
        raise ValueError('cannot train on an empty dataset')
    rng = np.random.default_rng(config.seed)
    order = rng.permutation(len(records))
    n_val = math.floor(config.validation_fraction * len(records))
    val = [records[i] for i in order[:n_val]]
    fit = [records[i] for i in order[n_val:]]
    x, h, p_guess = _targets(network, fit)
    if val:
        x_val, h_val, p_guess_val = _targets(network, val)

    optimizer = Adam(network.parameters())
    history = TrainHistory()
    epochs = range(1, config.epochs + 1)
    if progress:
        epochs = tqdm(epochs, desc=f'Train {network.kind.value}', unit='epoch', file=sys.stdout, leave=False)
    for epoch in epochs:
        lr = learning_rate(epoch, config)
        permutation = rng.permutation(len(fit))
        losses, sizes = [], []
        for batch, start in enumerate(range(0, len(fit), config.batch_size)):
            idx = permutation[start:start + config.batch_size]
            loss, grads = network.loss_and_gradients(x[idx], None if h is None else h[idx], p_guess[idx])
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch, batch)
            optimizer.step(network.parameters(), grads, lr)
            losses.append(loss)
            sizes.append(len(idx))
        history.train_loss.append(float(np.average(losses, weights=sizes)))
        history.learning_rate.append(lr)
        if val:
            history.val_loss.append(network.loss(x_val, h_val, p_guess_val))
        if progress:
            epochs.set_postfix(loss=history.train_loss[-1])
    network.metadata.update(train_config=config.dict(), epochs_trained=config.epochs)
    return history


def numerical_gradient(network: Network, x: np.ndarray, h: Optional[np.ndarray], p_guess: np.ndarray,
                       indices: Sequence[int], step: float = 1e-5) -> np.ndarray:
    """Central differences of the loss with respect to the flat parameters at `indices`."""
    flat = network.get_flat()
    out = np.empty(len(indices))
    for n, i in enumerate(indices):
        original = flat[i]
        flat[i] = original + step
        network.set_flat(flat)
        plus = network.loss(x, h, p_guess)
        flat[i] = original - step
        network.set_flat(flat)
        minus = network.loss(x, h, p_guess)
        flat[i] = original
        out[n] = (plus - minus) / (2 * step)
    network.set_flat(flat)
    return out
