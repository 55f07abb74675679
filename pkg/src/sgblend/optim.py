"""SGD with momentum, Adam, plateau LR reduction and early stopping.

Optimizers keep one buffer per parameter tensor, keyed by parameter name,
and update values in place. Activation parameters go through the same
update as weights but never receive weight decay; ``post_step`` hooks
(beta projection) run right after each tensor is updated.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import numpy as np

MIN_DELTA = 1e-8


def _check_shapes(param: np.ndarray, grad: np.ndarray):
    if param.shape != grad.shape:
        raise ValueError(f"gradient shape {grad.shape} does not match parameter {param.shape}")


@dataclass
class SGD:
    lr: float = 0.01
    momentum: float = 0.9
    weight_decay: float = 0.0005
    velocity: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.lr > 0:
            raise ValueError("lr must be positive")

    def update(self, key: str, param: np.ndarray, grad: np.ndarray, apply_decay: bool):
        _check_shapes(param, grad)
        g = grad + self.weight_decay * param if apply_decay else grad
        v = self.velocity.get(key)
        v = g.copy() if v is None else self.momentum * v + g
        self.velocity[key] = v
        param -= self.lr * v

    def step(self, parameters):
        for p in parameters:
            self.update(p.name, p.value, p.grad, p.decay)
            if p.post_step is not None:
                p.post_step()

    def state_dict(self) -> dict:
        return {
            "type": "sgd", "lr": self.lr, "momentum": self.momentum,
            "weight_decay": self.weight_decay,
            "velocity": {k: v.tolist() for k, v in self.velocity.items()},
        }

    def load_state_dict(self, d: dict):
        self.lr, self.momentum, self.weight_decay = d["lr"], d["momentum"], d["weight_decay"]
        self.velocity = {k: np.array(v, dtype=np.float64) for k, v in d["velocity"].items()}


@dataclass
class Adam:
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: dict = field(default_factory=dict)
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.lr > 0:
            raise ValueError("lr must be positive")

    def update(self, key: str, param: np.ndarray, grad: np.ndarray, apply_decay: bool = False):
        # Adam in this harness carries no weight decay; apply_decay is accepted for interface parity
        _check_shapes(param, grad)
        t = self.t.get(key, 0) + 1
        m = self.beta1 * self.m.get(key, 0.0) + (1.0 - self.beta1) * grad
        v = self.beta2 * self.v.get(key, 0.0) + (1.0 - self.beta2) * grad * grad
        self.t[key], self.m[key], self.v[key] = t, m, v
        m_hat = m / (1.0 - self.beta1**t)
        v_hat = v / (1.0 - self.beta2**t)
        param -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def step(self, parameters):
        for p in parameters:
            self.update(p.name, p.value, p.grad, p.decay)
            if p.post_step is not None:
                p.post_step()

    def state_dict(self) -> dict:
        return {
            "type": "adam", "lr": self.lr, "beta1": self.beta1, "beta2": self.beta2,
            "eps": self.eps, "t": dict(self.t),
            "m": {k: np.asarray(v).tolist() for k, v in self.m.items()},
            "v": {k: np.asarray(v).tolist() for k, v in self.v.items()},
        }

    def load_state_dict(self, d: dict):
        self.lr, self.beta1, self.beta2, self.eps = d["lr"], d["beta1"], d["beta2"], d["eps"]
        self.t = {k: int(v) for k, v in d["t"].items()}
        self.m = {k: np.array(v, dtype=np.float64) for k, v in d["m"].items()}
        self.v = {k: np.array(v, dtype=np.float64) for k, v in d["v"].items()}


def _improved(metric: float, best: float) -> bool:
    # NaN compares False, so it never counts as an improvement
    return metric < best - MIN_DELTA


@dataclass
class ReduceLROnPlateau:
    """Multiply lr by ``factor`` once the metric fails to improve for more than ``patience`` epochs."""

    lr: float
    patience: int = 3
    factor: float = 0.2
    best: float = math.inf
    epochs_since_improve: int = 0

    def update(self, val_metric: float) -> float:
        if _improved(val_metric, self.best):
            self.best = val_metric
            self.epochs_since_improve = 0
        else:
            self.epochs_since_improve += 1
            if self.epochs_since_improve > self.patience:
                self.lr *= self.factor
                self.epochs_since_improve = 0
        return self.lr

    def state_dict(self) -> dict:
        return {"lr": self.lr, "patience": self.patience, "factor": self.factor,
                "best": self.best, "epochs_since_improve": self.epochs_since_improve}

    @classmethod
    def from_state_dict(cls, d: dict) -> "ReduceLROnPlateau":
        return cls(**d)


@dataclass
class EarlyStopping:
    """Track the best epoch and signal a stop after ``patience`` + 1 flat epochs in a row."""

    patience: int = 5
    best: float = math.inf
    best_epoch: int = -1
    best_checkpoint: object = None
    epochs_since_improve: int = 0

    def update(self, val_metric: float, epoch: int = -1, checkpoint=None) -> bool:
        if _improved(val_metric, self.best):
            self.best = val_metric
            self.best_epoch = epoch
            self.best_checkpoint = copy.deepcopy(checkpoint)
            self.epochs_since_improve = 0
            return False
        self.epochs_since_improve += 1
        return self.epochs_since_improve > self.patience

    def state_dict(self) -> dict:
        return {"patience": self.patience, "best": self.best, "best_epoch": self.best_epoch,
                "best_checkpoint": self.best_checkpoint,
                "epochs_since_improve": self.epochs_since_improve}

    @classmethod
    def from_state_dict(cls, d: dict) -> "EarlyStopping":
        return cls(**d)


def sgd_step(state: SGD, param, grad, apply_decay: bool, key: str = "param"):
    state.update(key, param, grad, apply_decay)


def adam_step(state: Adam, param, grad, key: str = "param"):
    state.update(key, param, grad)


def plateau_update(state: ReduceLROnPlateau, val_metric: float) -> float:
    return state.update(val_metric)


def early_stop_update(state: EarlyStopping, val_metric: float, epoch: int = -1, checkpoint=None) -> bool:
    return state.update(val_metric, epoch, checkpoint)
