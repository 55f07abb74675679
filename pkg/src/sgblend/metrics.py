from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np


@dataclass
class EpochMetrics:
    epoch: int
    train_loss: float
    val_loss: float
    val_accuracy: float
    val_f1: float | None
    dead_neuron_pct: list[float] = field(default_factory=list)
    dead_pct: float = 0.0
    lr: float = 0.0
    wall_time_seconds: float = 0.0
    train_accuracy: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def csv_row(self) -> list:
        f1 = "" if self.val_f1 is None else repr(self.val_f1)
        return [self.epoch, repr(self.train_loss), repr(self.val_loss), repr(self.val_accuracy),
                f1, repr(self.dead_pct), repr(self.lr), f"{self.wall_time_seconds:.6f}"]


CSV_HEADER = ["epoch", "train_loss", "val_loss", "val_accuracy", "val_f1", "dead_pct", "lr", "wall_s"]


def _pair(preds, labels):
    preds, labels = np.asarray(preds), np.asarray(labels)
    if preds.shape != labels.shape or preds.ndim != 1:
        raise ValueError(f"preds {preds.shape} and labels {labels.shape} must be equal-length vectors")
    if preds.size == 0:
        raise ValueError("empty prediction vector")
    return preds, labels


def accuracy(preds, labels) -> float:
    preds, labels = _pair(preds, labels)
    return float(np.mean(preds == labels))


def f1_binary(preds, labels, positive_class: int = 1) -> float:
    preds, labels = _pair(preds, labels)
    if np.unique(labels).size > 2 or np.unique(np.concatenate([preds, labels])).size > 2:
        raise ValueError("f1_binary needs binary labels")
    tp = int(np.sum((preds == positive_class) & (labels == positive_class)))
    fp = int(np.sum((preds == positive_class) & (labels != positive_class)))
    fn = int(np.sum((preds != positive_class) & (labels == positive_class)))
    # 2PR/(P+R) written in counts; 0 when nothing is predicted or present
    denom = 2 * tp + fp + fn
    return 2.0 * tp / denom if denom and tp else 0.0


def dead_units(post_activations, eps: float = 0.0) -> tuple[int, int]:
    A = np.asarray(post_activations, dtype=np.float64)
    if A.ndim != 2 or A.size == 0:
        raise ValueError("need a non-empty (samples x units) matrix")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    dead = np.all(np.abs(A) <= eps, axis=0)
    return int(dead.sum()), A.shape[1]


def dead_neuron_pct(post_activations, eps: float = 0.0) -> float:
    """Percent of units whose |activation| <= eps on every sample."""
    dead, total = dead_units(post_activations, eps)
    return 100.0 * dead / total
