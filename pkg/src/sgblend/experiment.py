"""Training runs: configuration, the epoch loop, checkpoints and results."""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import data as datasets
from .activations import ActivationKind
from .metrics import CSV_HEADER, EpochMetrics, accuracy, dead_units, f1_binary
from .optim import SGD, Adam, EarlyStopping, ReduceLROnPlateau
from .rng import derive_seed
from .tensor_nn import MlpModel, softmax_cross_entropy
from .rng import SplitMix64

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "sgblend-checkpoint"
CHECKPOINT_VERSION = 1

# stream keys for derive_seed
_INIT_STREAM, _SHUFFLE_STREAM = 1, 2


class ConfigError(ValueError):
    pass


class NumericalError(ArithmeticError):
    pass


@dataclass
class ExperimentConfig:
    # dataset
    dataset: str = "two_moons"
    n_samples: int = 1000
    noise_sd: float = 0.1
    turns: float = 2.0
    centers: list | None = None
    blob_sd: float = 0.5
    csv_path: str | None = None
    label_column: int = -1
    has_header: bool = False
    data_seed: int | None = None
    val_fraction: float = 0.10
    # model
    hidden: list = field(default_factory=lambda: [32, 32])
    activation: str = "sgblend"
    blend_gelu: str = "gelu_tanh"
    # optimization
    optimizer: str = "sgd"
    lr: float = 0.01
    momentum: float = 0.9
    weight_decay: float = 0.0005
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    max_epochs: int = 50
    batch_size: int = 64
    # training control
    plateau: bool = True
    plateau_patience: int = 3
    plateau_factor: float = 0.2
    early_stopping: bool = True
    early_stop_patience: int = 5
    monitor: str = "val_loss"
    target_train_accuracy: float | None = None
    dead_eps: float = 0.0
    seed: int = 0

    def validate(self) -> "ExperimentConfig":
        if self.dataset not in ("two_moons", "spirals", "blobs", "csv"):
            raise ConfigError(f"unknown dataset {self.dataset!r}")
        if self.dataset == "csv" and not self.csv_path:
            raise ConfigError("dataset 'csv' needs csv_path")
        try:
            ActivationKind.parse(self.activation)
            if ActivationKind.parse(self.blend_gelu) not in (ActivationKind.GELU_TANH, ActivationKind.GELU_EXACT):
                raise ConfigError("blend_gelu must be gelu_tanh or gelu_exact")
        except ValueError as e:
            raise ConfigError(str(e)) from None
        if self.optimizer not in ("sgd", "adam"):
            raise ConfigError(f"unknown optimizer {self.optimizer!r}")
        if self.monitor not in ("val_loss", "val_accuracy"):
            raise ConfigError("monitor must be val_loss or val_accuracy")
        if not self.lr > 0:
            raise ConfigError("lr must be positive")
        if self.max_epochs < 1 or self.batch_size < 1:
            raise ConfigError("max_epochs and batch_size must be >= 1")
        if not 0.0 < self.val_fraction < 1.0:
            raise ConfigError("val_fraction must lie in (0, 1)")
        if any(int(h) < 1 for h in self.hidden):
            raise ConfigError("hidden widths must be >= 1")
        return self

    @property
    def kind(self) -> ActivationKind:
        return ActivationKind.parse(self.activation)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def make_dataset(cfg: ExperimentConfig) -> datasets.Dataset:
    seed = cfg.seed if cfg.data_seed is None else cfg.data_seed
    if cfg.dataset == "two_moons":
        return datasets.two_moons(cfg.n_samples, cfg.noise_sd, seed)
    if cfg.dataset == "spirals":
        return datasets.spirals(cfg.n_samples, cfg.turns, cfg.noise_sd, seed)
    if cfg.dataset == "blobs":
        centers = cfg.centers if cfg.centers is not None else [[-4.0, -4.0], [4.0, 4.0], [-4.0, 4.0]]
        return datasets.gaussian_blobs(cfg.n_samples, centers, cfg.blob_sd, seed)
    return datasets.load_csv(cfg.csv_path, cfg.label_column, cfg.has_header)


@dataclass
class ExperimentResult:
    config: dict
    epochs: list
    summary: dict
    learned_params: list

    def to_dict(self) -> dict:
        return {"config": self.config, "epochs": self.epochs, "summary": self.summary,
                "learned_params": self.learned_params}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentResult":
        return cls(d["config"], d["epochs"], d["summary"], d["learned_params"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentResult":
        return cls.from_dict(json.loads(text))

    def write_metrics_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for e in self.epochs:
                w.writerow(EpochMetrics(**e).csv_row())


def _all_finite(*arrays) -> bool:
    return all(np.all(np.isfinite(a)) for a in arrays)


class Trainer:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg.validate()
        full = make_dataset(cfg)
        self.train_set, self.val_set = datasets.split(full, cfg.val_fraction, cfg.seed)
        sizes = [full.X.shape[1], *[int(h) for h in cfg.hidden], full.n_classes]
        self.model = MlpModel.build(sizes, cfg.kind, SplitMix64(derive_seed(cfg.seed, _INIT_STREAM)),
                                    blend_gelu=ActivationKind.parse(cfg.blend_gelu))
        if cfg.optimizer == "sgd":
            self.opt = SGD(cfg.lr, cfg.momentum, cfg.weight_decay)
        else:
            self.opt = Adam(cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps)
        self.plateau = ReduceLROnPlateau(cfg.lr, cfg.plateau_patience, cfg.plateau_factor)
        patience = cfg.early_stop_patience if cfg.early_stopping else math.inf
        self.early = EarlyStopping(patience)
        self.epoch = 0
        self.history: list[dict] = []
        self.stopped_early = False
        self.reached_target = False

    # --- checkpointing -------------------------------------------------
    def checkpoint(self) -> dict:
        early = self.early.state_dict()
        return {
            "format": CHECKPOINT_FORMAT,
            "version": CHECKPOINT_VERSION,
            "config": self.cfg.to_dict(),
            "epoch": self.epoch,
            "model": self.model.state_dict(),
            "optimizer": self.opt.state_dict(),
            "plateau": self.plateau.state_dict(),
            "early_stop": early,
            # batches are shuffled from derive_seed(seed, 2, epoch); the next epoch index is the stream state
            "rng": {"seed": self.cfg.seed, "shuffle_stream": _SHUFFLE_STREAM, "next_epoch": self.epoch},
            "history": self.history,
            "stopped_early": self.stopped_early,
            "reached_target": self.reached_target,
        }

    def save_checkpoint(self, path):
        Path(path).write_text(json.dumps(self.checkpoint()))

    @classmethod
    def from_checkpoint(cls, ckpt, **overrides) -> "Trainer":
        if not isinstance(ckpt, dict):
            ckpt = json.loads(Path(ckpt).read_text())
        if ckpt.get("format") != CHECKPOINT_FORMAT:
            raise ConfigError("not a checkpoint document")
        cfg = ExperimentConfig.from_dict({**ckpt["config"], **overrides})
        t = cls(cfg)
        t.model.load_state_dict(ckpt["model"])
        t.opt.load_state_dict(ckpt["optimizer"])
        t.plateau = ReduceLROnPlateau.from_state_dict(ckpt["plateau"])
        t.early = EarlyStopping.from_state_dict(ckpt["early_stop"])
        t.epoch = ckpt["epoch"]
        t.history = ckpt["history"]
        t.stopped_early = ckpt["stopped_early"]
        t.reached_target = ckpt["reached_target"]
        return t

    # --- loop ----------------------------------------------------------
    @property
    def done(self) -> bool:
        return self.epoch >= self.cfg.max_epochs or self.stopped_early or self.reached_target

    def _monitored(self, m: EpochMetrics) -> float:
        return m.val_loss if self.cfg.monitor == "val_loss" else -m.val_accuracy

    def evaluate(self, ds: datasets.Dataset) -> tuple[float, np.ndarray]:
        logits = self.model.forward(ds.X)
        loss, _ = softmax_cross_entropy(logits, ds.y)
        return loss, np.argmax(logits, axis=1)

    def run_epoch(self) -> EpochMetrics:
        cfg = self.cfg
        t0 = time.perf_counter()
        self.opt.lr = self.plateau.lr
        X, y = self.train_set.X, self.train_set.y
        order = SplitMix64(derive_seed(cfg.seed, _SHUFFLE_STREAM, self.epoch)).permutation(len(y))
        params = self.model.parameters()
        total = 0.0
        for start in range(0, len(y), cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            self.model.zero_grad()
            loss, dlogits = softmax_cross_entropy(self.model.forward(X[idx]), y[idx])
            self.model.backward(dlogits)
            self.opt.step(params)
            total += loss * len(idx)
        train_loss = total / len(y)

        _, train_pred = self.evaluate(self.train_set)
        val_loss, val_pred = self.evaluate(self.val_set)
        dead = [dead_units(l.output, cfg.dead_eps) for l in self.model.hidden_layers]
        n_units = sum(t for _, t in dead)
        epoch_no = self.epoch + 1
        m = EpochMetrics(
            epoch=epoch_no,
            train_loss=train_loss,
            val_loss=val_loss,
            val_accuracy=accuracy(val_pred, self.val_set.y),
            val_f1=f1_binary(val_pred, self.val_set.y) if self.train_set.n_classes == 2 else None,
            dead_neuron_pct=[100.0 * d / t for d, t in dead],
            dead_pct=100.0 * sum(d for d, _ in dead) / n_units if n_units else 0.0,
            lr=self.opt.lr,
            train_accuracy=accuracy(train_pred, y),
        )
        grads = [p.grad for p in params]
        values = [p.value for p in params]
        if not (math.isfinite(train_loss) and math.isfinite(val_loss) and _all_finite(*grads, *values)):
            raise NumericalError(f"non-finite loss, gradient or parameter in epoch {epoch_no}")

        if cfg.plateau:
            self.plateau.update(self._monitored(m))
        stop = self.early.update(self._monitored(m), epoch_no, self.model.state_dict())
        self.epoch = epoch_no
        self.stopped_early = bool(stop)
        if cfg.target_train_accuracy is not None and m.train_accuracy >= cfg.target_train_accuracy:
            self.reached_target = True
        m.wall_time_seconds = time.perf_counter() - t0
        self.history.append(m.to_dict())
        log.debug("epoch %d train_loss %.5f val_loss %.5f val_acc %.4f lr %.3g",
                  epoch_no, train_loss, val_loss, m.val_accuracy, m.lr)
        return m

    def train(self, stop_after: int | None = None) -> ExperimentResult:
        """Run epochs until done (or until ``stop_after`` total epochs), then report.

        The reported model is the best checkpoint seen, not the last epoch.
        """
        while not self.done and (stop_after is None or self.epoch < stop_after):
            self.run_epoch()
        return self.result()

    def restore_best(self):
        if self.early.best_checkpoint is not None:
            self.model.load_state_dict(self.early.best_checkpoint)

    def result(self) -> ExperimentResult:
        self.restore_best()
        _, train_pred = self.evaluate(self.train_set)
        _, val_pred = self.evaluate(self.val_set)
        dead = [dead_units(l.output, self.cfg.dead_eps) for l in self.model.hidden_layers]
        best = next((e for e in self.history if e["epoch"] == self.early.best_epoch), None)
        summary = {
            "epochs_run": self.epoch,
            "best_epoch": self.early.best_epoch,
            "best_val_loss": best["val_loss"] if best else None,
            "best_val_accuracy": max((e["val_accuracy"] for e in self.history), default=None),
            "best_model_val_accuracy": accuracy(val_pred, self.val_set.y),
            "best_model_train_accuracy": accuracy(train_pred, self.train_set.y),
            "max_train_accuracy": max((e["train_accuracy"] for e in self.history), default=None),
            "best_model_dead_pct": 100.0 * sum(d for d, _ in dead) / max(1, sum(t for _, t in dead)),
            "stopped_early": self.stopped_early,
            "reached_target": self.reached_target,
        }
        learned = [
            {"layer": i, **asdict(l.params.constrained()), "alpha_raw": l.params.alpha_raw}
            for i, l in enumerate(self.model.layers) if l.params is not None
        ]
        return ExperimentResult(self.cfg.to_dict(), list(self.history), summary, learned)


def run(cfg: ExperimentConfig) -> ExperimentResult:
    return Trainer(cfg).train()


def strip_wall_time(d):
    """Copy of a result dict with every wall-time field removed."""
    if isinstance(d, dict):
        return {k: strip_wall_time(v) for k, v in d.items() if k not in ("wall_time_seconds", "wall_s")}
    if isinstance(d, list):
        return [strip_wall_time(v) for v in d]
    return d
