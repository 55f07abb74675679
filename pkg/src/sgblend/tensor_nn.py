"""Dense layers and an MLP with backprop into activation parameters.

Matrices are plain 2-D float64 numpy arrays, row-major, one sample per row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .activations import (
    LEARNABLE,
    ActivationKind,
    ActivationParams,
    d_alpha_sgblend,
    d_beta_sswish,
    d_input,
    forward,
)
from .params import ParamStore
from .rng import SplitMix64


class ShapeError(ValueError):
    pass


class StateError(RuntimeError):
    pass


@dataclass
class Parameter:
    """A tensor the optimizer updates in place, with its gradient buffer."""

    name: str
    value: np.ndarray
    grad: np.ndarray
    decay: bool
    post_step: object = None


def as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {X.shape}")
    return X


def glorot_uniform(fan_in: int, fan_out: int, rng: SplitMix64) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return (-limit + 2.0 * limit * rng.uniform(fan_in * fan_out)).reshape(fan_in, fan_out)


class DenseLayer:
    """``activation(X @ W + b)``. ``kind=None`` means identity (logits)."""

    def __init__(self, W, b, kind: ActivationKind | None = None,
                 blend_gelu: ActivationKind = ActivationKind.GELU_TANH):
        self.W = np.array(W, dtype=np.float64, ndmin=2)
        self.b = np.array(b, dtype=np.float64).reshape(-1)
        if self.b.shape[0] != self.W.shape[1]:
            raise ShapeError(f"bias length {self.b.shape[0]} != out_dim {self.W.shape[1]}")
        self.kind = kind
        self.blend_gelu = blend_gelu
        learnable = LEARNABLE[kind] if kind is not None else ()
        self.params = ParamStore(learnable) if learnable else None
        self.dW = np.zeros_like(self.W)
        self.db = np.zeros_like(self.b)
        self._X = None
        self._Z = None
        self.output = None

    @classmethod
    def create(cls, in_dim: int, out_dim: int, kind, rng: SplitMix64, **kw) -> "DenseLayer":
        return cls(glorot_uniform(in_dim, out_dim, rng), np.zeros(out_dim), kind, **kw)

    @property
    def in_dim(self) -> int:
        return self.W.shape[0]

    @property
    def out_dim(self) -> int:
        return self.W.shape[1]

    def act_params(self) -> ActivationParams:
        return self.params.constrained() if self.params is not None else ActivationParams()

    def forward(self, X) -> np.ndarray:
        X = as_matrix(X)
        if X.shape[1] != self.in_dim:
            raise ShapeError(f"input has {X.shape[1]} columns, layer expects {self.in_dim}")
        Z = X @ self.W + self.b
        if self.kind is None:
            Y = Z
        else:
            Y = forward(self.kind, self.act_params(), Z, self.blend_gelu)
        self._X, self._Z, self.output = X, Z, Y
        return Y

    def backward(self, dY) -> np.ndarray:
        if self._Z is None:
            raise StateError("backward called before forward")
        dY = as_matrix(dY)
        if dY.shape != self._Z.shape:
            raise ShapeError(f"upstream gradient {dY.shape} != layer output {self._Z.shape}")
        Z = self._Z
        if self.kind is None:
            dZ = dY
        else:
            p = self.act_params()
            dZ = dY * d_input(self.kind, p, Z, self.blend_gelu)
            if self.params is not None:
                self._accumulate_param_grads(dY, Z, p)
        self.dW += self._X.T @ dZ
        self.db += dZ.sum(axis=0)
        return dZ @ self.W.T

    def _accumulate_param_grads(self, dY, Z, p: ActivationParams):
        # summed over the batch; the loss already carries the 1/batch factor
        if self.kind is ActivationKind.SGBLEND:
            d_alpha = float(np.sum(dY * d_alpha_sgblend(p, Z, self.blend_gelu)))
            scale = p.alpha
        else:
            d_alpha = 0.0
            scale = 1.0
        d_beta = scale * float(np.sum(dY * d_beta_sswish(p.beta, Z)))
        d_gamma = -scale * float(np.sum(dY))
        self.params.accumulate(d_alpha, d_beta, d_gamma)

    def zero_grad(self):
        self.dW[:] = 0.0
        self.db[:] = 0.0
        if self.params is not None:
            self.params.zero_grad()

    def parameters(self, prefix: str = "") -> list[Parameter]:
        out = [
            Parameter(f"{prefix}W", self.W, self.dW, decay=True),
            Parameter(f"{prefix}b", self.b, self.db, decay=True),
        ]
        if self.params is not None:
            out.append(Parameter(f"{prefix}act", self.params.raw, self.params.grad,
                                 decay=False, post_step=self.params.project_beta))
        return out


class MlpModel:
    def __init__(self, layers: list[DenseLayer]):
        if not layers:
            raise ShapeError("a model needs at least one layer")
        for i, (a, b) in enumerate(zip(layers, layers[1:])):
            if a.out_dim != b.in_dim:
                raise ShapeError(f"layer {i} emits {a.out_dim} units, layer {i + 1} expects {b.in_dim}")
        self.layers = layers

    @classmethod
    def build(cls, sizes: list[int], kind, rng: SplitMix64,
              blend_gelu: ActivationKind = ActivationKind.GELU_TANH) -> "MlpModel":
        """Hidden layers use ``kind``; the last layer emits raw logits."""
        if len(sizes) < 2:
            raise ShapeError("sizes needs at least input and output widths")
        layers = []
        for i, (n_in, n_out) in enumerate(zip(sizes, sizes[1:])):
            last = i == len(sizes) - 2
            layers.append(DenseLayer.create(n_in, n_out, None if last else kind, rng, blend_gelu=blend_gelu))
        return cls(layers)

    @property
    def hidden_layers(self) -> list[DenseLayer]:
        return [l for l in self.layers if l.kind is not None]

    def forward(self, X) -> np.ndarray:
        out = as_matrix(X)
        for layer in self.layers:
            out = layer.forward(out)
        return out

    def backward(self, dlogits) -> np.ndarray:
        grad = dlogits
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def predict(self, X) -> np.ndarray:
        # argmax returns the first maximum, i.e. ties go to the lower index
        return np.argmax(self.forward(X), axis=1)

    def zero_grad(self):
        for layer in self.layers:
            layer.zero_grad()

    def parameters(self) -> list[Parameter]:
        out = []
        for i, layer in enumerate(self.layers):
            out.extend(layer.parameters(prefix=f"layers.{i}."))
        return out

    def state_dict(self) -> dict:
        return {
            "layers": [
                {
                    "in_dim": l.in_dim,
                    "out_dim": l.out_dim,
                    "kind": l.kind.value if l.kind is not None else None,
                    "blend_gelu": l.blend_gelu.value,
                    "W": l.W.tolist(),
                    "b": l.b.tolist(),
                    "act": l.params.to_dict() if l.params is not None else None,
                }
                for l in self.layers
            ]
        }

    @classmethod
    def from_state_dict(cls, d: dict) -> "MlpModel":
        layers = []
        for ld in d["layers"]:
            kind = ActivationKind(ld["kind"]) if ld["kind"] is not None else None
            W = np.array(ld["W"], dtype=np.float64).reshape(ld["in_dim"], ld["out_dim"])
            layer = DenseLayer(W, ld["b"], kind, ActivationKind(ld["blend_gelu"]))
            if ld["act"] is not None:
                layer.params = ParamStore.from_dict(ld["act"])
            layers.append(layer)
        return cls(layers)

    def load_state_dict(self, d: dict):
        """Copy values in place so optimizer buffers stay bound to the same arrays."""
        other = MlpModel.from_state_dict(d)
        if len(other.layers) != len(self.layers):
            raise ShapeError("checkpoint has a different layer count")
        for mine, theirs in zip(self.layers, other.layers):
            if mine.W.shape != theirs.W.shape:
                raise ShapeError("checkpoint layer shapes differ")
            mine.W[...] = theirs.W
            mine.b[...] = theirs.b
            if mine.params is not None:
                mine.params.raw[...] = theirs.params.raw


def softmax_cross_entropy(logits, labels) -> tuple[float, np.ndarray]:
    """Mean cross-entropy and its gradient in the logits."""
    logits = as_matrix(logits)
    labels = np.asarray(labels)
    n, k = logits.shape
    if labels.shape != (n,):
        raise ShapeError(f"need {n} labels, got shape {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ValueError(f"labels must lie in [0, {k})")
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    rows = np.arange(n)
    loss = float(np.mean(log_z - shifted[rows, labels]))
    probs = np.exp(shifted - log_z[:, None])
    probs[rows, labels] -= 1.0
    return loss, probs / n
