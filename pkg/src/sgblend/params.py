"""Per-layer learnable activation parameters.

Raw values live in a length-3 float64 vector ``[alpha_raw, beta_raw, gamma]``
so optimizers can update them like any other tensor. alpha is reached
through a logistic map, beta is clamped after each update, gamma is free.
"""

from __future__ import annotations

import numpy as np

from .activations import BETA_MAX, BETA_MIN, ActivationParams, sigmoid, sigmoid_prime

NAMES = ("alpha", "beta", "gamma")
ALPHA, BETA, GAMMA = range(3)


def logistic(z: float) -> float:
    return float(sigmoid(z))


class ParamStore:
    def __init__(self, learnable=NAMES):
        self.raw = np.array([0.0, 1.0, 0.0])
        self.grad = np.zeros(3)
        unknown = set(learnable) - set(NAMES)
        if unknown:
            raise ValueError(f"unknown activation parameters: {sorted(unknown)}")
        self.learnable = tuple(n for n in NAMES if n in learnable)

    @classmethod
    def init(cls, learnable=NAMES) -> "ParamStore":
        return cls(learnable)

    @property
    def alpha_raw(self) -> float:
        return float(self.raw[ALPHA])

    @property
    def beta_raw(self) -> float:
        return float(self.raw[BETA])

    @property
    def gamma(self) -> float:
        return float(self.raw[GAMMA])

    @property
    def alpha(self) -> float:
        return logistic(self.raw[ALPHA])

    @property
    def beta(self) -> float:
        return float(self.raw[BETA])

    def constrained(self) -> ActivationParams:
        return ActivationParams(alpha=self.alpha, beta=self.beta, gamma=self.gamma)

    def set_raw(self, alpha_raw=None, beta_raw=None, gamma=None):
        if alpha_raw is not None:
            self.raw[ALPHA] = alpha_raw
        if beta_raw is not None:
            self.raw[BETA] = beta_raw
        if gamma is not None:
            self.raw[GAMMA] = gamma

    def chain_alpha_grad(self, dL_dalpha: float) -> float:
        """Map dL/dalpha to dL/dalpha_raw and accumulate it."""
        g = dL_dalpha * float(sigmoid_prime(self.raw[ALPHA]))
        self.grad[ALPHA] += g
        return g

    def accumulate(self, d_alpha=0.0, d_beta=0.0, d_gamma=0.0):
        """Add gradients taken w.r.t. the constrained values.

        Entries for parameters this store does not learn are dropped.
        """
        if "alpha" in self.learnable:
            self.chain_alpha_grad(d_alpha)
        if "beta" in self.learnable:
            self.grad[BETA] += d_beta
        if "gamma" in self.learnable:
            self.grad[GAMMA] += d_gamma

    def project_beta(self):
        self.raw[BETA] = min(BETA_MAX, max(BETA_MIN, float(self.raw[BETA])))

    def zero_grad(self):
        self.grad[:] = 0.0

    def mask(self) -> np.ndarray:
        return np.array([n in self.learnable for n in NAMES], dtype=np.float64)

    def to_dict(self) -> dict:
        return {
            "alpha_raw": float(self.raw[ALPHA]),
            "beta_raw": float(self.raw[BETA]),
            "gamma": float(self.raw[GAMMA]),
            "learnable": list(self.learnable),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ParamStore":
        store = cls(d.get("learnable", NAMES))
        store.set_raw(d["alpha_raw"], d["beta_raw"], d["gamma"])
        return store

    def __repr__(self):
        p = self.constrained()
        return f"ParamStore(alpha={p.alpha:.6g}, beta={p.beta:.6g}, gamma={p.gamma:.6g})"


def constrained(store: ParamStore) -> ActivationParams:
    return store.constrained()


def init(learnable=NAMES) -> ParamStore:
    return ParamStore.init(learnable)
