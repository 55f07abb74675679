"""Activation kernels and their analytic derivatives.

Every function here accepts a Python float or a numpy array and works
elementwise in float64. Nothing in this module holds state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

GELU_TANH_COEF = 0.044715
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

BETA_MIN = 0.1
BETA_MAX = 10.0


class ActivationKind(str, enum.Enum):
    RELU = "relu"
    SWISH = "swish"
    GELU_EXACT = "gelu_exact"
    GELU_TANH = "gelu_tanh"
    MISH = "mish"
    SSWISH = "sswish"
    SGBLEND = "sgblend"

    @classmethod
    def parse(cls, name: str) -> "ActivationKind":
        key = name.strip().lower().replace("-", "_")
        aliases = {"gelu": "gelu_tanh", "sg_blend": "sgblend", "silu": "swish"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown activation {name!r} (expected one of: {valid})") from None


# Which activation parameters each kind actually reads, in (alpha, beta, gamma) order.
LEARNABLE = {
    ActivationKind.RELU: (),
    ActivationKind.SWISH: ("beta",),
    ActivationKind.GELU_EXACT: (),
    ActivationKind.GELU_TANH: (),
    ActivationKind.MISH: (),
    ActivationKind.SSWISH: ("beta", "gamma"),
    ActivationKind.SGBLEND: ("alpha", "beta", "gamma"),
}

SMOOTH_KINDS = (
    ActivationKind.SWISH,
    ActivationKind.GELU_EXACT,
    ActivationKind.GELU_TANH,
    ActivationKind.MISH,
    ActivationKind.SSWISH,
    ActivationKind.SGBLEND,
)


@dataclass(frozen=True)
class ActivationParams:
    """Constrained activation parameters as seen by the kernels."""

    alpha: float = 0.5
    beta: float = 1.0
    gamma: float = 0.0


DEFAULT_PARAMS = ActivationParams()


def sigmoid(x):
    # exp is only ever taken of -|x| <= 0, so nothing overflows
    x = np.asarray(x, dtype=np.float64)
    z = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + z), z / (1.0 + z))[()]


def softplus(x):
    x = np.asarray(x, dtype=np.float64)
    return (np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x))))[()]


def sigmoid_prime(u):
    """sigmoid(u) * (1 - sigmoid(u)), written as sigmoid(u) * sigmoid(-u) so neither tail rounds to 0."""
    return sigmoid(u) * sigmoid(-np.asarray(u, dtype=np.float64))


def relu(x):
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)[()]


def swish(x, beta=1.0):
    x = np.asarray(x, dtype=np.float64)
    return (x * sigmoid(beta * x))[()]


def sswish(x, beta=1.0, gamma=0.0):
    return swish(x, beta) - gamma


def gelu_exact(x):
    x = np.asarray(x, dtype=np.float64)
    return (x * ndtr(x))[()]


def _gelu_tanh_gate(x):
    # 0.5 * (1 + tanh(z)) == sigmoid(2z); the sigmoid form keeps the left tail
    return sigmoid(2.0 * SQRT_2_OVER_PI * (x + GELU_TANH_COEF * x**3))


def gelu_tanh(x):
    x = np.asarray(x, dtype=np.float64)
    return (x * _gelu_tanh_gate(x))[()]


def mish(x):
    x = np.asarray(x, dtype=np.float64)
    return (x * np.tanh(softplus(x)))[()]


def _gelu(blend_gelu: ActivationKind):
    if blend_gelu is ActivationKind.GELU_TANH:
        return gelu_tanh, d_gelu_tanh
    if blend_gelu is ActivationKind.GELU_EXACT:
        return gelu_exact, d_gelu_exact
    raise ValueError(f"blend_gelu must be a GELU kind, got {blend_gelu}")


def sgblend(x, alpha=0.5, beta=1.0, gamma=0.0, blend_gelu=ActivationKind.GELU_TANH):
    g, _ = _gelu(blend_gelu)
    return alpha * sswish(x, beta, gamma) + (1.0 - alpha) * g(x)


def d_relu(x):
    # subgradient 0 at the kink
    return (np.asarray(x, dtype=np.float64) > 0).astype(np.float64)[()]


def d_swish(x, beta=1.0):
    x = np.asarray(x, dtype=np.float64)
    u = beta * x
    return (sigmoid(u) + x * beta * sigmoid_prime(u))[()]


def d_gelu_exact(x):
    x = np.asarray(x, dtype=np.float64)
    return (ndtr(x) + x * INV_SQRT_2PI * np.exp(-0.5 * x * x))[()]


def d_gelu_tanh(x):
    x = np.asarray(x, dtype=np.float64)
    z2 = 2.0 * SQRT_2_OVER_PI * (x + GELU_TANH_COEF * x**3)
    dz2 = 2.0 * SQRT_2_OVER_PI * (1.0 + 3.0 * GELU_TANH_COEF * x * x)
    return (sigmoid(z2) + x * sigmoid_prime(z2) * dz2)[()]


def d_mish(x):
    x = np.asarray(x, dtype=np.float64)
    t = np.tanh(softplus(x))
    return (t + x * (1.0 - t * t) * sigmoid(x))[()]


def forward(kind: ActivationKind, params: ActivationParams, x,
            blend_gelu: ActivationKind = ActivationKind.GELU_TANH):
    """Evaluate activation ``kind`` at ``x``.

    Kinds without learnable parameters ignore ``params``; Swish reads only
    ``beta``. ``blend_gelu`` picks the GELU variant mixed into SG-Blend.
    """
    if kind is ActivationKind.RELU:
        return relu(x)
    if kind is ActivationKind.SWISH:
        return swish(x, params.beta)
    if kind is ActivationKind.GELU_EXACT:
        return gelu_exact(x)
    if kind is ActivationKind.GELU_TANH:
        return gelu_tanh(x)
    if kind is ActivationKind.MISH:
        return mish(x)
    if kind is ActivationKind.SSWISH:
        return sswish(x, params.beta, params.gamma)
    if kind is ActivationKind.SGBLEND:
        return sgblend(x, params.alpha, params.beta, params.gamma, blend_gelu)
    raise ValueError(f"unhandled activation kind {kind!r}")


def d_input(kind: ActivationKind, params: ActivationParams, x,
            blend_gelu: ActivationKind = ActivationKind.GELU_TANH):
    """Derivative of ``forward`` with respect to its input. Never reads gamma."""
    if kind is ActivationKind.RELU:
        return d_relu(x)
    if kind in (ActivationKind.SWISH, ActivationKind.SSWISH):
        return d_swish(x, params.beta)
    if kind is ActivationKind.GELU_EXACT:
        return d_gelu_exact(x)
    if kind is ActivationKind.GELU_TANH:
        return d_gelu_tanh(x)
    if kind is ActivationKind.MISH:
        return d_mish(x)
    if kind is ActivationKind.SGBLEND:
        _, dg = _gelu(blend_gelu)
        a = params.alpha
        return a * d_swish(x, params.beta) + (1.0 - a) * dg(x)
    raise ValueError(f"unhandled activation kind {kind!r}")


def d_beta_sswish(beta, x):
    """Partial of x*sigmoid(beta*x) - gamma in beta: x^2 s (1 - s), never negative."""
    x = np.asarray(x, dtype=np.float64)
    return (x * x * sigmoid_prime(beta * x))[()]


def d_gamma_sswish() -> float:
    return -1.0


def d_alpha_sgblend(params: ActivationParams, x,
                    blend_gelu: ActivationKind = ActivationKind.GELU_TANH):
    g, _ = _gelu(blend_gelu)
    return sswish(x, params.beta, params.gamma) - g(x)


def d_param(kind: ActivationKind, variable: str, params: ActivationParams, x,
            blend_gelu: ActivationKind = ActivationKind.GELU_TANH):
    """Partial derivative of ``forward`` in one activation parameter.

    Raises ValueError when ``kind`` does not use ``variable``.
    """
    if variable not in LEARNABLE[kind]:
        raise ValueError(f"{kind.value} has no parameter {variable!r}")
    x = np.asarray(x, dtype=np.float64)
    if variable == "alpha":
        return d_alpha_sgblend(params, x, blend_gelu)
    # Swish and SSwish carry the whole sswish term; SG-Blend scales it by alpha.
    scale = params.alpha if kind is ActivationKind.SGBLEND else 1.0
    if variable == "beta":
        return scale * d_beta_sswish(params.beta, x)
    return (scale * d_gamma_sswish() * np.ones_like(x))[()]
