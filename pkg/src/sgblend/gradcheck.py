"""Finite-difference certification of the analytic activation derivatives.

The numerical side only ever calls ``activations.forward``; the analytic
side is ``d_input`` / ``d_param``. The two never share a code path.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .activations import (
    BETA_MAX,
    BETA_MIN,
    LEARNABLE,
    ActivationKind,
    ActivationParams,
    d_input,
    d_param,
    forward,
)
from .rng import SplitMix64

VARIABLES = ("input", "alpha", "beta", "gamma")
X_RANGE = 10.0
GAMMA_RANGE = 5.0
REL_FLOOR = 1e-8


class OracleFailure(ArithmeticError):
    """The function under test was not finite at a probe point."""


class InvalidRequest(ValueError):
    pass


@dataclass(frozen=True)
class GradCheckReport:
    kind: str
    variable: str
    points_checked: int
    max_rel_error: float
    worst_point: float
    passed: bool
    tol: float

    def to_dict(self) -> dict:
        return asdict(self)


def rel_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), REL_FLOOR)


def step_for(v: float) -> float:
    return 1e-5 * max(1.0, abs(v))


def central_diff(f, x: float, h: float) -> float:
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    hi, lo = f(x + h), f(x - h)
    if not (math.isfinite(hi) and math.isfinite(lo)):
        raise OracleFailure(f"non-finite evaluation near x={x} (h={h})")
    return (hi - lo) / (2.0 * h)


def applicable_variables(kind: ActivationKind) -> tuple[str, ...]:
    return ("input",) + LEARNABLE[kind]


def _sample(rng: SplitMix64, n: int):
    u = rng.uniform(4 * n).reshape(n, 4)
    xs = -X_RANGE + 2.0 * X_RANGE * u[:, 0]
    alphas = u[:, 1]
    betas = BETA_MIN + (BETA_MAX - BETA_MIN) * u[:, 2]
    gammas = -GAMMA_RANGE + 2.0 * GAMMA_RANGE * u[:, 3]
    return xs, alphas, betas, gammas


def check(kind, variable: str, n_points: int = 1000, seed: int = 7, tol: float = 1e-5,
          blend_gelu: ActivationKind = ActivationKind.GELU_TANH) -> GradCheckReport:
    """Compare one analytic derivative of ``kind`` against central differences.

    Inputs are uniform on [-10, 10] with random valid (alpha, beta, gamma).
    The step is 1e-5 * max(1, |v|) where v is the perturbed variable.
    """
    kind = ActivationKind.parse(kind) if isinstance(kind, str) else kind
    if variable not in VARIABLES:
        raise InvalidRequest(f"unknown variable {variable!r}")
    if variable not in applicable_variables(kind):
        raise InvalidRequest(f"{kind.value} has no derivative in {variable!r}")
    if n_points < 1:
        raise InvalidRequest("n_points must be >= 1")
    if not tol > 0:
        raise InvalidRequest("tol must be positive")

    xs, alphas, betas, gammas = _sample(SplitMix64(seed), n_points)
    worst, worst_at = 0.0, float(xs[0])
    for x, a, b, g in zip(xs.tolist(), alphas.tolist(), betas.tolist(), gammas.tolist()):
        p = ActivationParams(a, b, g)
        if variable == "input":
            analytic = float(d_input(kind, p, x, blend_gelu))
            numeric = central_diff(lambda t: float(forward(kind, p, t, blend_gelu)), x, step_for(x))
        else:
            analytic = float(d_param(kind, variable, p, x, blend_gelu))
            v0 = getattr(p, variable)

            def f(v, p=p, x=x):
                return float(forward(kind, replace(p, **{variable: v}), x, blend_gelu))

            numeric = central_diff(f, v0, step_for(v0))
        err = rel_error(analytic, numeric)
        if err > worst or math.isnan(err):
            worst, worst_at = err, x
    return GradCheckReport(kind.value, variable, n_points, worst, worst_at, worst < tol, tol)


def check_all(kinds=tuple(ActivationKind), n_points: int = 1000, seed: int = 7, tol: float = 1e-5,
              blend_gelu: ActivationKind = ActivationKind.GELU_TANH) -> list[GradCheckReport]:
    return [
        check(k, v, n_points, seed, tol, blend_gelu)
        for k in kinds
        for v in applicable_variables(k)
    ]
