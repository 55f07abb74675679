import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles as O
from sgblend.activations import ActivationParams
from sgblend.params import ParamStore, constrained, init


def test_init_defaults():
    s = init()
    assert constrained(s) == ActivationParams(0.5, 1.0, 0.0)
    assert s.alpha_raw == 0.0
    assert np.all(s.grad == 0.0)


@pytest.mark.parametrize("alpha_raw, expected, tol", [
    (0.0, 0.5, 0.0),
    (40.0, 1.0, 1e-15),
    (-2.0, float(O.sig(-2)), 1e-16),
])
def test_constrained_alpha(alpha_raw, expected, tol):
    s = init()
    s.set_raw(alpha_raw=alpha_raw)
    assert abs(s.alpha - expected) <= tol


def test_constrained_alpha_frozen_value():
    s = init()
    s.set_raw(alpha_raw=-2.0)
    assert s.alpha == pytest.approx(0.1192029220, abs=1e-10)


def test_chain_alpha_grad():
    s = init()
    assert s.chain_alpha_grad(1.0) == 0.25
    s = init()
    s.set_raw(alpha_raw=40.0)
    assert s.chain_alpha_grad(1.0) < 1e-15
    s = init()
    s.set_raw(alpha_raw=-2.0)
    # 2 * sigmoid(-2) * sigmoid(2) = 0.2099871708...
    expected = float(2 * O.sig(-2) * O.sig(2))
    assert s.chain_alpha_grad(2.0) == pytest.approx(expected, rel=1e-15)
    assert s.grad[0] == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("raw, expected", [(0.05, 0.1), (3.7, 3.7), (1e6, 10.0), (-4.0, 0.1)])
def test_project_beta(raw, expected):
    s = init()
    s.set_raw(beta_raw=raw)
    s.project_beta()
    assert s.beta == expected


@given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), max_size=20))
def test_constraints_hold_after_any_updates(steps):
    s = init()
    for da, db, dg in steps:
        s.raw += np.array([da, db, dg])
        s.project_beta()
        p = s.constrained()
        assert 0.0 <= p.alpha <= 1.0
        assert 0.1 <= p.beta <= 10.0


@given(st.floats(-8, 8), st.floats(-3, 3), st.floats(-3, 3), st.floats(0.1, 5))
def test_chain_rule_matches_finite_difference(alpha_raw, target, c, scale):
    # L(a) = scale * (a - target)^2 + c * a, a = logistic(alpha_raw)
    def loss(r):
        a = float(O.sig(r))
        return scale * (a - target) ** 2 + c * a

    s = init()
    s.set_raw(alpha_raw=alpha_raw)
    a = s.alpha
    analytic = s.chain_alpha_grad(2 * scale * (a - target) + c)
    h = 1e-5 * max(1.0, abs(alpha_raw))
    numeric = (loss(alpha_raw + h) - loss(alpha_raw - h)) / (2 * h)
    assert abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8) < 1e-6


def test_accumulate_respects_learnable_set():
    s = ParamStore(("beta", "gamma"))
    s.accumulate(d_alpha=5.0, d_beta=2.0, d_gamma=-1.0)
    assert list(s.grad) == [0.0, 2.0, -1.0]
    s.zero_grad()
    assert not s.grad.any()
    with pytest.raises(ValueError):
        ParamStore(("delta",))


def test_round_trip_dict():
    s = init()
    s.set_raw(-0.3, 2.2, 0.7)
    t = ParamStore.from_dict(s.to_dict())
    assert np.array_equal(s.raw, t.raw)
    assert t.learnable == s.learnable
