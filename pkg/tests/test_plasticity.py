import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracplast.plasticity import (
    MaterialParams,
    PointState,
    elastic_trial,
    return_map,
    update_field,
    update_point,
)

STEEL = MaterialParams(E=205e9, sigma_Y=1200e6)
# Delta gamma for a 0.007 total strain step: (1435 - 1200) MPa / 205 GPa
DGAMMA_007 = 235e6 / 205e9


def test_params_validation():
    with pytest.raises(ValueError):
        MaterialParams(E=0.0)
    with pytest.raises(ValueError):
        MaterialParams(sigma_Y=-1.0)
    assert MaterialParams(sigma_Y=math.inf).sigma_Y == math.inf


class TestElasticTrial:
    def test_elastic(self):
        sig, f = elastic_trial(PointState(eps_total=0.005), 0.0, STEEL)
        assert sig == pytest.approx(1025e6, rel=1e-14)
        assert f == pytest.approx(-175e6, rel=1e-12)

    def test_zero(self):
        assert elastic_trial(PointState(), 0.0, STEEL) == (0.0, -1200e6)

    def test_plastic(self):
        sig, f = elastic_trial(PointState(eps_total=0.007), 0.0, STEEL)
        assert sig == pytest.approx(1435e6, rel=1e-14)
        assert f == pytest.approx(235e6, rel=1e-12)


class TestReturnMap:
    def test_tension(self):
        s = return_map(1435e6, 235e6, PointState(eps_total=0.007), STEEL)
        assert s.dgamma_last == pytest.approx(1.14634e-3, rel=1e-5)
        assert s.sigma == pytest.approx(1200e6, rel=1e-15)
        assert s.eps_plastic == pytest.approx(DGAMMA_007, rel=1e-14)

    def test_compression(self):
        s = return_map(-1435e6, 235e6, PointState(eps_total=-0.007), STEEL)
        assert s.sigma == pytest.approx(-1200e6, rel=1e-15)
        assert s.eps_plastic == pytest.approx(-DGAMMA_007, rel=1e-14)

    def test_rejects_elastic_trial(self):
        with pytest.raises(ValueError, match="f_trial > 0"):
            return_map(1000e6, -200e6, PointState(), STEEL)
        with pytest.raises(ValueError):
            return_map(1200e6, 0.0, PointState(), STEEL)

    def test_continuity_at_yield(self):
        state = PointState(eps_total=1200e6 / 205e9)
        s = return_map(1200e6 + 1e-3, 1e-3, state, STEEL)
        assert s.dgamma_last < 1e-14
        assert s.eps_plastic == pytest.approx(0.0, abs=1e-14)


class TestUpdatePoint:
    def test_elastic_branch(self):
        s = update_point(PointState(), 1e-4, STEEL)
        assert s.eps_plastic == 0.0
        assert s.sigma == pytest.approx(205e9 * 1e-4)
        assert s.dgamma_last == 0.0

    def test_single_plastic_step(self):
        s = update_point(PointState(), 0.007, STEEL)
        assert s.sigma == pytest.approx(1200e6, rel=1e-15)
        assert s.eps_plastic == pytest.approx(DGAMMA_007, rel=1e-13)

    def test_unloading_is_elastic(self):
        s = update_point(PointState(), 0.007, STEEL)
        u = update_point(s, -0.002, STEEL)
        assert u.eps_plastic == s.eps_plastic
        assert u.dgamma_last == 0.0
        assert u.sigma == pytest.approx(205e9 * (0.005 - DGAMMA_007), rel=1e-12)
        # hand oracle: 1200 MPa minus E * 0.002
        assert u.sigma == pytest.approx(1200e6 - 410e6, rel=1e-12)

    def test_zero_increment_on_admissible_state_is_identity(self):
        s = update_point(PointState(), 0.009, STEEL)
        again = update_point(s, 0.0, STEEL)
        assert (again.eps_total, again.eps_plastic, again.sigma) == (s.eps_total, s.eps_plastic, s.sigma)
        assert again.dgamma_last == 0.0

    def test_elastic_material(self):
        s = update_point(PointState(), 0.5, MaterialParams(sigma_Y=math.inf))
        assert s.eps_plastic == 0.0 and s.sigma == pytest.approx(0.5 * 205e9)


histories = st.lists(st.floats(-4e-3, 4e-3, allow_nan=False), min_size=1, max_size=40)


def _replay(history, params=STEEL):
    state = PointState()
    states = []
    for d in history:
        state = update_point(state, d, params)
        states.append(state)
    return states


@settings(max_examples=200, deadline=None)
@given(histories)
def test_kkt_and_elastic_law(history):
    tol = 1e-10
    for s in _replay(history):
        f = abs(s.sigma) - STEEL.sigma_Y
        assert s.dgamma_last >= 0
        assert f <= tol * STEEL.sigma_Y
        assert abs(s.dgamma_last * f) <= tol * STEEL.sigma_Y
        assert s.sigma == pytest.approx(STEEL.E * (s.eps_total - s.eps_plastic), rel=1e-12, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(histories)
def test_sign_equivariance(history):
    pos = _replay(history)
    neg = _replay([-d for d in history])
    for a, b in zip(pos, neg):
        assert b.sigma == -a.sigma
        assert b.eps_plastic == -a.eps_plastic
        assert b.dgamma_last == a.dgamma_last


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 0.02), st.integers(1, 200))
def test_monotonic_path_independence(total, n):
    one = update_point(PointState(), total, STEEL)
    many = _replay([total / n] * n)[-1]
    assert many.sigma == pytest.approx(one.sigma, rel=1e-12, abs=1e-12 * STEEL.sigma_Y)
    assert many.eps_plastic == pytest.approx(one.eps_plastic, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-0.01, 0.01), min_size=5, max_size=5),
    st.lists(st.floats(-0.002, 0.002), min_size=5, max_size=5),
    st.lists(st.floats(-0.01, 0.01), min_size=5, max_size=5),
)
def test_vectorized_matches_pointwise(eps, eps_p, d_eps):
    eps, eps_p, d_eps = map(np.array, (eps, eps_p, d_eps))
    e, p, s, g = update_field(eps, eps_p, d_eps, STEEL)
    for i in range(5):
        ref = update_point(PointState(eps[i], eps_p[i], 0.0), d_eps[i], STEEL)
        assert (e[i], p[i], s[i], g[i]) == (ref.eps_total, ref.eps_plastic, ref.sigma, ref.dgamma_last)
