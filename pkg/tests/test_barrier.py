from __future__ import annotations

import numpy as np
import pytest

from teleshield.barrier import (
    BarrierParams,
    barrier_gradient,
    barrier_value,
    dcbf_residual,
)
from teleshield.core import Obstacle, vec3


def _params(sigma=0.0, gamma=0.5):
    return BarrierParams(
        obstacle=Obstacle(center=vec3(1.0, 0.0, 0.0), radius=0.3),
        r_rob=0.18371173070873836,
        d_min=0.01,
        sigma=sigma,
        gamma=gamma,
    )


def test_barrier_value_frozen_example():
    # distance 0.8 to center, hard radius 0.3 + r_rob + 0.01, decimal-frozen
    p = _params()
    assert barrier_value(vec3(0.2, 0.0, 0.0), p) == pytest.approx(
        0.30628826929126163, abs=1e-15
    )


def test_barrier_value_sigma_is_exact_shift():
    # h(p; sigma) must equal h(p; 0) - sigma bitwise, not just approximately
    rng = np.random.default_rng(3)
    for _ in range(200):
        q = vec3(*rng.uniform(-3, 3, 3))
        sigma = float(rng.uniform(0, 0.5))
        assert barrier_value(q, _params(sigma)) == barrier_value(q, _params()) - sigma


def test_barrier_value_negative_inside():
    p = _params()
    assert barrier_value(vec3(1.0, 0.05, 0.0), p) < 0.0


def test_inflated_radius_composition():
    p = _params(sigma=0.025)
    assert p.hard_radius == pytest.approx(0.3 + 0.18371173070873836 + 0.01, abs=1e-15)
    assert p.inflated_radius == pytest.approx(p.hard_radius + 0.025, abs=1e-15)
    assert barrier_value(vec3(0.2, 0.0, 0.0), p) == pytest.approx(
        0.28128826929126166, abs=1e-15
    )


def test_barrier_gradient_is_unit_radial():
    p = _params(sigma=0.1)
    g = barrier_gradient(vec3(0.2, 0.0, 0.0), p)
    assert np.allclose(g, vec3(-1.0, 0.0, 0.0), atol=1e-15)
    q = vec3(1.0, 2.0, -2.0)
    g2 = barrier_gradient(q, p)
    assert np.linalg.norm(g2) == pytest.approx(1.0, rel=1e-12)
    # independent of sigma
    g3 = barrier_gradient(q, _params())
    assert np.array_equal(g2, g3)


def test_barrier_gradient_matches_finite_differences():
    p = _params(sigma=0.07)
    rng = np.random.default_rng(11)
    eps = 1e-6
    for _ in range(100):
        q = vec3(*rng.uniform(-3, 3, 3))
        if np.linalg.norm(q - p.obstacle.center) < 1e-2:
            continue
        g = barrier_gradient(q, p)
        fd = np.zeros(3)
        for a in range(3):
            e = np.zeros(3)
            e[a] = eps
            fd[a] = (barrier_value(q + e, p) - barrier_value(q - e, p)) / (2 * eps)
        assert np.allclose(g, fd, atol=1e-8)


def test_barrier_gradient_raises_at_center():
    p = _params()
    with pytest.raises(ValueError):
        barrier_gradient(vec3(1.0, 0.0, 0.0), p)


def _axis_params(gamma):
    # hard radius 0.25 + 0.125 + 0.125 = 0.5, exact in binary
    return BarrierParams(
        obstacle=Obstacle(center=vec3(0.0, 0.0, 0.0), radius=0.25),
        r_rob=0.125,
        d_min=0.125,
        gamma=gamma,
    )


def test_dcbf_residual_frozen_example():
    # h(0.7) = 0.2, h(0.625) = 0.125, residual = 0.125 - 0.5 * 0.2 = 0.025
    p = _axis_params(gamma=0.5)
    r = dcbf_residual(vec3(0.625, 0, 0), vec3(0.7, 0, 0), p)
    assert r == pytest.approx(0.025, abs=1e-15)


def test_dcbf_residual_sign_semantics():
    # decaying at exactly the allowed rate sits on the boundary,
    # faster decay violates, slower decay is strictly admissible
    p = _axis_params(gamma=0.5)
    curr = vec3(0.7, 0, 0)  # h = 0.2
    assert dcbf_residual(vec3(0.6, 0, 0), curr, p) == pytest.approx(0.0, abs=1e-15)
    assert dcbf_residual(vec3(0.58, 0, 0), curr, p) < 0.0
    assert dcbf_residual(vec3(0.65, 0, 0), curr, p) > 0.0


def test_dcbf_residual_matches_barrier_values():
    p = _params(sigma=0.03, gamma=0.5)
    rng = np.random.default_rng(5)
    for _ in range(100):
        a = vec3(*rng.uniform(-2, 2, 3))
        b = vec3(*rng.uniform(-2, 2, 3))
        expected = barrier_value(b, p) - 0.5 * barrier_value(a, p)
        assert dcbf_residual(b, a, p) == pytest.approx(expected, abs=1e-15)


def test_dcbf_residual_gamma_one_requires_nonnegative_next():
    # gamma = 1 discards history: admissibility is just h(next) >= 0
    p = _axis_params(gamma=1.0)
    deep_inside = vec3(0.1, 0, 0)
    assert dcbf_residual(vec3(0.5, 0, 0), deep_inside, p) == pytest.approx(
        0.0, abs=1e-15
    )
    assert dcbf_residual(vec3(0.45, 0, 0), deep_inside, p) < 0.0
