from __future__ import annotations

import threading

import pytest

from teleshield.core import SafetyParams
from teleshield.rtt import RttSample, RttStats, RttWindow, safety_margin


def _window(values, capacity=30):
    w = RttWindow(capacity=capacity)
    for i, v in enumerate(values):
        w.push(RttSample(rtt=v, stamp=0.1 * i))
    return w


def test_empty_window_estimate_is_zero():
    w = RttWindow()
    est = w.estimate()
    assert (est.mean, est.deviation, est.count) == (0.0, 0.0, 0)


def test_single_sample_has_zero_deviation():
    est = _window([0.042]).estimate()
    assert est.mean == pytest.approx(0.042, abs=1e-15)
    assert est.deviation == 0.0
    assert est.count == 1


def test_window_stats_frozen_example():
    # mean 0.07; sample (n-1) deviation of {0.05, 0.07, 0.09} is exactly 0.02
    est = _window([0.05, 0.07, 0.09]).estimate()
    assert est.mean == pytest.approx(0.07, abs=1e-15)
    assert est.deviation == pytest.approx(0.02, abs=1e-12)
    assert est.count == 3


def test_window_evicts_oldest_beyond_capacity():
    w = _window([1.0] * 5 + [0.2] * 30, capacity=30)
    assert len(w) == 30
    est = w.estimate()
    assert est.mean == pytest.approx(0.2, abs=1e-15)
    assert est.deviation == pytest.approx(0.0, abs=1e-15)


def test_window_clear():
    w = _window([0.1, 0.2])
    w.clear()
    assert len(w) == 0
    assert w.estimate().count == 0


def test_rtt_sample_rejects_negative():
    with pytest.raises(ValueError):
        RttSample(rtt=-0.001, stamp=0.0)


def test_safety_margin_frozen_examples():
    params = SafetyParams(r_rob=0.18371173070873836)
    # k_sigma * v_max * (mean + deviation + solve): 0.87 * (0.07 + 0.02 + 0.01)
    est = RttStats(mean=0.07, deviation=0.02, count=3)
    assert safety_margin(est, params, solve_time=0.01) == pytest.approx(
        0.087, abs=1e-12
    )
    # empty estimator still charges the solve time: 0.87 * 0.012
    empty = RttStats(mean=0.0, deviation=0.0, count=0)
    assert safety_margin(empty, params, solve_time=0.012) == pytest.approx(
        0.01044, abs=1e-12
    )


def test_safety_margin_deviation_opt_out():
    params = SafetyParams(r_rob=0.18371173070873836)
    est = RttStats(mean=0.07, deviation=0.02, count=3)
    m = safety_margin(est, params, solve_time=0.01, include_deviation=False)
    assert m == pytest.approx(0.87 * 0.08, abs=1e-12)


def test_safety_margin_scales_with_params():
    params = SafetyParams(r_rob=0.2, k_sigma=2.0, v_max_norm=1.0)
    est = RttStats(mean=0.1, deviation=0.0, count=5)
    assert safety_margin(est, params, solve_time=0.0) == pytest.approx(0.2, abs=1e-12)


def test_window_is_thread_safe_under_concurrent_push():
    w = RttWindow(capacity=30)
    errs = []

    def worker(base):
        try:
            for i in range(500):
                w.push(RttSample(rtt=0.01 + 1e-5 * i, stamp=base + i))
                w.estimate()
        except Exception as e:  # pragma: no cover
            errs.append(e)

    threads = [threading.Thread(target=worker, args=(k * 1000.0,)) for k in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errs
    assert len(w) == 30
