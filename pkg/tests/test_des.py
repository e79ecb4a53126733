"""Packet-level FIFO oracle against brute-force references."""

import numpy as np
import pytest

from logiq.des import DesConfig, DesResult, departures_to_outflow, simulate_fifo
from logiq.series import PacketTrace, ParameterError


def brute_force_fifo(times, sizes, mu, cap=None):
    """Readable O(n) reference: Lindley recursion with drop-tail."""
    depart = []
    c_prev = -np.inf
    for a, s in zip(times, sizes):
        backlog = max(0.0, (c_prev - a) * mu)
        if cap is not None and backlog + s > cap:
            depart.append(None)
            continue
        start = max(a, c_prev)
        c_prev = start + s / mu
        depart.append(c_prev)
    return depart


def make_trace(times, sizes, horizon):
    return PacketTrace(np.asarray(times, float), np.asarray(sizes, float), horizon)


class TestAgainstBruteForce:
    def test_random_traces_match(self):
        rng = np.random.default_rng(0)
        for trial in range(20):
            n = rng.integers(1, 400)
            times = np.sort(rng.uniform(0.0, 100.0, n))
            sizes = rng.uniform(10.0, 5000.0, n)
            mu = rng.uniform(50.0, 5000.0)
            cap = None if trial % 2 == 0 else rng.uniform(2000.0, 50000.0)
            trace = make_trace(times, sizes, (0.0, 100.0))
            res = simulate_fifo(trace, DesConfig(mu=mu, capacity_k=cap,
                                                 sample_dt=1.0))
            ref = brute_force_fifo(times, sizes, mu, cap)
            kept = [d for d in ref if d is not None]
            np.testing.assert_allclose(res.departures.times, kept, rtol=1e-12)
            assert res.drop_count == sum(d is None for d in ref)

    def test_backlog_sampling_matches_event_walk(self):
        rng = np.random.default_rng(4)
        times = np.sort(rng.uniform(0.0, 60.0, 500))
        sizes = np.full(500, 1000.0)
        mu = 6000.0
        trace = make_trace(times, sizes, (0.0, 60.0))
        res = simulate_fifo(trace, DesConfig(mu=mu, sample_dt=0.5))
        ref = brute_force_fifo(times, sizes, mu)
        for t, q in zip(res.sample_times, res.q_sampled):
            idx = np.searchsorted(times, t, side="right")
            c = ref[idx - 1] if idx > 0 else -np.inf
            assert q == pytest.approx(mu * max(0.0, c - t), abs=1e-6)


class TestInvariants:
    def test_fifo_order_preserved(self):
        rng = np.random.default_rng(1)
        times = np.sort(rng.uniform(0.0, 10.0, 300))
        trace = make_trace(times, np.full(300, 500.0), (0.0, 10.0))
        res = simulate_fifo(trace, DesConfig(mu=1000.0, sample_dt=1.0))
        assert np.all(np.diff(res.departures.times) >= 0)

    def test_saturated_server_outputs_at_mu(self):
        # back-to-back arrivals keep the server busy; departures pace at mu
        times = np.linspace(0.0, 9.99, 1000)
        trace = make_trace(times, np.full(1000, 100.0), (0.0, 10.0))
        res = simulate_fifo(trace, DesConfig(mu=1000.0, sample_dt=1.0))
        gaps = np.diff(res.departures.times[5:])
        np.testing.assert_allclose(gaps, 100.0 / 1000.0, rtol=1e-9)

    def test_idle_server_departs_immediately(self):
        trace = make_trace([1.0, 5.0], [100.0, 200.0], (0.0, 10.0))
        res = simulate_fifo(trace, DesConfig(mu=100.0, sample_dt=1.0))
        np.testing.assert_allclose(res.departures.times, [2.0, 7.0])

    def test_drop_tail_respects_capacity(self):
        # second packet would push the backlog past the buffer
        trace = make_trace([0.0, 0.1, 0.2], [800.0, 800.0, 100.0], (0.0, 10.0))
        res = simulate_fifo(trace, DesConfig(mu=100.0, capacity_k=1000.0,
                                             sample_dt=1.0))
        assert res.drop_count == 1
        assert res.drop_bits == 800.0
        assert len(res.departures) == 2

    def test_work_conservation(self):
        # accepted bits all depart; busy time equals served bits over mu
        rng = np.random.default_rng(8)
        times = np.sort(rng.uniform(0.0, 50.0, 200))
        sizes = rng.uniform(100.0, 900.0, 200)
        trace = make_trace(times, sizes, (0.0, 50.0))
        res = simulate_fifo(trace, DesConfig(mu=800.0, sample_dt=1.0))
        assert res.departures.total_bits + res.drop_bits == pytest.approx(
            trace.total_bits)

    def test_empty_trace(self):
        trace = PacketTrace(np.empty(0), np.empty(0), (0.0, 30.0))
        res = simulate_fifo(trace, DesConfig(mu=100.0, sample_dt=10.0))
        assert np.all(res.q_sampled == 0.0)
        assert len(res.departures) == 0


class TestOutflowBinning:
    def test_departure_mass_binned(self):
        trace = make_trace([0.5, 1.0], [100.0, 100.0], (0.0, 4.0))
        res = simulate_fifo(trace, DesConfig(mu=100.0, sample_dt=1.0))
        out = departures_to_outflow(res, 1.0)
        assert out.values.sum() * out.dt == pytest.approx(200.0)

    def test_config_validation(self):
        with pytest.raises(ParameterError):
            DesConfig(mu=0.0)
        with pytest.raises(ParameterError):
            DesConfig(mu=1.0, sample_dt=0.0)
        with pytest.raises(ParameterError):
            DesConfig(mu=1.0, capacity_k=-5.0)
