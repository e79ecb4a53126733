"""Packet traces, rate series, binning and CSV round-trips."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logiq.series import (PacketTrace, RateSeries, ParameterError, intensity,
                          mean_rate, merge_traces, trace_to_inflow)


def make_trace(times, size=1000.0, horizon=None):
    times = np.asarray(times, dtype=float)
    if horizon is None:
        horizon = (0.0, float(times[-1]) if times.size else 0.0)
    return PacketTrace(times, np.full(times.shape, size), horizon)


class TestPacketTrace:
    def test_rejects_unsorted(self):
        with pytest.raises(ParameterError):
            make_trace([2.0, 1.0])

    def test_rejects_nonpositive_sizes(self):
        with pytest.raises(ParameterError):
            PacketTrace(np.array([1.0]), np.array([0.0]), (0.0, 2.0))

    def test_rejects_times_outside_horizon(self):
        with pytest.raises(ParameterError):
            make_trace([1.0, 5.0], horizon=(0.0, 4.0))

    def test_total_bits(self):
        tr = make_trace([0.5, 1.0, 1.5], size=100.0)
        assert tr.total_bits == 300.0

    def test_csv_round_trip(self, tmp_path):
        tr = make_trace([0.123456789, 1.0, 2.5], size=11712.0)
        path = tmp_path / "trace.csv"
        tr.to_csv(path)
        back = PacketTrace.from_csv(path, horizon=tr.horizon)
        np.testing.assert_allclose(back.times, tr.times, atol=1e-9)
        np.testing.assert_array_equal(back.sizes, tr.sizes)

    def test_empty_csv_round_trip(self, tmp_path):
        tr = PacketTrace(np.empty(0), np.empty(0), (0.0, 10.0))
        path = tmp_path / "empty.csv"
        tr.to_csv(path)
        back = PacketTrace.from_csv(path, horizon=(0.0, 10.0))
        assert len(back) == 0


class TestRateSeries:
    def test_sample_times_right_edges(self):
        rs = RateSeries(10.0, 2.0, np.array([1.0, 2.0, 3.0]))
        np.testing.assert_allclose(rs.sample_times, [12.0, 14.0, 16.0])
        assert rs.t_end == 16.0

    def test_rejects_negative_rates(self):
        with pytest.raises(ParameterError):
            RateSeries(0.0, 1.0, np.array([1.0, -0.1]))

    def test_interpolation_constant_ends(self):
        rs = RateSeries(0.0, 1.0, np.array([2.0, 4.0]))
        assert rs(0.0) == 2.0          # before first sample: constant
        assert rs(1.5) == pytest.approx(3.0)
        assert rs(10.0) == 4.0

    def test_integral_matches_quadrature(self):
        rs = RateSeries(0.0, 0.5, np.array([2.0, 4.0, 4.0, 0.0]))
        ts = np.linspace(0.0, rs.t_end, 20001)
        num = (getattr(np, "trapezoid", None) or np.trapz)(rs(ts), ts)
        assert rs.integral() == pytest.approx(num, rel=1e-6)

    def test_csv_round_trip_exact(self, tmp_path):
        rs = RateSeries(0.0, 60.0, np.array([0.0, 1.5e7, 11712.0 / 60.0]))
        path = tmp_path / "rates.csv"
        rs.to_csv(path)
        back = RateSeries.from_csv(path)
        assert back.same_grid(rs)
        np.testing.assert_array_equal(back.values, rs.values)


class TestBinning:
    def test_single_packet_rate(self):
        # one 11712-bit packet in a 60 s bin -> 195.2 b/s
        tr = make_trace([30.0], size=11712.0, horizon=(0.0, 60.0))
        inflow = trace_to_inflow(tr, 60.0)
        assert len(inflow) == 1
        assert inflow.values[0] == pytest.approx(11712.0 / 60.0)

    def test_half_open_bins_right_edge_inclusive(self):
        tr = make_trace([60.0, 60.000001], size=60.0, horizon=(0.0, 120.0))
        inflow = trace_to_inflow(tr, 60.0)
        # arrival exactly at the edge belongs to the earlier bin
        assert inflow.values[0] == pytest.approx(1.0)
        assert inflow.values[1] == pytest.approx(1.0)

    def test_arrival_at_t0_goes_to_first_bin(self):
        tr = make_trace([0.0], size=60.0, horizon=(0.0, 60.0))
        inflow = trace_to_inflow(tr, 60.0)
        assert inflow.values[0] == pytest.approx(1.0)

    def test_empty_trace_zero_series(self):
        tr = PacketTrace(np.empty(0), np.empty(0), (0.0, 300.0))
        inflow = trace_to_inflow(tr, 60.0)
        assert len(inflow) == 5
        assert np.all(inflow.values == 0.0)

    @given(st.lists(st.floats(min_value=0.0, max_value=599.999),
                    min_size=0, max_size=200),
           st.sampled_from([1.0, 7.0, 60.0]))
    @settings(max_examples=60, deadline=None)
    def test_mass_conservation(self, raw_times, dt):
        times = np.sort(np.asarray(raw_times))
        tr = PacketTrace(times, np.full(times.shape, 1464 * 8.0), (0.0, 600.0))
        inflow = trace_to_inflow(tr, dt)
        binned_bits = inflow.values.sum() * dt
        assert binned_bits == pytest.approx(tr.total_bits, rel=1e-12, abs=1e-9)


class TestMerge:
    def test_merge_sorted_and_stable(self):
        a = make_trace([1.0, 3.0], size=10.0, horizon=(0.0, 5.0))
        b = make_trace([2.0, 3.0], size=20.0, horizon=(0.0, 5.0))
        merged = merge_traces([a, b])
        np.testing.assert_allclose(merged.times, [1.0, 2.0, 3.0, 3.0])
        # ties keep input order (a's packet first)
        np.testing.assert_allclose(merged.sizes, [10.0, 20.0, 10.0, 20.0])

    def test_merge_rejects_mixed_horizons(self):
        a = make_trace([1.0], horizon=(0.0, 5.0))
        b = make_trace([1.0], horizon=(0.0, 6.0))
        with pytest.raises(ParameterError):
            merge_traces([a, b])

    def test_merge_empty_list(self):
        assert len(merge_traces([])) == 0


def test_mean_rate_and_intensity():
    rs = RateSeries(0.0, 1.0, np.array([4.0, 8.0]))
    assert mean_rate(rs) == 6.0
    assert intensity(rs, 12.0) == pytest.approx(0.5)
    with pytest.raises(ParameterError):
        intensity(rs, 0.0)
