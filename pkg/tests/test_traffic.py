"""Bursty video-user generation: structure, determinism and rate targeting."""

import dataclasses

import numpy as np
import pytest
from scipy import stats

from logiq.series import ParameterError
from logiq.traffic import (VideoUserParams, generate_aggregate, generate_users,
                           generate_video_user, interuse_for_rate)


class TestParams:
    def test_defaults_expose_measured_values(self):
        p = VideoUserParams()
        assert p.packet_size_bits == 1464 * 8
        assert p.burst_size_mean == 1714.0
        assert p.interburst_mean_s == 5.56
        assert p.interpacket_mean_s == 0.00345
        assert p.interuse_mean_s == 45 * 60.0
        assert p.mean_session_s == pytest.approx(1200.0)

    def test_in_session_rate_formula(self):
        p = VideoUserParams()
        burst_dur = (1714.0 - 1.0) * 0.00345
        expected = 1714.0 * 11712.0 / (burst_dur + 5.56)
        assert p.in_session_rate_bps == pytest.approx(expected)

    def test_mean_rate_is_duty_cycled(self):
        p = VideoUserParams()
        duty = 1200.0 / (1200.0 + 2700.0)
        assert p.mean_rate_bps == pytest.approx(p.in_session_rate_bps * duty)

    def test_dispersion_variance_reading(self):
        p_std = VideoUserParams(dispersion_is="std")
        p_var = VideoUserParams(dispersion_is="variance")
        assert p_std.burst_size_std == 278.0
        assert p_var.burst_size_std == pytest.approx(np.sqrt(278.0))

    def test_validation(self):
        with pytest.raises(ParameterError):
            VideoUserParams(burst_size_mean=0.0)
        with pytest.raises(ParameterError):
            VideoUserParams(session_lengths=((60.0, 0.5), (120.0, 0.4)))
        with pytest.raises(ParameterError):
            VideoUserParams(dispersion_is="stdev")


class TestInteruseForRate:
    def test_round_trip(self):
        p = VideoUserParams()
        target = 0.8e6
        tuned = dataclasses.replace(p, interuse_mean_s=interuse_for_rate(p, target))
        assert tuned.mean_rate_bps == pytest.approx(target, rel=1e-12)

    def test_rejects_unreachable_rate(self):
        p = VideoUserParams()
        with pytest.raises(ParameterError):
            interuse_for_rate(p, p.in_session_rate_bps * 1.1)
        with pytest.raises(ParameterError):
            interuse_for_rate(p, 0.0)


class TestGeneration:
    def test_deterministic_in_seed(self):
        p = VideoUserParams()
        a = generate_video_user(p, (0.0, 7200.0), 123)
        b = generate_video_user(p, (0.0, 7200.0), 123)
        np.testing.assert_array_equal(a.times, b.times)
        np.testing.assert_array_equal(a.sizes, b.sizes)

    def test_seeds_differ(self):
        p = VideoUserParams()
        a = generate_video_user(p, (0.0, 7200.0), 1)
        b = generate_video_user(p, (0.0, 7200.0), 2)
        assert len(a) != len(b) or not np.array_equal(a.times, b.times)

    def test_user_stream_independent_of_population_size(self):
        p = VideoUserParams()
        few = generate_users(p, (0.0, 7200.0), 7, 2)
        many = generate_users(p, (0.0, 7200.0), 7, 5)
        np.testing.assert_array_equal(few[0].times, many[0].times)
        np.testing.assert_array_equal(few[1].times, many[1].times)

    def test_times_inside_horizon_and_sorted(self):
        p = VideoUserParams()
        tr = generate_aggregate(p, (0.0, 4 * 3600.0), 5, 4)
        assert np.all(np.diff(tr.times) >= 0)
        if len(tr):
            assert tr.times[0] >= 0.0 and tr.times[-1] <= 4 * 3600.0
        assert np.all(tr.sizes == 1464 * 8)

    def test_idle_seed_yields_empty_trace(self):
        # a millisecond window almost surely starts inside the first gap
        p = VideoUserParams()
        tr = generate_video_user(p, (0.0, 1e-3), 0)
        assert len(tr) == 0

    def test_interpacket_gaps_exponential(self):
        # isolate one long burst so consecutive gaps are pure interpacket draws
        p = VideoUserParams(burst_size_mean=5000.0, burst_size_dispersion=0.0,
                            interburst_mean_s=1e9,
                            session_lengths=((3600.0, 1.0),),
                            interuse_mean_s=1e-6)
        tr = generate_video_user(p, (0.0, 3600.0), 11)
        gaps = np.diff(tr.times)
        gaps = gaps[gaps < 1.0]  # drop any burst/session boundary
        assert gaps.size >= 4000
        ks = stats.kstest(gaps, "expon", args=(0.0, 0.00345))
        assert ks.pvalue > 0.01

    def test_session_alternation_visible(self):
        # long gaps between sessions dominate the inter-arrival tail
        p = VideoUserParams()
        tr = generate_aggregate(p, (0.0, 48 * 3600.0), 3, 1)
        gaps = np.diff(tr.times)
        assert gaps.max() > 600.0          # at least one idle period
        assert np.median(gaps) < 0.05      # in-burst arrivals dominate


class TestMeanRate:
    def test_equilibrium_rate_matches_analytic(self):
        # many short warm-started windows estimate the long-run mean rate
        p = VideoUserParams()
        horizon = 600.0
        traces = generate_users(p, (0.0, horizon), 99, 2000, warmup_s=86400.0)
        est = np.mean([tr.total_bits for tr in traces]) / horizon
        assert est == pytest.approx(p.mean_rate_bps, rel=0.15)


class TestWarmup:
    def test_cold_start_leaves_most_users_idle(self):
        p = VideoUserParams()
        traces = generate_users(p, (0.0, 600.0), 17, 400)
        frac = np.mean([len(tr) > 0 for tr in traces])
        # without warmup only users whose first gap ends within 600 s show up
        assert 0.12 <= frac <= 0.28

    def test_warmup_restores_equilibrium_activity(self):
        p = VideoUserParams()
        traces = generate_users(p, (0.0, 600.0), 17, 400, warmup_s=86400.0)
        frac = np.mean([len(tr) > 0 for tr in traces])
        # duty cycle 0.31 plus sessions starting inside the window ~ 0.45
        assert 0.36 <= frac <= 0.53

    def test_warmup_keeps_packets_inside_horizon(self):
        p = VideoUserParams()
        tr = generate_video_user(p, (100.0, 700.0), 23, warmup_s=86400.0)
        if len(tr):
            assert tr.times[0] >= 100.0 and tr.times[-1] <= 700.0

    def test_warmup_deterministic(self):
        p = VideoUserParams()
        a = generate_video_user(p, (0.0, 600.0), 42, warmup_s=86400.0)
        b = generate_video_user(p, (0.0, 600.0), 42, warmup_s=86400.0)
        np.testing.assert_array_equal(a.times, b.times)

    def test_negative_warmup_rejected(self):
        with pytest.raises(ParameterError):
            generate_video_user(VideoUserParams(), (0.0, 600.0), 0, warmup_s=-1.0)
