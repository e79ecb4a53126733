"""Error measures and the aggregation bound."""

import numpy as np
import pytest

from logiq.metrics import (DegenerateInputError, aggregation_error_bound,
                           build_report, error_relative_to_max,
                           global_relative_error, max_occupancy_error,
                           mean_relative_outflow_error)
from logiq.series import ParameterError


class TestHandValues:
    def test_err_rel_max(self):
        q_d = np.array([0.0, 2.0, 4.0])
        q_l = np.array([0.0, 2.0, 3.0])
        # ||diff||_2 / (sqrt(3) * 4)
        assert error_relative_to_max(q_d, q_l) == pytest.approx(
            1.0 / (np.sqrt(3.0) * 4.0))

    def test_max_occupancy(self):
        q_d = np.array([1.0, 5.0, 2.0])
        q_l = np.array([4.0, 4.5, 0.0])
        assert max_occupancy_error(q_d, q_l) == pytest.approx(0.5 / 5.0)

    def test_mean_relative_outflow(self):
        y_d = np.array([2.0, 0.0, 4.0])
        y_l = np.array([1.0, 7.0, 4.0])
        err, excluded = mean_relative_outflow_error(y_d, y_l)
        assert excluded == 1           # the zero-reference bin is masked
        assert err == pytest.approx(0.25)

    def test_global_relative(self):
        y_d = np.array([3.0, 4.0])
        y_l = np.array([3.0, 4.0]) * 1.1
        assert global_relative_error(y_d, y_l) == pytest.approx(0.1)


class TestProperties:
    def test_scale_equivariance(self):
        rng = np.random.default_rng(2)
        q_d = rng.uniform(0.1, 10.0, 50)
        q_l = rng.uniform(0.1, 10.0, 50)
        for f in (error_relative_to_max, max_occupancy_error,
                  global_relative_error):
            assert f(q_d, q_l) == pytest.approx(f(q_d * 1e6, q_l * 1e6))

    def test_identical_inputs_zero_error(self):
        v = np.array([1.0, 2.0, 3.0])
        assert error_relative_to_max(v, v) == 0.0
        assert max_occupancy_error(v, v) == 0.0
        assert global_relative_error(v, v) == 0.0
        err, _ = mean_relative_outflow_error(v, v)
        assert err == 0.0

    def test_degenerate_references(self):
        z = np.zeros(4)
        with pytest.raises(DegenerateInputError):
            error_relative_to_max(z, z)
        with pytest.raises(DegenerateInputError):
            mean_relative_outflow_error(z, np.ones(4))
        with pytest.raises(DegenerateInputError):
            global_relative_error(z, np.ones(4))

    def test_shape_mismatch(self):
        with pytest.raises(ParameterError):
            global_relative_error(np.ones(3), np.ones(4))


class TestAggregationBound:
    def test_values(self):
        bits, seconds = aggregation_error_bound(11.33e6, 0.5303, 60.0)
        assert seconds == pytest.approx((1 - 0.5303) * 60.0)
        assert bits == pytest.approx(11.33e6 * (1 - 0.5303) * 60.0)

    def test_full_load_vanishes(self):
        bits, seconds = aggregation_error_bound(1e6, 1.0, 60.0)
        assert bits == 0.0 and seconds == 0.0

    def test_rho_domain(self):
        with pytest.raises(ParameterError):
            aggregation_error_bound(1.0, 1.2, 60.0)


class TestReport:
    def test_build_report_fields(self):
        q_d = np.array([0.0, 1e6, 2e6])
        q_l = np.array([0.0, 1.1e6, 1.9e6])
        y_d = np.array([5e5, 6e5, 7e5])
        y_l = np.array([5e5, 6e5, 7e5]) * 1.02
        x = np.array([5e5, 8e5, 9e5])
        rep = build_report(q_d, q_l, y_d, y_l, x, mu=1e6, rho=0.6, dt=60.0)
        assert rep.global_rel_err == pytest.approx(0.02)
        assert rep.observed_delay_gap_s == pytest.approx(1e5 / 1e6)
        assert rep.aggregation_bound_s == pytest.approx(24.0)
        assert rep.baseline_global_rel_err > rep.global_rel_err
        text = rep.to_text()
        assert "err_rel_max=" in text and "aggregation_bound_s=" in text
        assert len(rep.csv_row().split(",")) == len(rep.csv_header().split(","))
