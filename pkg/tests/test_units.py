"""Unit-literal parsing at the config boundary."""

import pytest

from logiq.units import UnitError, fmt_rate, parse_duration, parse_rate, parse_size


def test_duration_literals():
    assert parse_duration("45 min") == 45 * 60.0
    assert parse_duration("6 h") == 6 * 3600.0
    assert parse_duration("1 d") == 86400.0
    assert parse_duration("250 ms") == 0.25
    assert parse_duration("3.5 s") == 3.5


def test_duration_bare_number_is_seconds():
    assert parse_duration(90) == 90.0
    assert parse_duration(0.5) == 0.5
    assert parse_duration("120") == 120.0


def test_size_bits_and_bytes():
    assert parse_size("1464 B") == 1464 * 8
    assert parse_size("25 GB") == 25e9 * 8
    assert parse_size("3 Mb") == 3e6
    assert parse_size("7 b") == 7.0
    assert parse_size(1024) == 1024.0


def test_rate_literals():
    assert parse_rate("11.33 Mb/s") == pytest.approx(11.33e6)
    assert parse_rate("100 Gb/s") == 100e9
    assert parse_rate("12.5 GB/s") == 12.5e9 * 8
    assert parse_rate(5e6) == 5e6


def test_bad_units_raise():
    with pytest.raises(UnitError):
        parse_duration("10 lightyears")
    with pytest.raises(UnitError):
        parse_size("10 qb")
    with pytest.raises(UnitError):
        parse_rate("10 Mb")  # missing /s
    with pytest.raises(UnitError):
        parse_rate("fast")


def test_fmt_rate_round_trip_scale():
    assert fmt_rate(11.33e6) == "11.33 Mb/s"
    assert fmt_rate(100e9) == "100 Gb/s"
    assert fmt_rate(2.0) == "2 b/s"
