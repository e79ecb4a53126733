"""Unit parsing for scenario configs.

Everything inside the package is bits and seconds; suffixed literals such as
"11.33 Mb/s", "25 GB" or "45 min" are converted once, at the config boundary.
"""

import re

_DURATION = {"ms": 1e-3, "s": 1.0, "min": 60.0, "h": 3600.0, "d": 86400.0}

# b = bit, B = byte; decimal SI prefixes.
_SIZE = {
    "b": 1.0, "kb": 1e3, "Mb": 1e6, "Gb": 1e9, "Tb": 1e12,
    "B": 8.0, "kB": 8e3, "MB": 8e6, "GB": 8e9, "TB": 8e12,
}

_NUM_UNIT = re.compile(r"^\s*([-+0-9.eE]+)\s*([a-zA-Z/]*)\s*$")


class UnitError(ValueError):
    pass


def _split(text):
    m = _NUM_UNIT.match(text)
    if not m:
        raise UnitError(f"cannot parse quantity {text!r}")
    try:
        value = float(m.group(1))
    except ValueError:
        raise UnitError(f"cannot parse number in {text!r}") from None
    return value, m.group(2)


def parse_duration(x) -> float:
    """Duration in seconds. Accepts a bare number (seconds) or e.g. '45 min'."""
    if isinstance(x, (int, float)):
        return float(x)
    value, unit = _split(x)
    if unit == "":
        return value
    if unit not in _DURATION:
        raise UnitError(f"unknown duration unit {unit!r} in {x!r}")
    return value * _DURATION[unit]


def parse_size(x) -> float:
    """Data size in bits. Accepts a bare number (bits) or e.g. '1464 B', '25 GB'."""
    if isinstance(x, (int, float)):
        return float(x)
    value, unit = _split(x)
    if unit == "":
        return value
    if unit not in _SIZE:
        raise UnitError(f"unknown size unit {unit!r} in {x!r}")
    return value * _SIZE[unit]


def parse_rate(x) -> float:
    """Flow rate in bits/second. Accepts a bare number or e.g. '11.33 Mb/s'."""
    if isinstance(x, (int, float)):
        return float(x)
    value, unit = _split(x)
    if unit == "":
        return value
    if not unit.endswith("/s"):
        raise UnitError(f"rate must end in '/s': {x!r}")
    size_unit = unit[:-2]
    if size_unit not in _SIZE:
        raise UnitError(f"unknown rate unit {unit!r} in {x!r}")
    return value * _SIZE[size_unit]


def fmt_rate(bps: float) -> str:
    for unit, scale in (("Gb/s", 1e9), ("Mb/s", 1e6), ("kb/s", 1e3)):
        if abs(bps) >= scale:
            return f"{bps / scale:.4g} {unit}"
    return f"{bps:.4g} b/s"
