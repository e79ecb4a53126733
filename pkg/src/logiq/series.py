"""Core data carriers: packet traces and uniformly sampled rate series.

A :class:`RateSeries` stores bits/second on a uniform grid of step ``dt``;
``values[i]`` is the aggregate rate over the half-open bin
``(t0 + i*dt, t0 + (i+1)*dt]`` and is anchored at the bin's right edge.
A :class:`PacketTrace` is a time-sorted sequence of (arrival, size) events.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


def _loadtxt_quiet(path):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


class ParameterError(ValueError):
    """Invalid model or operation parameter."""


@dataclass(frozen=True)
class PacketTrace:
    """Sorted packet arrivals (seconds) with sizes (bits) over a horizon."""

    times: np.ndarray
    sizes: np.ndarray
    horizon: tuple = (0.0, 0.0)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        sizes = np.asarray(self.sizes, dtype=np.float64)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "sizes", sizes)
        if times.shape != sizes.shape or times.ndim != 1:
            raise ParameterError("times and sizes must be 1-d arrays of equal length")
        if times.size and np.any(np.diff(times) < 0):
            raise ParameterError("packet times must be sorted nondecreasing")
        if np.any(sizes <= 0):
            raise ParameterError("packet sizes must be positive")
        t0, t1 = self.horizon
        if t1 < t0:
            raise ParameterError("empty horizon")
        if times.size and (times[0] < t0 or times[-1] > t1):
            raise ParameterError("packet times outside horizon")

    def __len__(self):
        return self.times.size

    @property
    def total_bits(self) -> float:
        return float(self.sizes.sum())

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("t_arrival_s,size_bits\n")
            for t, s in zip(self.times, self.sizes):
                fh.write(f"{t:.9f},{s:g}\n")

    @classmethod
    def from_csv(cls, path, horizon=None):
        data = _loadtxt_quiet(path)
        if data.size == 0:
            data = data.reshape(0, 2)
        times, sizes = data[:, 0], data[:, 1]
        if horizon is None:
            horizon = (float(times[0]) if times.size else 0.0,
                       float(times[-1]) if times.size else 0.0)
        return cls(times, sizes, horizon)


@dataclass(frozen=True)
class RateSeries:
    """Nonnegative flow rate (bits/s) sampled each ``dt`` seconds from ``t0``.

    ``values[i]`` lives at grid point ``t0 + (i+1)*dt``.  Evaluation between
    grid points is piecewise linear with constant extrapolation at both ends.
    """

    t0: float
    dt: float
    values: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))
        if self.dt <= 0:
            raise ParameterError("dt must be > 0")
        if values.ndim != 1:
            raise ParameterError("values must be a 1-d array")
        if np.any(values < 0):
            raise ParameterError("rates must be nonnegative")

    def __len__(self):
        return self.values.size

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * len(self)

    @property
    def sample_times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(1, len(self) + 1)

    def __call__(self, t):
        """Linear interpolation between sample points, constant at the ends."""
        return np.interp(t, self.sample_times, self.values)

    def integral(self) -> float:
        """Exact integral of the piecewise-linear interpolant over
        [t0, t_end] (first bin uses the constant left extension)."""
        v = self.values
        if v.size == 0:
            return 0.0
        inner = _trapezoid(v, dx=self.dt)
        return float(inner + v[0] * self.dt)

    def same_grid(self, other) -> bool:
        return (len(self) == len(other)
                and abs(self.t0 - other.t0) < 1e-9
                and abs(self.dt - other.dt) < 1e-12 * max(1.0, self.dt))

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("t_s,rate_bps\n")
            for t, v in zip(self.sample_times, self.values):
                fh.write(f"{t:.9f},{float(v)!r}\n")

    @classmethod
    def from_csv(cls, path):
        data = _loadtxt_quiet(path)
        if data.size == 0:
            raise ParameterError(f"empty rate series in {path}")
        times = data[:, 0]
        dt = times[1] - times[0] if times.size > 1 else times[0]
        return cls(t0=float(times[0] - dt), dt=float(dt), values=data[:, 1])


def merge_traces(traces) -> PacketTrace:
    """Sorted merge of packet traces sharing one horizon."""
    traces = list(traces)
    if not traces:
        return PacketTrace(np.empty(0), np.empty(0), (0.0, 0.0))
    horizon = traces[0].horizon
    for tr in traces[1:]:
        if tr.horizon != horizon:
            raise ParameterError("cannot merge traces with different horizons")
    times = np.concatenate([tr.times for tr in traces])
    sizes = np.concatenate([tr.sizes for tr in traces])
    order = np.argsort(times, kind="stable")
    return PacketTrace(times[order], sizes[order], horizon)


def trace_to_inflow(trace: PacketTrace, dt: float) -> RateSeries:
    """Aggregate packet arrivals into a rate series with bin width ``dt``.

    Bin i collects bits arriving in (t0 + i*dt, t0 + (i+1)*dt]; an arrival
    exactly at t0 goes to bin 0 so total mass is conserved.
    """
    if dt <= 0:
        raise ParameterError("dt must be > 0")
    t0, t1 = trace.horizon
    n_bins = max(1, int(np.ceil((t1 - t0) / dt - 1e-12)))
    if len(trace) == 0:
        return RateSeries(t0, dt, np.zeros(n_bins))
    idx = np.ceil((trace.times - t0) / dt).astype(np.int64) - 1
    np.clip(idx, 0, n_bins - 1, out=idx)
    bits = np.bincount(idx, weights=trace.sizes, minlength=n_bins)
    return RateSeries(t0, dt, bits / dt)


def mean_rate(x: RateSeries) -> float:
    """Mean inflow (rectangle rule on the uniform grid)."""
    if len(x) == 0:
        raise ParameterError("empty rate series")
    return float(x.values.mean())


def intensity(x: RateSeries, mu: float) -> float:
    """Mean occupancy: mean rate divided by the service rate."""
    if mu <= 0:
        raise ParameterError("mu must be > 0")
    return mean_rate(x) / mu
