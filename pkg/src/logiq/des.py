"""Packet-level single-server FIFO simulator (the ground-truth oracle).

Backlog counts every bit that has arrived but not yet departed, including the
remainder of the in-service packet.  With a finite buffer, an arriving packet
is dropped whole when backlog + size would exceed the capacity (drop-tail).
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .series import PacketTrace, RateSeries, ParameterError, trace_to_inflow


@dataclass(frozen=True)
class DesConfig:
    mu: float                  # bits/s
    capacity_k: float = None   # bits; None = infinite buffer
    sample_dt: float = 60.0    # seconds between backlog samples

    def __post_init__(self):
        if self.mu <= 0:
            raise ParameterError("mu must be > 0")
        if self.sample_dt <= 0:
            raise ParameterError("sample_dt must be > 0")
        if self.capacity_k is not None and self.capacity_k <= 0:
            raise ParameterError("capacity_k must be > 0")


@dataclass(frozen=True)
class DesResult:
    sample_times: np.ndarray
    q_sampled: np.ndarray      # bits, includes the in-service remainder
    departures: PacketTrace
    drop_count: int
    drop_bits: float

    def q_to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("t_s,q_bits\n")
            for t, q in zip(self.sample_times, self.q_sampled):
                fh.write(f"{t:.9f},{float(q)!r}\n")


def simulate_fifo(trace: PacketTrace, cfg: DesConfig) -> DesResult:
    """Run the FIFO recursion over a sorted trace and sample the backlog on
    the grid t0 + i*sample_dt covering the horizon."""
    if len(trace) and np.any(np.diff(trace.times) < 0):
        raise ParameterError("trace must be sorted")
    t0, t1 = trace.horizon
    n = max(1, int(round((t1 - t0) / cfg.sample_dt)))
    sample_times = t0 + cfg.sample_dt * np.arange(n + 1)

    cap = float(cfg.capacity_k) if cfg.capacity_k is not None else 0.0
    depart, last_c, n_drop, bits_drop = kernels.des_fifo(
        trace.times, trace.sizes, float(cfg.mu), cap)

    accepted = depart >= 0.0
    dep_times = depart[accepted]
    dep_sizes = trace.sizes[accepted]
    dep_end = float(dep_times[-1]) if dep_times.size else t1
    departures = PacketTrace(dep_times, dep_sizes, (t0, max(t1, dep_end)))

    # backlog(t) = mu * max(0, C(t) - t) with C(t) the completion time of
    # the last accepted arrival at or before t
    if len(trace):
        idx = np.searchsorted(trace.times, sample_times, side="right")
        c_at = np.where(idx > 0, last_c[np.maximum(idx - 1, 0)], -np.inf)
        q = cfg.mu * np.maximum(0.0, c_at - sample_times)
        q[~np.isfinite(q)] = 0.0
    else:
        q = np.zeros_like(sample_times)

    return DesResult(sample_times, q, departures, int(n_drop), float(bits_drop))


def departures_to_outflow(result: DesResult, dt: float) -> RateSeries:
    """Bin departure completions with the same half-open rule used for
    arrivals; the trace horizon start anchors the grid."""
    t0 = result.departures.horizon[0]
    t1 = result.sample_times[-1]
    trace = PacketTrace(result.departures.times, result.departures.sizes,
                        (t0, max(t1, result.departures.horizon[1])))
    return trace_to_inflow(trace, dt)
