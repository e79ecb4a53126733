"""Digital-twin layer: a two-tier star-core-star topology of logistic queues
with end-to-end latency KPIs.

Each origin feeds an access queue; the summed access outflows cross one
finite-buffer core link; the core outflow is split per-origin and routed by a
row-stochastic matrix to egress queues.  Latency follows a packet through the
three stages, looking the queues up at its (staggered) arrival instants.
"""

from dataclasses import dataclass, field

import numpy as np

from .fluid import (QueueSpec, SolverOptions, QueueTrajectory, compute_alpha,
                    integrate_queue, integrate_priority_pair, split_outflow)
from .series import RateSeries, ParameterError, mean_rate


class HorizonError(ValueError):
    """Latency lookup walked past the simulated window."""


@dataclass(frozen=True)
class Topology:
    access_mu: tuple          # bits/s, one per origin
    core_mu: float            # bits/s
    core_k: float             # bits
    egress_xi: tuple          # bits/s, one per destination
    routing: np.ndarray       # n x m, rows sum to 1
    packet_size_bits: float
    core_h0: float = None     # smoothed-gate overrides for the core
    core_n: float = None
    td_at_core_rate: bool = True  # divisor of the core transit time
    alpha_access: tuple = None    # optional per-link alpha pins
    alpha_core: float = None
    alpha_egress: tuple = None

    def __post_init__(self):
        routing = np.asarray(self.routing, dtype=float)
        object.__setattr__(self, "routing", routing)
        object.__setattr__(self, "access_mu", tuple(float(v) for v in self.access_mu))
        object.__setattr__(self, "egress_xi", tuple(float(v) for v in self.egress_xi))
        n, m = len(self.access_mu), len(self.egress_xi)
        if routing.shape != (n, m):
            raise ParameterError(f"routing must be {n}x{m}")
        if np.any(routing < 0):
            raise ParameterError("routing entries must be nonnegative")
        # Published matrices are often rounded to a few decimals, so accept a
        # small row-sum slack and renormalize so the split stays conservative.
        row_sums = routing.sum(axis=1)
        if np.any(np.abs(row_sums - 1.0) > 1e-3):
            raise ParameterError("routing rows must sum to 1")
        object.__setattr__(self, "routing", routing / row_sums[:, None])
        if any(v <= 0 for v in self.access_mu) or any(v <= 0 for v in self.egress_xi):
            raise ParameterError("all rates must be positive")
        if self.core_mu <= 0 or self.core_k <= 0:
            raise ParameterError("core rate and capacity must be positive")
        if self.packet_size_bits < 0:
            raise ParameterError("packet size must be nonnegative")

    @property
    def n_origins(self):
        return len(self.access_mu)

    @property
    def n_destinations(self):
        return len(self.egress_xi)


@dataclass(frozen=True)
class DtState:
    access: tuple             # QueueTrajectory per origin
    core: QueueTrajectory     # non-priority core queue when priority is active
    egress: tuple             # QueueTrajectory per destination
    access_out: tuple         # Y_i as RateSeries
    core_in: RateSeries       # Y = sum Y_i
    core_out: RateSeries      # Z
    egress_in: tuple          # Z_j
    priority: QueueTrajectory = None  # priority core queue, if injected


def _link_alpha(inflow: RateSeries, mu: float, pinned) -> float:
    if pinned is not None:
        return float(pinned)
    if mean_rate(inflow) <= 0:
        return 1.0 / mu  # idle link: any alpha keeps q at 0
    return compute_alpha(inflow, mu)


def _route_split(topology, access_out, core_out):
    """Per-destination core outflows: route the per-origin share of Z."""
    shares = split_outflow(access_out, core_out)
    p = topology.routing
    egress_in = []
    for j in range(topology.n_destinations):
        vals = np.sum([p[i, j] * shares[i].values
                       for i in range(topology.n_origins)], axis=0)
        egress_in.append(RateSeries(core_out.t0, core_out.dt, vals))
    return egress_in


def _access_stage(topology, inflows, opts):
    trajs, outs = [], []
    alphas = topology.alpha_access or (None,) * topology.n_origins
    for x, mu_i, a in zip(inflows, topology.access_mu, alphas):
        spec = QueueSpec(mu=mu_i, alpha=_link_alpha(x, mu_i, a))
        traj = integrate_queue(x, spec, opts)
        trajs.append(traj)
        # stage-to-stage coupling samples the outflow law at the bin edges;
        # re-binning would smooth single-bin peaks a second time and hide
        # them from the downstream queues
        outs.append(traj.outflow_series("instant"))
    return trajs, outs


def _egress_stage(topology, egress_in, opts):
    trajs = []
    alphas = topology.alpha_egress or (None,) * topology.n_destinations
    for z_j, xi_j, a in zip(egress_in, topology.egress_xi, alphas):
        spec = QueueSpec(mu=xi_j, alpha=_link_alpha(z_j, xi_j, a))
        trajs.append(integrate_queue(z_j, spec, opts))
    return trajs


def propagate(topology: Topology, inflows,
              opts: SolverOptions = SolverOptions()) -> DtState:
    """Run the access -> core -> egress pipeline for one inflow set."""
    inflows = list(inflows)
    if len(inflows) != topology.n_origins:
        raise ParameterError("one inflow per origin required")
    for x in inflows[1:]:
        if not x.same_grid(inflows[0]):
            raise ParameterError("inflows must share the grid")

    access, access_out = _access_stage(topology, inflows, opts)
    core_in = RateSeries(inflows[0].t0, inflows[0].dt,
                         np.sum([y.values for y in access_out], axis=0))
    core_spec = QueueSpec(mu=topology.core_mu,
                          alpha=_link_alpha(core_in, topology.core_mu,
                                            topology.alpha_core),
                          capacity_k=topology.core_k,
                          gate_h0=topology.core_h0, gate_n=topology.core_n)
    core = integrate_queue(core_in, core_spec, opts)
    core_out = core.outflow_series("instant")
    egress_in = _route_split(topology, access_out, core_out)
    egress = _egress_stage(topology, egress_in, opts)
    return DtState(tuple(access), core, tuple(egress), tuple(access_out),
                   core_in, core_out, tuple(egress_in))


def inject_priority_flow(topology: Topology, inflows,
                         priority_inflow: RateSeries,
                         opts: SolverOptions = SolverOptions()) -> DtState:
    """Re-solve the core as a priority pair (the injected flow is served
    first); downstream propagation uses the non-priority outflow."""
    inflows = list(inflows)
    if not priority_inflow.same_grid(inflows[0]):
        raise ParameterError("priority inflow must share the grid")
    access, access_out = _access_stage(topology, inflows, opts)
    core_in = RateSeries(inflows[0].t0, inflows[0].dt,
                         np.sum([y.values for y in access_out], axis=0))
    prio_traj, core = integrate_priority_pair(
        priority_inflow, core_in, topology.core_mu,
        alpha=topology.alpha_core, opts=opts)
    core_out = core.outflow_series("instant")
    egress_in = _route_split(topology, access_out, core_out)
    egress = _egress_stage(topology, egress_in, opts)
    return DtState(tuple(access), core, tuple(egress), tuple(access_out),
                   core_in, core_out, tuple(egress_in), priority=prio_traj)


def latency(t, i, j, state: DtState, topology: Topology):
    """Path latency o_i -> d_j for a packet departing at t (scalar or array).

    Queue values are interpolated linearly; raises HorizonError if the
    staggered lookups leave the simulated window.
    """
    s = topology.packet_size_bits
    mu_i = topology.access_mu[i]
    mu = topology.core_mu
    xi_j = topology.egress_xi[j]
    t = np.asarray(t, dtype=float)
    t_end = state.core.grid[-1]
    if np.any(t < state.core.grid[0]) or np.any(t > t_end):
        raise HorizonError("departure time outside the simulated window")

    d_access = (state.access[i].q_at(t) + s) / mu_i
    t_o = t + d_access
    if np.any(t_o > t_end):
        raise HorizonError("core arrival beyond the simulated window")
    q_core = state.core.q_at(t_o)
    d_core = (q_core + s) / mu
    t_d = t_o + (q_core + s) / (mu if topology.td_at_core_rate else mu_i)
    if np.any(t_d > t_end):
        raise HorizonError("egress arrival beyond the simulated window")
    d_egress = (state.egress[j].q_at(t_d) + s) / xi_j
    result = d_access + d_core + d_egress
    return float(result) if result.ndim == 0 else result


def expected_latency(t, state: DtState, topology: Topology):
    """Unweighted mean of the per-pair latencies at t."""
    n, m = topology.n_origins, topology.n_destinations
    total = None
    for i in range(n):
        for j in range(m):
            l_ij = np.asarray(latency(t, i, j, state, topology), dtype=float)
            total = l_ij if total is None else total + l_ij
    result = total / (n * m)
    return float(result) if result.ndim == 0 else result


def latency_series(state: DtState, topology: Topology):
    """(times, L_od) over the largest prefix of the grid where every pair's
    staggered lookups stay inside the horizon."""
    grid = state.core.grid
    lo, hi = 0, len(grid)  # bisect the largest evaluable prefix length
    while lo < hi:
        mid = (lo + hi + 1) // 2
        try:
            expected_latency(grid[:mid], state, topology)
            lo = mid
        except HorizonError:
            hi = mid - 1
    if lo == 0:
        raise HorizonError("no evaluable latency window")
    times = grid[:lo]
    return times, np.asarray(expected_latency(times, state, topology))


def max_expected_latency(state: DtState, topology: Topology) -> float:
    _, l_od = latency_series(state, topology)
    return float(l_od.max())
