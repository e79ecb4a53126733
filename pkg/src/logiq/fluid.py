"""The logistic queue model: smooth outflow law, ODE integration and the
finite-buffer / variable-rate / multi-server / flow-separation / priority
extensions, plus the projected point-queue reference model.

Backlog q' = X - Y with Y = mu + exp(-alpha*q) * (min(mu, X) - mu); the
served and lost bit totals are integrated alongside q so conservation can be
checked to solver accuracy instead of by grid quadrature.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .series import RateSeries, ParameterError


class DomainError(ValueError):
    """Argument outside the operation's mathematical domain."""


class IntegrationError(RuntimeError):
    """Adaptive stepping failed; carries the first bad output time."""

    def __init__(self, message, t_fail=None):
        super().__init__(message)
        self.t_fail = t_fail


@dataclass(frozen=True)
class MultiServerRate:
    """Queue-dependent service rate of m parallel servers of speed mu0."""

    mu0: float
    m: int

    def __post_init__(self):
        if self.mu0 <= 0:
            raise ParameterError("mu0 must be > 0")
        if self.m < 1 or int(self.m) != self.m:
            raise ParameterError("m must be an integer >= 1")

    def __call__(self, q):
        return multi_server_rate(q, self.mu0, self.m)


@dataclass(frozen=True)
class QueueSpec:
    """One queue/server: service rate (constant, time function, or
    MultiServerRate), logistic steepness alpha, initial backlog, and an
    optional finite capacity with smoothed-gate parameters."""

    mu: object
    alpha: float
    q0: float = 0.0
    capacity_k: float = None
    gate_h0: float = None   # defaults to min(1, mu / max inflow)
    gate_n: float = None    # defaults to 500 / capacity_k

    def __post_init__(self):
        if self.alpha <= 0:
            raise ParameterError("alpha must be > 0")
        if self.q0 < 0:
            raise ParameterError("q0 must be >= 0")
        if isinstance(self.mu, (int, float)) and self.mu <= 0:
            raise ParameterError("mu must be > 0")
        if self.capacity_k is not None:
            if self.capacity_k <= 0:
                raise ParameterError("capacity_k must be > 0")
            if self.q0 >= self.capacity_k:
                raise ParameterError("q0 must be < capacity_k")
        if self.gate_h0 is not None and not (0.0 < self.gate_h0 <= 1.0):
            raise ParameterError("gate_h0 must be in (0, 1]")
        if self.gate_n is not None and self.gate_n <= 0:
            raise ParameterError("gate_n must be > 0")


@dataclass(frozen=True)
class SolverOptions:
    rel_tol: float = 1e-6
    abs_tol: float = 1e-9   # bits
    max_step: float = None  # default: min(output_dt, inflow dt)
    output_dt: float = None  # default: inflow dt

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ParameterError("tolerances must be > 0")


@dataclass(frozen=True)
class SolverStats:
    steps: int
    rejected: int
    max_negative_q: float

    def to_text(self) -> str:
        return (f"steps={self.steps}\nrejected={self.rejected}\n"
                f"max_negative_q={self.max_negative_q!r}\n")


@dataclass(frozen=True)
class QueueTrajectory:
    """Queue solution on a uniform output grid.

    ``served`` and ``lost`` are cumulative bits (integrated with the state),
    so ``q[i] - q[0] == inflow-integral - served[i] - lost[i]`` up to solver
    tolerance.
    """

    grid: np.ndarray
    q: np.ndarray
    y: np.ndarray
    served: np.ndarray
    lost: np.ndarray
    stats: SolverStats

    @property
    def output_dt(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def lost_mass(self) -> float:
        return float(self.lost[-1])

    def q_at(self, t):
        """Linear interpolation of the backlog between grid points."""
        return np.interp(t, self.grid, self.q)

    def outflow_series(self, kind="binned") -> RateSeries:
        """Outflow as a RateSeries on the output grid.

        "binned": bin-average rates from the served-bits accumulator (mass
        exact); "instant": instantaneous outflow at the right bin edges.
        """
        dt = self.output_dt
        if kind == "binned":
            values = np.maximum(np.diff(self.served), 0.0) / dt
        elif kind == "instant":
            values = self.y[1:]
        else:
            raise ParameterError(f"unknown outflow kind {kind!r}")
        return RateSeries(float(self.grid[0]), dt, values)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("t_s,q_bits,y_bps\n")
            for t, qi, yi in zip(self.grid, self.q, self.y):
                fh.write(f"{t:.9f},{float(qi)!r},{float(yi)!r}\n")


def outflow_rate(x, q, mu, alpha):
    """Smooth outflow law: mu + exp(-alpha*q) * (min(mu, x) - mu)."""
    x = np.asarray(x, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any(x < 0) or np.any(q < 0):
        raise DomainError("inflow and backlog must be nonnegative")
    if mu <= 0 or alpha <= 0:
        raise DomainError("mu and alpha must be > 0")
    result = mu + np.exp(-alpha * q) * (np.minimum(mu, x) - mu)
    return float(result) if result.ndim == 0 else result


def _mu_value(mu, t, q):
    if isinstance(mu, MultiServerRate):
        return mu(q)
    if callable(mu):
        return float(mu(t))
    return float(mu)


def logistic_rhs(t, q, inflow, spec: QueueSpec):
    """Right-hand side X(t) - Y(X, q) of the queue ODE; small negative q is
    evaluated at 0."""
    qc = max(float(q), 0.0)
    x = float(inflow(t)) if callable(inflow) else float(inflow)
    mu = _mu_value(spec.mu, t, qc)
    return x - outflow_rate(x, qc, mu, spec.alpha)


def point_queue_rhs(t, q, inflow, mu):
    """Projected point-queue right-hand side: X - mu while the queue is
    nonempty, clamped at the q = 0 boundary."""
    x = float(inflow(t)) if callable(inflow) else float(inflow)
    if q > 0:
        return x - mu
    return max(0.0, x - mu)


def compute_alpha(inflow: RateSeries, mu: float) -> float:
    """Logistic steepness from the mean occupancy: alpha = rho / mu."""
    from .series import mean_rate

    if mu <= 0:
        raise ParameterError("mu must be > 0")
    lam = mean_rate(inflow)
    if lam <= 0:
        raise DomainError("mean inflow is zero; alpha must be given explicitly")
    return lam / (mu * mu)


def exit_time(t, q_at_t, mu):
    """Time at which a bit arriving at t leaves the system: t + q/mu."""
    if mu <= 0:
        raise DomainError("mu must be > 0")
    return np.asarray(t, dtype=float) + np.asarray(q_at_t, dtype=float) / mu


def emptying_time_bound(t_x, q_x, eps, mu, x_inf, alpha):
    """Upper bound on the time to drain the backlog from q_x down to eps
    under a sustained inflow ceiling x_inf < mu."""
    if not 0.0 < eps <= q_x:
        raise DomainError("need 0 < eps <= q_x")
    if not 0.0 <= x_inf < mu:
        raise DomainError("bound requires 0 <= x_inf < mu")
    beta = mu - x_inf
    return t_x + (q_x - eps) / beta + math.log(q_x / eps) / (alpha * beta)


def queue_decay_bound(t, t_x, q_x, mu, x_inf, alpha):
    """Exponential envelope exp(alpha*(c - beta*t)) valid for t >= t_x when
    the inflow stays below x_inf < mu."""
    if not 0.0 <= x_inf < mu:
        raise DomainError("bound requires 0 <= x_inf < mu")
    if q_x <= 0:
        raise DomainError("bound requires q_x > 0")
    beta = mu - x_inf
    c = q_x + math.log(q_x) / alpha + beta * t_x
    return np.exp(alpha * (c - beta * np.asarray(t, dtype=float)))


def heaviside_smooth(q, k, h0, n):
    """Logistic gate: 1 at q << k, h0 at q = k, 0 at q >> k."""
    if k <= 0 or n <= 0:
        raise ParameterError("k and n must be > 0")
    if not 0.0 < h0 <= 1.0:
        raise ParameterError("h0 must be in (0, 1]")
    z = np.clip(n * (np.asarray(q, dtype=float) - k), -700.0, 700.0)
    result = 1.0 / (1.0 + (1.0 / h0 - 1.0) * np.exp(z))
    return float(result) if result.ndim == 0 else result


def multi_server_rate(q, mu0, m):
    """Aggregate rate of m servers of speed mu0, continuous at q = m - 1."""
    if m < 1:
        raise ParameterError("m must be >= 1")
    if mu0 <= 0:
        raise ParameterError("mu0 must be > 0")
    q = np.asarray(q, dtype=float)
    result = np.where(q >= m - 1, mu0 * m, mu0 * (1.0 + q))
    return float(result) if result.ndim == 0 else result


def _output_grid(inflow: RateSeries, opts: SolverOptions):
    out_dt = opts.output_dt if opts.output_dt is not None else inflow.dt
    if out_dt <= 0:
        raise ParameterError("output_dt must be > 0")
    span = inflow.t_end - inflow.t0
    n = max(1, int(round(span / out_dt)))
    return inflow.t0 + out_dt * np.arange(n + 1)


def _kernel_mu(spec: QueueSpec, inflow: RateSeries):
    empty = np.empty(0)
    if isinstance(spec.mu, MultiServerRate):
        return kernels.MU_MULTISERVER, 0.0, empty, spec.mu.mu0, float(spec.mu.m)
    if callable(spec.mu):
        mu_vals = np.asarray([float(spec.mu(t)) for t in inflow.sample_times],
                             dtype=float)
        if np.any(mu_vals <= 0):
            raise ParameterError("mu(t) must stay positive")
        return kernels.MU_TIME, 0.0, mu_vals, 0.0, 1.0
    return kernels.MU_CONST, float(spec.mu), empty, 0.0, 1.0


def _mu_floor(spec: QueueSpec, inflow: RateSeries) -> float:
    if isinstance(spec.mu, MultiServerRate):
        return spec.mu.mu0
    if callable(spec.mu):
        return min(float(spec.mu(t)) for t in inflow.sample_times)
    return float(spec.mu)


def integrate_queue(inflow: RateSeries, spec: QueueSpec,
                    opts: SolverOptions = SolverOptions()) -> QueueTrajectory:
    """Integrate the queue ODE (finite-buffer gate included when the spec
    carries a capacity) over the inflow's window."""
    if len(inflow) == 0:
        raise ParameterError("empty inflow")
    grid = _output_grid(inflow, opts)
    mu_mode, mu_const, mu_vals, mu0, m_servers = _kernel_mu(spec, inflow)

    gate_on = spec.capacity_k is not None
    if gate_on:
        cap_k = float(spec.capacity_k)
        m_x = float(inflow.values.max())
        if spec.gate_h0 is not None:
            h0 = spec.gate_h0
        else:
            h0 = min(1.0, _mu_floor(spec, inflow) / m_x) if m_x > 0 else 1.0
        gate_n = spec.gate_n if spec.gate_n is not None else 500.0 / cap_k
    else:
        cap_k, h0, gate_n = 0.0, 1.0, 1.0

    out_dt = grid[1] - grid[0]
    max_step = opts.max_step if opts.max_step is not None else min(out_dt, inflow.dt)

    x_first = inflow.t0 + inflow.dt
    q, y, served, lost, stats = kernels.integrate_logistic(
        grid, x_first, inflow.dt, inflow.values, mu_mode, mu_const, mu_vals,
        mu0, m_servers, float(spec.alpha), gate_on, cap_k, float(h0),
        float(gate_n), float(spec.q0), opts.rel_tol, opts.abs_tol, max_step)

    status, n_steps, n_rej, max_neg = stats
    if status != kernels.OK:
        t_fail = float(grid[np.isnan(q)][0])
        raise IntegrationError(f"step size underflow near t={t_fail:.6g} s",
                               t_fail=t_fail)
    q_max = float(q.max())
    # Roundoff alone produces excursions of order eps * step * rate, so the
    # tolerance carries an absolute floor on the same (integral X + q0) scale
    # used by the conservation property.
    mass = float(inflow.integral()) + float(spec.q0)
    neg_tol = max(1e-6 * q_max, 10.0 * opts.abs_tol, 1e-12 * mass)
    if max_neg > neg_tol:
        raise IntegrationError(
            f"negative backlog excursion {max_neg:g} exceeds tolerance {neg_tol:g}")
    return QueueTrajectory(grid, q, y, served, lost,
                           SolverStats(n_steps, n_rej, max_neg))


def integrate_finite_queue(inflow: RateSeries, spec: QueueSpec,
                           opts: SolverOptions = SolverOptions()) -> QueueTrajectory:
    """Finite-buffer integration; requires spec.capacity_k. The trajectory's
    ``lost`` accumulator reports the annihilated inflow mass."""
    if spec.capacity_k is None:
        raise ParameterError("integrate_finite_queue needs spec.capacity_k")
    return integrate_queue(inflow, spec, opts)


def integrate_point_queue(inflow: RateSeries, mu: float, q0: float = 0.0,
                          opts: SolverOptions = SolverOptions()) -> np.ndarray:
    """Exact trajectory of the projected point-queue model on the output
    grid (piecewise-quadratic closed form, no ODE stepping)."""
    if mu <= 0:
        raise ParameterError("mu must be > 0")
    grid = _output_grid(inflow, opts)
    x_first = inflow.t0 + inflow.dt
    q = kernels.point_queue_exact(grid, x_first, inflow.dt, inflow.values,
                                  float(mu), float(q0))
    return grid, q


def split_outflow(components, total_out: RateSeries):
    """Share an aggregate outflow among inflow components proportionally to
    their instantaneous inflow weight; zero-inflow instants give zero shares."""
    components = list(components)
    if not components:
        raise ParameterError("need at least one component")
    for c in components:
        if not c.same_grid(total_out):
            raise ParameterError("components and outflow must share the grid")
    x_total = np.sum([c.values for c in components], axis=0)
    safe = np.where(x_total > 1e-12, x_total, 1.0)
    ratio = np.where(x_total > 1e-12, total_out.values / safe, 0.0)
    return [RateSeries(c.t0, c.dt, ratio * c.values) for c in components]


def priority_rates(x1, x2, q1, mu, alpha):
    """Service split (mu1, mu2) of the priority pair; mu1 + mu2 == mu."""
    x = x1 + x2
    if x < 1e-12:
        mu2 = 0.0
    else:
        mu2 = (x2 / x) * mu * math.exp(-alpha * max(q1, 0.0))
    return mu - mu2, mu2


def integrate_priority_pair(x1: RateSeries, x2: RateSeries, mu: float,
                            alpha: float = None, q0s=(0.0, 0.0),
                            opts: SolverOptions = SolverOptions()):
    """Integrate the coupled priority system; x1 has priority over x2.

    alpha defaults to compute_alpha on the aggregate inflow x1 + x2.
    Returns (priority trajectory, low-priority trajectory).
    """
    if not x1.same_grid(x2):
        raise ParameterError("priority inflows must share the grid")
    if mu <= 0:
        raise ParameterError("mu must be > 0")
    aggregate = RateSeries(x1.t0, x1.dt, x1.values + x2.values)
    if alpha is None:
        alpha = compute_alpha(aggregate, mu)
    grid = _output_grid(aggregate, opts)
    out_dt = grid[1] - grid[0]
    max_step = opts.max_step if opts.max_step is not None else min(out_dt, x1.dt)
    x_first = x1.t0 + x1.dt
    (q1, q2, y1, y2, s1, s2, stats) = kernels.integrate_priority(
        grid, x_first, x1.dt, x1.values, x2.values, float(mu), float(alpha),
        float(q0s[0]), float(q0s[1]), opts.rel_tol, opts.abs_tol, max_step)
    status, n_steps, n_rej, max_neg = stats
    if status != kernels.OK:
        t_fail = float(grid[np.isnan(q1)][0])
        raise IntegrationError(f"step size underflow near t={t_fail:.6g} s",
                               t_fail=t_fail)
    zeros = np.zeros_like(q1)
    st = SolverStats(n_steps, n_rej, max_neg)
    traj1 = QueueTrajectory(grid, q1, y1, s1, zeros, st)
    traj2 = QueueTrajectory(grid, q2, y2, s2, zeros, st)
    return traj1, traj2
