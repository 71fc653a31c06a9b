"""Geodesic-type dynamics on circle fields: bilinear operators, time
stepping, flow-map reconstruction and conserved-quantity diagnostics.

Two equivalent right-hand sides are provided:

* ``euler_rhs(A, u)``  -- velocity form for an inertia operator A:
  u_t = -A^{-1}(2 (Au) u_x + u (Au)_x).
* ``mub_rhs(b, u)``    -- momentum form of the mu-b family with
  m = mu(u) - u_xx, resolved for u_t by inverting the mean-minus-second-
  derivative operator on m_x u + b m u_x.  b = 2 reproduces ``euler_rhs``
  with that same operator.

The Lie bracket convention is [u, v] = u v_x - u_x v; only the
antisymmetric half of the covariant derivative depends on this choice.
Time integration is fixed-step classical RK4.  Flow maps g solve the
characteristic ODE g' = u(t, g) with g(0) = id and are advanced by RK4 as
well, evaluating u off-grid by exact trigonometric interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import inertia, spectral
from .inertia import InertiaSpec

__all__ = [
    "lie_bracket",
    "christoffel",
    "covariant_derivative",
    "euler_rhs",
    "mub_rhs",
    "step_rk4",
    "SimulationConfig",
    "SimulationState",
    "DiagnosticsRow",
    "DIAGNOSTICS_COLUMNS",
    "SimulationResult",
    "simulate",
    "initial_field",
    "FlowSeries",
    "reconstruct_flow",
    "flow_defect",
    "diagnostics",
    "STATUS_COMPLETED",
    "STATUS_BLOWUP",
    "STATUS_DIFFEO_LOST",
    "INITIAL_PRESETS",
]

STATUS_COMPLETED = "completed"
STATUS_BLOWUP = "blow-up suspected"
STATUS_DIFFEO_LOST = "diffeomorphism lost"


def lie_bracket(u: np.ndarray, v: np.ndarray, dealias: bool = True) -> np.ndarray:
    """Vector-field bracket [u, v] = u v_x - u_x v."""
    return (spectral.product(u, spectral.derivative(v, 1), dealias)
            - spectral.product(spectral.derivative(u, 1), v, dealias))


def christoffel(spec: InertiaSpec, u: np.ndarray, v: np.ndarray, dealias: bool = True) -> np.ndarray:
    """Symmetric bilinear term of the geodesic equation for the operator A.

    B(u, v) = 1/2 A^{-1} [2 (Au) v_x + 2 (Av) u_x + u (Av)_x + v (Au)_x].
    The bracketed combination has zero mean for every even multiplier A, so
    the ``neg_dxx`` inverse applies on its mean-zero gauge.
    """
    au = inertia.apply(spec, u)
    av = inertia.apply(spec, v)
    t = (2.0 * spectral.product(au, spectral.derivative(v, 1), dealias)
         + 2.0 * spectral.product(av, spectral.derivative(u, 1), dealias)
         + spectral.product(u, spectral.derivative(av, 1), dealias)
         + spectral.product(v, spectral.derivative(au, 1), dealias))
    return 0.5 * inertia.invert(spec, t)


def covariant_derivative(spec: InertiaSpec, u: np.ndarray, v: np.ndarray,
                         dealias: bool = True) -> np.ndarray:
    """Right-invariant connection: nabla_u v = 1/2 [u, v] + B(u, v)."""
    return 0.5 * lie_bracket(u, v, dealias) + christoffel(spec, u, v, dealias)


def euler_rhs(spec: InertiaSpec, u: np.ndarray, dealias: bool = True) -> np.ndarray:
    """Velocity-form right-hand side u_t = -A^{-1}(2 (Au) u_x + u (Au)_x)."""
    au = inertia.apply(spec, u)
    t = (2.0 * spectral.product(au, spectral.derivative(u, 1), dealias)
         + spectral.product(u, spectral.derivative(au, 1), dealias))
    return -inertia.invert(spec, t)


def mub_rhs(b: float, u: np.ndarray, dealias: bool = True) -> np.ndarray:
    """mu-b family right-hand side, resolved for u_t.

    m = mu(u) - u_xx evolves by m_t = -(m_x u + b m u_x); applying the
    inverse of the mean-minus-second-derivative operator gives u_t.
    """
    m = inertia.apply(inertia.MU_MINUS_DXX, u)
    t = (spectral.product(spectral.derivative(m, 1), u, dealias)
         + b * spectral.product(m, spectral.derivative(u, 1), dealias))
    return -inertia.invert(inertia.MU_MINUS_DXX, t)


def step_rk4(rhs, u: np.ndarray, dt: float) -> np.ndarray:
    """One classical 4-stage Runge-Kutta step of u_t = rhs(u)."""
    k1 = rhs(u)
    k2 = rhs(u + 0.5 * dt * k1)
    k3 = rhs(u + 0.5 * dt * k2)
    k4 = rhs(u + dt * k3)
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


INITIAL_PRESETS = {
    "cos1": {"mean": 0.0, "cos": [1.0], "sin": []},
    "mucauchy": {"mean": 0.1, "cos": [0.2], "sin": []},
}


@dataclass
class SimulationConfig:
    """Everything needed for one deterministic run."""

    n: int = 256
    dt: float = 1e-3
    t_end: float = 0.5
    output_every: int = 10
    form: str = "euler"                        # "euler" | "mub"
    b: float = 2.0                             # used by the mub form
    inertia: InertiaSpec = field(default_factory=InertiaSpec.mu_minus_dxx)
    initial: dict = field(default_factory=lambda: {"type": "preset", "name": "mucauchy"})
    dealias: bool = True
    blowup_threshold: float = 1e3
    track_flow: bool = False


@dataclass
class SimulationState:
    """Velocity snapshot, optionally with its momentum m = A u."""

    t: float
    u: np.ndarray
    m: np.ndarray | None = None

    def momentum_defect(self, spec: InertiaSpec) -> float:
        if self.m is None:
            return 0.0
        return float(np.max(np.abs(self.m - inertia.apply(spec, self.u))))


@dataclass
class DiagnosticsRow:
    t: float
    mu_u: float
    mu_m: float
    energy_mu: float
    energy_A: float
    linf_u: float
    min_gx: float          # nan when the flow is not tracked


DIAGNOSTICS_COLUMNS = ("t", "mu_u", "mu_m", "energy_mu", "energy_A", "linf_u", "min_gx")


@dataclass
class SimulationResult:
    config: SimulationConfig
    status: str
    rows: list[DiagnosticsRow]
    times: np.ndarray          # every accepted step, spacing dt
    u_history: np.ndarray      # (len(times), n)
    flow_history: np.ndarray | None = None  # unwrapped particle positions


def _step_count(dt: float, t_end: float) -> int:
    steps = int(round(t_end / dt))
    if steps < 1 or abs(steps * dt - t_end) > 1e-9 * max(1.0, abs(t_end)):
        raise ValueError("t_end must be an integer number of dt steps")
    return steps


def validate_config(config: SimulationConfig) -> None:
    """Raise ValueError naming the offending field on bad configuration."""
    if config.n < 8 or config.n % 2:
        raise ValueError("n: grid size must be even and at least 8")
    if not (np.isfinite(config.dt) and config.dt > 0.0):
        raise ValueError("dt: time step must be positive")
    if not (np.isfinite(config.t_end) and config.t_end > 0.0):
        raise ValueError("t_end: final time must be positive")
    try:
        _step_count(config.dt, config.t_end)
    except ValueError as exc:
        raise ValueError(f"t_end: {exc}") from None
    if config.output_every < 1 or config.output_every != int(config.output_every):
        raise ValueError("output_every: must be a positive integer")
    if config.form not in ("euler", "mub"):
        raise ValueError("form: must be 'euler' or 'mub'")
    if not np.isfinite(config.b):
        raise ValueError("b: must be a finite real number")
    if not isinstance(config.inertia, InertiaSpec):
        raise ValueError("inertia: must be an InertiaSpec")
    if not (np.isfinite(config.blowup_threshold) and config.blowup_threshold > 0.0):
        raise ValueError("blowup_threshold: must be positive")
    u0 = initial_field(config)
    if config.form == "euler" and config.inertia.kind == "neg_dxx":
        if abs(spectral.mean(u0)) > inertia.MEAN_TOL:
            raise ValueError(
                "initial: -d_xx dynamics require mean-zero initial data "
                f"(mean is {spectral.mean(u0):.3e})")


def initial_field(config: SimulationConfig) -> np.ndarray:
    """Build and validate the initial condition of a run."""
    spec = config.initial
    if not isinstance(spec, dict) or "type" not in spec:
        raise ValueError("initial: expected {'type': 'preset'|'trig', ...}")
    if spec["type"] == "preset":
        name = spec.get("name")
        if name not in INITIAL_PRESETS:
            raise ValueError(f"initial.name: unknown preset {name!r}; "
                             f"available: {sorted(INITIAL_PRESETS)}")
        spec = INITIAL_PRESETS[name]
    elif spec["type"] == "trig":
        pass
    else:
        raise ValueError(f"initial.type: must be 'preset' or 'trig', got {spec['type']!r}")
    cos = spec.get("cos", [])
    sin = spec.get("sin", [])
    mean_value = float(spec.get("mean", 0.0))
    max_mode = max(len(cos), len(sin))
    if config.dealias and max_mode > config.n // 3:
        raise ValueError("initial: modes must stay within n/3 when dealiasing is on")
    try:
        return spectral.trig_field(config.n, mean_value, cos, sin)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"initial: {exc}") from None


def _min_gx(g: np.ndarray) -> float:
    gx = 1.0 + spectral.derivative(g - spectral.grid(g.size), 1)
    return float(gx.min())


def diagnostics(spec: InertiaSpec, u: np.ndarray, t: float,
                g: np.ndarray | None = None) -> DiagnosticsRow:
    """Conserved/monitored quantities of a state (momentum taken as A u)."""
    m = inertia.apply(spec, u)
    return DiagnosticsRow(
        t=t,
        mu_u=spectral.mean(u),
        mu_m=spectral.mean(m),
        energy_mu=spectral.inner_mu(u, u),
        energy_A=spectral.inner_l2(m, u),
        linf_u=float(np.max(np.abs(u))),
        min_gx=_min_gx(g) if g is not None else math.nan,
    )


def _rk4_joint(rhs, u, g, dt):
    # classical RK4 on the coupled system (u, g); the u stages do not
    # depend on g, so the velocity update is identical with or without
    # flow tracking
    k1 = rhs(u)
    u2 = u + 0.5 * dt * k1
    k2 = rhs(u2)
    u3 = u + 0.5 * dt * k2
    k3 = rhs(u3)
    u4 = u + dt * k3
    k4 = rhs(u4)
    u_new = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if g is None:
        return u_new, None
    l1 = spectral.evaluate(u, g)
    l2 = spectral.evaluate(u2, g + 0.5 * dt * l1)
    l3 = spectral.evaluate(u3, g + 0.5 * dt * l2)
    l4 = spectral.evaluate(u4, g + dt * l3)
    return u_new, g + (dt / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4)


def simulate(config: SimulationConfig) -> SimulationResult:
    """Run the configured dynamics to t_end with fixed-step RK4.

    Diagnostics rows are emitted at t = 0, every ``output_every`` steps and
    at the final step.  The run stops early, with the status flagged rather
    than raising, when the sup norm exceeds ``blowup_threshold``, a
    non-finite value appears, or (with ``track_flow``) the flow map stops
    being a diffeomorphism.
    """
    validate_config(config)
    u = initial_field(config)
    if config.form == "mub":
        b = config.b
        spec_diag = inertia.MU_MINUS_DXX
        def rhs(w):
            return mub_rhs(b, w, config.dealias)
    else:
        spec = config.inertia
        spec_diag = spec
        def rhs(w):
            return euler_rhs(spec, w, config.dealias)

    steps = _step_count(config.dt, config.t_end)
    g = spectral.grid(config.n).copy() if config.track_flow else None
    times = [0.0]
    u_hist = [u.copy()]
    g_hist = [g.copy()] if g is not None else None
    rows = [diagnostics(spec_diag, u, 0.0, g)]
    status = STATUS_COMPLETED

    for s in range(1, steps + 1):
        u, g = _rk4_joint(rhs, u, g, config.dt)
        if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > config.blowup_threshold:
            status = STATUS_BLOWUP
            break
        t = s * config.dt
        times.append(t)
        u_hist.append(u.copy())
        if g_hist is not None:
            g_hist.append(g.copy())
        if s % config.output_every == 0 or s == steps:
            row = diagnostics(spec_diag, u, t, g)
            rows.append(row)
            if g is not None and row.min_gx <= 0.0:
                status = STATUS_DIFFEO_LOST
                break

    return SimulationResult(
        config=config,
        status=status,
        rows=rows,
        times=np.asarray(times),
        u_history=np.asarray(u_hist),
        flow_history=np.asarray(g_hist) if g_hist is not None else None,
    )


@dataclass
class FlowSeries:
    """Flow maps g(t) on the particle grid, with Jacobians g_x.

    Positions are unwrapped (winding kept), so g - id is periodic and g_x
    comes from spectral differentiation of that difference.
    """

    times: np.ndarray
    g: np.ndarray    # (len(times), n)
    gx: np.ndarray   # (len(times), n)

    def min_gx(self) -> np.ndarray:
        return self.gx.min(axis=1)


def _flow_jacobian(g: np.ndarray) -> np.ndarray:
    n = g.shape[-1]
    d = g - spectral.grid(n)
    c = np.fft.rfft(d, axis=-1)
    w = 2j * np.pi * np.arange(n // 2 + 1)
    c = c * w
    c[..., -1] = 0.0
    return 1.0 + np.fft.irfft(c, n, axis=-1)


def reconstruct_flow(u_series: np.ndarray, dt: float) -> FlowSeries:
    """Integrate the characteristic ODE g' = u(t, g) through a u time series.

    ``u_series`` holds snapshots spaced ``dt`` apart; each RK4 step of the
    flow spans 2*dt so the midpoint snapshot supplies the interior stage
    velocities.  Requires an even number of snapshot intervals.
    """
    u_series = np.asarray(u_series, dtype=float)
    if u_series.ndim != 2:
        raise ValueError("u_series must be a (times, grid) array")
    intervals = u_series.shape[0] - 1
    if intervals < 2 or intervals % 2:
        raise ValueError("u_series needs an even number of intervals (>= 2)")
    n = u_series.shape[1]
    h = 2.0 * dt
    g = spectral.grid(n).copy()
    frames = [g.copy()]
    for i in range(intervals // 2):
        u0 = u_series[2 * i]
        um = u_series[2 * i + 1]
        u1 = u_series[2 * i + 2]
        l1 = spectral.evaluate(u0, g)
        l2 = spectral.evaluate(um, g + 0.5 * h * l1)
        l3 = spectral.evaluate(um, g + 0.5 * h * l2)
        l4 = spectral.evaluate(u1, g + h * l3)
        g = g + (h / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4)
        frames.append(g.copy())
    g_arr = np.asarray(frames)
    times = h * np.arange(g_arr.shape[0])
    flow = FlowSeries(times=times, g=g_arr, gx=_flow_jacobian(g_arr))
    bad = np.nonzero(flow.min_gx() <= 0.0)[0]
    if bad.size:
        raise ValueError(
            f"flow stopped being a diffeomorphism at t = {times[bad[0]]:.6g} "
            f"(min g_x = {flow.min_gx()[bad[0]]:.3e})")
    return flow


def _time_derivative(f: np.ndarray, h: float) -> np.ndarray:
    # 4th-order finite differences along axis 0 (one-sided at the ends)
    if f.shape[0] < 5:
        return np.gradient(f, h, axis=0, edge_order=2 if f.shape[0] > 2 else 1)
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
    out[-1] = (25.0 * f[-1] - 48.0 * f[-2] + 36.0 * f[-3] - 16.0 * f[-4] + 3.0 * f[-5]) / (12.0 * h)
    out[-2] = (3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]) / (12.0 * h)
    return out


def flow_defect(flow: FlowSeries, u_at_flow_times: np.ndarray) -> np.ndarray:
    """Residual of the defining ODE, per flow time.

    Returns max_x |dg/dt - u(t) o g(t)| with dg/dt estimated by 4th-order
    time differences of the reconstructed positions.
    """
    u_at_flow_times = np.asarray(u_at_flow_times, dtype=float)
    if u_at_flow_times.shape != flow.g.shape:
        raise ValueError("need one u snapshot per flow time")
    h = float(flow.times[1] - flow.times[0])
    gdot = _time_derivative(flow.g, h)
    out = np.empty(flow.times.size)
    for j in range(flow.times.size):
        out[j] = np.max(np.abs(gdot[j] - spectral.evaluate(u_at_flow_times[j], flow.g[j])))
    return out
