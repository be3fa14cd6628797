"""Explicit time stepping of the wave equation with delayed boundary damping.

The scheme is leapfrog in the interior with mirror ghosts at ``x = 0`` and a
ghost at ``x = L`` eliminated through

    (y_{N+1} - y_{N-1}) / (2 dx) = -alpha * z_N - beta * u_M,
    z_N = (y_N^{n+1} - y_N^{n-1}) / (2 dt),

which leaves one scalar linear equation at the last node.  It is advanced
here in the equivalent kick-drift-kick form

    v      = z^n + dt/2 * a(y^n, z^n)
    y^{n+1} = y^n + dt * v
    z^{n+1} = v + dt/2 * a(y^{n+1}, z^{n+1})      (implicit only at x = L)

so that ``z^n`` equals the centred difference ``(y^{n+1}-y^{n-1})/(2dt)``
and the first step is the Taylor start ``y^1 = y^0 + dt z^0 + dt^2/2 a^0``.
The step is locked to ``dt = tau/M`` so the delay line is an exact shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .delay_line import HistoryBuffer, advance_delay, check_lock, oracle_lookup
from .functionals import FunctionalRecord, record
from .grid import Grid1D, State, init_state, make_grid, neumann_laplacian
from .params import SystemParams
from .scheme import acceleration, characteristic_M

__all__ = [
    "BlowUpError",
    "CFLError",
    "Forcing",
    "Scenario",
    "TimeSeries",
    "run",
    "run_oracle",
    "step",
]

BLOWUP_THRESHOLD = 1e12

Profile = Callable[[np.ndarray], np.ndarray]


class CFLError(ValueError):
    pass


class BlowUpError(ArithmeticError):
    def __init__(self, message: str, step_index: int, t: float):
        super().__init__(message)
        self.step_index = step_index
        self.t = t


@dataclass(frozen=True)
class Forcing:
    """Verification-only source terms.

    ``interior(x, t)`` is added to ``y_tt - y_xx`` and ``boundary(t)`` to the
    outward derivative at ``x = L``.  Physics runs never carry one.
    """

    interior: Callable[[np.ndarray, float], np.ndarray] | None = None
    boundary: Callable[[float], float] | None = None

    def source(self, x: np.ndarray, t: float) -> np.ndarray | float:
        return 0.0 if self.interior is None else self.interior(x, t)

    def flux(self, t: float) -> float:
        return 0.0 if self.boundary is None else float(self.boundary(t))


@dataclass(frozen=True)
class Scenario:
    params: SystemParams
    grid: Grid1D
    y0: Profile
    z0: Profile
    f: Profile
    T_final: float
    record_every: int = 1
    cfl: float = 0.9
    metadata: dict = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        params: SystemParams,
        N: int,
        y0: Profile,
        z0: Profile,
        f: Profile,
        T_final: float,
        record_every: int = 1,
        cfl: float = 0.9,
        M_min: int = 4,
        metadata: dict | None = None,
    ) -> "Scenario":
        """Pick ``M`` from the characteristic lock and CFL, then build the grid."""
        dx = params.L / N
        M = characteristic_M(params.tau, dx, cfl, M_min)
        grid = make_grid(params.L, N, M)
        return cls(params, grid, y0, z0, f, T_final, record_every, cfl, dict(metadata or {}))

    @property
    def dt(self) -> float:
        return self.params.tau / self.grid.M

    @property
    def n_steps(self) -> int:
        return int(round(self.T_final / self.dt))

    def initial_state(self) -> State:
        return init_state(self.grid, self.params.tau, self.y0, self.z0, self.f)


@dataclass
class TimeSeries:
    records: list[FunctionalRecord]
    metadata: dict
    final_state: State | None = None

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    def __len__(self) -> int:
        return len(self.records)


def _check_cfl(dt: float, grid: Grid1D, cfl: float) -> None:
    if dt > cfl * grid.dx * (1.0 + 1e-12):
        raise CFLError(f"dt={dt:.6g} exceeds cfl*dx={cfl * grid.dx:.6g} (cfl={cfl})")


def _kick_drift_kick(
    state: State,
    params: SystemParams,
    grid: Grid1D,
    dt: float,
    delayed_next: float,
    forcing: Forcing | None,
) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(y^{n+1}, z^{n+1})``; ``delayed_next`` is ``u_M`` at level ``n+1``."""
    dx = grid.dx
    t0, t1 = state.t, state.t + dt
    if forcing is None:
        a = acceleration(state.y, state.z[-1], state.u[-1], params, grid)
    else:
        a = acceleration(state.y, state.z[-1], state.u[-1], params, grid, forcing.flux(t0))
        a += forcing.source(grid.x, t0)
    v = state.z + 0.5 * dt * a
    y1 = state.y + dt * v
    lap = neumann_laplacian(y1, dx)
    g1 = 0.0
    if forcing is not None:
        lap += forcing.source(grid.x, t1)
        g1 = forcing.flux(t1)
    z1 = v + 0.5 * dt * lap
    # last node: z = v + dt/2*(lap - 2(alpha z + beta u_M - g)/dx), solved for z
    r = dt / dx
    z1[-1] = (z1[-1] - r * (params.beta * delayed_next - g1)) / (1.0 + params.alpha * r)
    return y1, z1


def _guard(y: np.ndarray, z: np.ndarray, index: int, t: float) -> None:
    peak = max(float(np.abs(y).max()), float(np.abs(z).max()))
    if not math.isfinite(peak) or peak > BLOWUP_THRESHOLD:
        raise BlowUpError(f"blow-up detected at step {index} (t={t:.6g}, max|value|={peak:.3g})", index, t)


def step(
    state: State,
    params: SystemParams,
    grid: Grid1D,
    cfl: float = 1.0,
    forcing: Forcing | None = None,
) -> State:
    """Advance one step of length ``tau/M``; returns a new state."""
    dt = params.tau / grid.M
    _check_cfl(dt, grid, cfl)
    check_lock(dt, params.tau, grid.M)
    y1, z1 = _kick_drift_kick(state, params, grid, dt, float(state.u[-2]), forcing)
    index = state.step_index + 1
    _guard(y1, z1, index, state.t + dt)
    u1 = advance_delay(state.u, float(z1[-1]))
    return State(y1, z1, u1, state.t + dt, index)


def _metadata(scenario: Scenario, dt: float) -> dict:
    p = scenario.params
    meta = {
        "dt": dt,
        "M": scenario.grid.M,
        "N": scenario.grid.N,
        "varpi": p.varpi,
        "delta": p.delta,
        "xi": p.xi,
        "cfl": scenario.cfl,
        "T_final": scenario.T_final,
        "record_every": scenario.record_every,
    }
    meta.update(scenario.metadata)
    return meta


def run(scenario: Scenario, forcing: Forcing | None = None, state: State | None = None) -> TimeSeries:
    """Step from ``t = 0`` to ``T_final`` recording functionals every ``record_every`` steps."""
    p, g = scenario.params, scenario.grid
    if scenario.record_every < 1:
        raise ValueError("record_every must be >= 1")
    dt = scenario.dt
    _check_cfl(dt, g, scenario.cfl)
    check_lock(dt, p.tau, g.M)
    if state is None:
        state = scenario.initial_state()
    records = [record(state, p, g)]
    n_steps = scenario.n_steps
    y, z, u = state.y.copy(), state.z.copy(), state.u.copy()
    current = State(y, z, u, state.t, state.step_index)
    for n in range(1, n_steps + 1):
        y1, z1 = _kick_drift_kick(current, p, g, dt, float(current.u[-2]), forcing)
        t1 = n * dt
        _guard(y1, z1, n, t1)
        advance_delay(current.u, float(z1[-1]), out=current.u)
        current.y, current.z, current.t, current.step_index = y1, z1, t1, n
        if n % scenario.record_every == 0:
            records.append(record(current, p, g))
    return TimeSeries(records, _metadata(scenario, dt), current)


def run_oracle(scenario: Scenario, offset: float = 0.5, forcing: Forcing | None = None) -> TimeSeries:
    """Same scheme, but the delayed velocity is read from an interpolated history.

    The step is ``tau/(M + offset)`` so that lookups at ``t - tau`` fall
    between recorded samples.  Rows are recorded every step; the
    ``delayed_velocity`` column holds the interpolated values and
    ``lyap_norm_sq``/``basic_energy`` are not meaningful here (set to NaN).
    """
    p, g = scenario.params, scenario.grid
    dt = p.tau / (g.M + offset)
    _check_cfl(dt, g, scenario.cfl)
    state = scenario.initial_state()
    hist = HistoryBuffer(p.tau + 2.0 * dt)
    # seed with history samples on the oracle's own time grid
    k_back = math.ceil(p.tau / dt) + 1
    s = -dt * np.arange(k_back, 0, -1)
    hist_vals = np.broadcast_to(np.asarray(scenario.f(s), float), s.shape)
    for tk, vk in zip(s, hist_vals):
        hist.append(float(tk), float(vk))
    hist.append(0.0, float(state.z[-1]))

    def row(st: State, delayed: float) -> FunctionalRecord:
        return FunctionalRecord(st.t, math.nan, math.nan, math.nan, float(st.z[-1]), delayed)

    current = state
    delayed = oracle_lookup(hist, -p.tau)
    current.u[-1] = delayed
    rows = [row(current, delayed)]
    for n in range(1, int(round(scenario.T_final / dt)) + 1):
        t1 = n * dt
        delayed_next = oracle_lookup(hist, t1 - p.tau)
        y1, z1 = _kick_drift_kick(current, p, g, dt, delayed_next, forcing)
        _guard(y1, z1, n, t1)
        hist.append(t1, float(z1[-1]))
        current = State(y1, z1, current.u, t1, n)
        current.u[-1] = delayed_next
        rows.append(row(current, delayed_next))
    meta = _metadata(scenario, dt)
    meta["delay_mode"] = "oracle"
    return TimeSeries(rows, meta, current)
