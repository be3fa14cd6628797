"""Scalar functionals of a state: Lyapunov norm, energies, the conserved
quantity and the equilibrium it predicts.

Two families are provided.  The collocated ones (``lyapunov_norm_sq``,
``basic_energy``, ``invariant_E``) act on a state at face value.  The
``scheme_*`` ones evaluate the same quantities on the half-step pair that
the leapfrog scheme actually conserves or dissipates; they are the ones
recorded along simulations because they are monotone to round-off.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import Grid1D, State, dirichlet_form
from .params import ParameterError, SystemParams
from .scheme import acceleration, time_step

__all__ = [
    "FunctionalRecord",
    "basic_energy",
    "dissipation_bound",
    "equilibrium_chi",
    "invariant_E",
    "lyapunov_norm_sq",
    "norm_equivalence_check",
    "record",
    "scheme_energies",
    "standard_norm_sq",
]


@dataclass(frozen=True)
class FunctionalRecord:
    t: float
    lyap_norm_sq: float
    basic_energy: float
    invariant_E: float
    boundary_velocity: float
    delayed_velocity: float

    FIELDS = (
        "t",
        "lyap_norm_sq",
        "basic_energy",
        "invariant_E",
        "boundary_velocity",
        "delayed_velocity",
    )

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, k) for k in self.FIELDS)


def _coupling(state: State, params: SystemParams, grid: Grid1D) -> float:
    return float(
        grid.wx @ state.z
        + params.gain_sum * state.y[-1]
        - params.beta * params.tau * (grid.wrho @ state.u)
    )


def invariant_E(state: State, params: SystemParams, grid: Grid1D) -> float:
    """``int z dx + (alpha+beta) y(L) - beta*tau*int u drho`` (trapezoid)."""
    return _coupling(state, params, grid)


def basic_energy(state: State, params: SystemParams, grid: Grid1D) -> float:
    return (
        dirichlet_form(state.y, state.y, grid.dx)
        + float(grid.wx @ state.z**2)
        + params.xi * float(grid.wrho @ state.u**2)
    )


def lyapunov_norm_sq(state: State, params: SystemParams, grid: Grid1D) -> float:
    """Squared norm of the weighted inner product, collocated quadrature."""
    e = _coupling(state, params, grid)
    return basic_energy(state, params, grid) + params.varpi * e * e


def standard_norm_sq(state: State, grid: Grid1D) -> float:
    """Plain ``H^1 x L^2 x L^2`` norm with the same quadratures."""
    return (
        float(grid.wx @ state.y**2)
        + dirichlet_form(state.y, state.y, grid.dx)
        + float(grid.wx @ state.z**2)
        + float(grid.wrho @ state.u**2)
    )


def scheme_energies(
    state: State, params: SystemParams, grid: Grid1D, boundary_data: float = 0.0
) -> tuple[float, float, float]:
    """``(lyap_norm_sq, basic_energy, invariant)`` on the upcoming half step.

    With ``v = z + dt/2 * a`` and ``y' = y + dt*v`` the quantities are

        basic = D(y', y) + |v|^2 + xi*drho*sum_{j<M} u_j^2
        inv   = int v + (alpha+beta)(y'(L)+y(L))/2 - beta*tau*drho*sum_{j<M} u_j

    ``basic`` drops by exactly ``2*dt`` times the boundary dissipation each
    step and ``inv`` is exactly conserved.
    """
    dt = time_step(params, grid)
    a = acceleration(state.y, state.z[-1], state.u[-1], params, grid, boundary_data)
    v = state.z + 0.5 * dt * a
    y1 = state.y + dt * v
    line = state.u[:-1]
    basic = (
        dirichlet_form(y1, state.y, grid.dx)
        + float(grid.wx @ v**2)
        + params.xi * grid.drho * float(line @ line)
    )
    inv = float(
        grid.wx @ v
        + params.gain_sum * 0.5 * (y1[-1] + state.y[-1])
        - params.beta * params.tau * grid.drho * line.sum()
    )
    return basic + params.varpi * inv * inv, basic, inv


def dissipation_bound(z_L: float, u_M: float, params: SystemParams) -> float:
    """Right side of the dissipativity inequality at boundary values ``z_L``, ``u_M``."""
    cz, cu = params.dissipation_coefficients()
    return cz * z_L * z_L + cu * u_M * u_M


def record(state: State, params: SystemParams, grid: Grid1D) -> FunctionalRecord:
    lyap, basic, _ = scheme_energies(state, params, grid)
    return FunctionalRecord(
        t=state.t,
        lyap_norm_sq=lyap,
        basic_energy=basic,
        invariant_E=invariant_E(state, params, grid),
        boundary_velocity=float(state.z[-1]),
        delayed_velocity=float(state.u[-1]),
    )


def equilibrium_chi(
    y0: Callable[[np.ndarray], np.ndarray],
    z0: Callable[[np.ndarray], np.ndarray],
    f: Callable[[np.ndarray], np.ndarray],
    params: SystemParams,
    grid: Grid1D,
) -> float:
    """Constant the solution settles to, from the initial data alone.

    ``chi = (int z0 + (alpha+beta) y0(L) - beta*tau*int_0^1 f(-tau*rho) drho) / (alpha+beta)``
    with ``|Gamma_1| = 1``.  The history is integrated from its own samples,
    so a jump between ``f(0)`` and ``z0(L)`` does not leak in.
    """
    if not params.admissible:
        raise ParameterError("equilibrium_chi needs admissible parameters")
    x = grid.x
    z_int = float(grid.wx @ np.broadcast_to(np.asarray(z0(x), float), x.shape))
    yL = float(np.broadcast_to(np.asarray(y0(x), float), x.shape)[-1])
    hist = np.broadcast_to(np.asarray(f(-params.tau * grid.rho), float), grid.rho.shape)
    f_int = float(grid.wrho @ hist)
    e0 = z_int + params.gain_sum * yL - params.beta * params.tau * f_int
    return e0 / (params.gain_sum * grid.measure_gamma1)


def norm_equivalence_check(
    params: SystemParams, grid: Grid1D, n_samples: int = 10_000, rng_seed: int = 0
) -> tuple[float, float]:
    """Extremal ratios of the Lyapunov norm to the standard norm over random states.

    Entries are i.i.d. uniform on [-1, 1]; an all-zero draw is resampled.
    """
    if n_samples < 100:
        raise ValueError("n_samples must be at least 100")
    rng = np.random.default_rng(rng_seed)
    n, m = grid.N + 1, grid.M + 1
    wx, wr, dx = grid.wx, grid.wrho, grid.dx
    lo, hi = np.inf, 0.0
    remaining = n_samples
    while remaining:
        batch = min(remaining, 2000)
        Y = rng.uniform(-1.0, 1.0, (batch, n))
        Z = rng.uniform(-1.0, 1.0, (batch, n))
        U = rng.uniform(-1.0, 1.0, (batch, m))
        dY = np.diff(Y, axis=1)
        grad = (dY * dY).sum(axis=1) / dx
        zz = (Z * Z) @ wx
        uu = (U * U) @ wr
        coup = Z @ wx + params.gain_sum * Y[:, -1] - params.beta * params.tau * (U @ wr)
        lyap = grad + zz + params.xi * uu + params.varpi * coup**2
        std = (Y * Y) @ wx + grad + zz + uu
        keep = std > 0
        ratios = lyap[keep] / std[keep]
        if ratios.size:
            lo = min(lo, float(ratios.min()))
            hi = max(hi, float(ratios.max()))
        remaining -= int(keep.sum())
    return lo, hi
