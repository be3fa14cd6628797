"""Meshes on (0, L) and on the delay interval, the state triple, initial data.

Boundary integrals over the damped end reduce to evaluation at ``x = L``
(counting measure, ``|Gamma_0| = |Gamma_1| = 1``).  Domain integrals use the
composite trapezoid rule; the Dirichlet form uses edge differences, which is
the form the ghost-node Laplacian is self-adjoint against.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

__all__ = [
    "CompatibilityWarning",
    "Grid1D",
    "GridError",
    "State",
    "dirichlet_form",
    "init_state",
    "make_grid",
    "neumann_laplacian",
]

MIN_N = 8
MIN_M = 4

Profile = Callable[[np.ndarray], np.ndarray]


class GridError(ValueError):
    pass


class CompatibilityWarning(UserWarning):
    """History at s=0 disagrees with the initial velocity at x=L."""


@dataclass(frozen=True)
class Grid1D:
    L: float
    N: int
    M: int

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def drho(self) -> float:
        return 1.0 / self.M

    @cached_property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.N + 1)

    @cached_property
    def rho(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.M + 1)

    @cached_property
    def wx(self) -> np.ndarray:
        """Trapezoid weights on the spatial nodes."""
        w = np.full(self.N + 1, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        return w

    @cached_property
    def wrho(self) -> np.ndarray:
        """Trapezoid weights on the delay nodes."""
        w = np.full(self.M + 1, self.drho)
        w[0] = w[-1] = 0.5 * self.drho
        return w

    @property
    def measure_omega(self) -> float:
        return self.L

    @property
    def measure_gamma1(self) -> float:
        return 1.0

    def with_sizes(self, N: int, M: int) -> "Grid1D":
        return make_grid(self.L, N, M)


def make_grid(L: float, N: int, M: int) -> Grid1D:
    if not (math.isfinite(L) and L > 0):
        raise GridError(f"L must be positive and finite, got {L}")
    if int(N) != N or N < MIN_N:
        raise GridError(f"N must be an integer >= {MIN_N}, got {N}")
    if int(M) != M or M < MIN_M:
        raise GridError(f"M must be an integer >= {MIN_M}, got {M}")
    return Grid1D(float(L), int(N), int(M))


def dirichlet_form(a: np.ndarray, b: np.ndarray, dx: float) -> float:
    """Edge-difference approximation of the integral of ``a_x * b_x``."""
    return float(np.dot(np.diff(a), np.diff(b)) / dx)


def neumann_laplacian(y: np.ndarray, dx: float) -> np.ndarray:
    """Second difference with mirror ghosts at both ends (zero normal flux).

    Callers add ``-2*flux/dx`` at the last node to impose a nonzero outward
    derivative there.
    """
    lap = np.empty_like(y)
    lap[1:-1] = y[2:] - 2.0 * y[1:-1] + y[:-2]
    lap[0] = 2.0 * (y[1] - y[0])
    lap[-1] = 2.0 * (y[-2] - y[-1])
    lap /= dx * dx
    return lap


@dataclass
class State:
    """Displacement ``y``, velocity ``z`` (both on the x-nodes) and delay line ``u``.

    ``u[j]`` approximates the boundary velocity at time ``t - tau*rho_j``;
    ``u[0]`` coincides with ``z[-1]``.
    """

    y: np.ndarray
    z: np.ndarray
    u: np.ndarray
    t: float = 0.0
    step_index: int = field(default=0, compare=False)

    def copy(self) -> "State":
        return State(self.y.copy(), self.z.copy(), self.u.copy(), self.t, self.step_index)

    def scaled(self, s: float) -> "State":
        return State(s * self.y, s * self.z, s * self.u, self.t, self.step_index)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.y, self.z, self.u])

    @classmethod
    def from_vector(cls, vec: np.ndarray, grid: Grid1D, t: float = 0.0) -> "State":
        n = grid.N + 1
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (2 * n + grid.M + 1,):
            raise GridError(f"state vector has shape {vec.shape}, expected {(2 * n + grid.M + 1,)}")
        return cls(vec[:n].copy(), vec[n : 2 * n].copy(), vec[2 * n :].copy(), t)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.y).all() and np.isfinite(self.z).all() and np.isfinite(self.u).all())


def _sample(fn: Profile, pts: np.ndarray, name: str) -> np.ndarray:
    vals = np.asarray(fn(pts), dtype=float)
    if vals.ndim == 0:
        vals = np.full(pts.shape, float(vals))
    if vals.shape != pts.shape:
        raise GridError(f"{name} returned shape {vals.shape}, expected {pts.shape}")
    if not np.isfinite(vals).all():
        raise GridError(f"{name} produced non-finite samples")
    return vals


def init_state(
    grid: Grid1D,
    tau: float,
    y0: Profile,
    z0: Profile,
    f: Profile,
    tol: float = 1e-8,
) -> State:
    """Sample initial data.  ``f`` is the boundary velocity history on (-tau, 0).

    ``u[0]`` takes the value ``z0(L)``; ``u[j] = f(-tau*rho_j)`` for ``j >= 1``.
    A jump between ``f(0)`` and ``z0(L)`` larger than ``tol`` only warns.
    """
    y = _sample(y0, grid.x, "y0")
    z = _sample(z0, grid.x, "z0")
    s = -tau * grid.rho
    u = _sample(f, s, "f")
    if abs(u[0] - z[-1]) > tol:
        warnings.warn(
            f"history f(0)={u[0]:.6g} differs from z0(L)={z[-1]:.6g}; using z0(L) at the junction",
            CompatibilityWarning,
            stacklevel=2,
        )
    u[0] = z[-1]
    return State(y, z, u, 0.0)
