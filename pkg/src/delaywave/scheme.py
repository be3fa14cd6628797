"""Shared pieces of the explicit scheme: acceleration and time-step selection."""

from __future__ import annotations

import math

import numpy as np

from .grid import Grid1D, neumann_laplacian
from .params import SystemParams

__all__ = ["acceleration", "characteristic_M", "time_step"]


def acceleration(
    y: np.ndarray,
    zN: float,
    uM: float,
    params: SystemParams,
    grid: Grid1D,
    boundary_data: float = 0.0,
) -> np.ndarray:
    """Discrete ``y_xx`` with the feedback law folded into the ghost node at ``x = L``.

    The outward derivative at ``L`` is ``-alpha*zN - beta*uM + boundary_data``;
    ``boundary_data`` is nonzero only in verification runs.
    """
    a = neumann_laplacian(y, grid.dx)
    flux = -params.alpha * zN - params.beta * uM + boundary_data
    a[-1] += 2.0 * flux / grid.dx
    return a


def characteristic_M(tau: float, dx: float, cfl: float, M_min: int = 4) -> int:
    """Smallest ``M >= M_min`` with ``tau/M <= cfl*dx``."""
    if not 0.0 < cfl <= 1.0:
        raise ValueError(f"cfl must lie in (0, 1], got {cfl}")
    M = math.ceil(tau / (cfl * dx) * (1.0 - 1e-14))
    return max(int(M_min), M)


def time_step(params: SystemParams, grid: Grid1D) -> float:
    return params.tau / grid.M
