"""Delay line for the boundary velocity.

With the time step locked to ``tau/M`` the transport ``tau*u_t + u_rho = 0``
is solved exactly by an index shift.  :class:`HistoryBuffer` is an
independent route (linear interpolation of recorded samples) used only to
cross-check the shift register.
"""

from __future__ import annotations

import bisect
from collections import deque

import numpy as np

__all__ = [
    "DelayLockError",
    "HistoryBuffer",
    "HistoryRangeError",
    "advance_delay",
    "delayed_value",
    "oracle_lookup",
]

LOCK_RTOL = 1e-12


class DelayLockError(ValueError):
    """The time step is not the characteristic step ``tau/M``."""


class HistoryRangeError(LookupError):
    pass


def check_lock(dt: float, tau: float, M: int) -> None:
    char = tau / M
    if abs(dt - char) > LOCK_RTOL * char:
        raise DelayLockError(f"dt={dt!r} is not the characteristic step tau/M={char!r}")


def advance_delay(
    u: np.ndarray,
    inflow: float,
    dt: float | None = None,
    tau: float | None = None,
    out: np.ndarray | None = None,
) -> np.ndarray:
    """Shift the line by one cell and feed ``inflow`` in at ``rho = 0``.

    When ``dt`` and ``tau`` are given the characteristic lock is checked.
    ``out`` may alias ``u`` for an in-place update.
    """
    if dt is not None or tau is not None:
        if dt is None or tau is None:
            raise DelayLockError("both dt and tau are needed to check the lock")
        check_lock(dt, tau, len(u) - 1)
    if out is None:
        out = np.empty_like(u)
    out[1:] = u[:-1]
    out[0] = inflow
    return out


def delayed_value(u: np.ndarray) -> float:
    """Velocity at ``x = L`` one full delay ago."""
    return float(u[-1])


class HistoryBuffer:
    """Time-stamped boundary-velocity samples, pruned to a fixed lookback span."""

    def __init__(self, span: float):
        if span <= 0:
            raise ValueError("span must be positive")
        self.span = float(span)
        self._t: deque[float] = deque()
        self._v: deque[float] = deque()

    def __len__(self) -> int:
        return len(self._t)

    @property
    def times(self) -> np.ndarray:
        return np.fromiter(self._t, float, len(self._t))

    @property
    def values(self) -> np.ndarray:
        return np.fromiter(self._v, float, len(self._v))

    def append(self, t: float, v: float) -> None:
        if self._t and not t > self._t[-1]:
            raise ValueError(f"timestamps must increase (last {self._t[-1]}, got {t})")
        self._t.append(float(t))
        self._v.append(float(v))
        # keep one sample older than t - span so the lookback stays bracketed
        while len(self._t) > 2 and self._t[1] <= t - self.span:
            self._t.popleft()
            self._v.popleft()

    def extent(self) -> tuple[float, float]:
        if not self._t:
            raise HistoryRangeError("empty history buffer")
        return self._t[0], self._t[-1]


def oracle_lookup(buffer: HistoryBuffer, t_query: float) -> float:
    """Linear interpolation of the buffered samples at ``t_query``."""
    t0, t1 = buffer.extent()
    span_tol = 1e-12 * max(1.0, abs(t0), abs(t1))
    if t_query < t0 - span_tol or t_query > t1 + span_tol:
        raise HistoryRangeError(f"t={t_query} outside buffered span [{t0}, {t1}]")
    ts = buffer._t
    vs = buffer._v
    k = bisect.bisect_right(ts, t_query)
    if k == 0:
        return vs[0]
    if k >= len(ts):
        return vs[-1]
    ta, tb = ts[k - 1], ts[k]
    if t_query == ta:
        return vs[k - 1]
    w = (t_query - ta) / (tb - ta)
    return (1.0 - w) * vs[k - 1] + w * vs[k]
