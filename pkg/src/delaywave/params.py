"""Parameter set for the delayed-feedback wave problem.

The closed loop is admissible when ``0 < beta < alpha`` and
``tau*beta < xi < tau*(2*alpha - beta)``.  The coupling weight ``varpi`` of
the Lyapunov inner product must sit strictly below

    min{ 1/((a+b)(a+b-delta)),  delta/(2(a+b-delta)|Omega|),
         delta*xi/(2(a+b-delta)|Gamma_1|) }

with ``a+b = alpha+beta``.  On the interval ``(0, L)`` we have ``|Omega| = L``
and ``|Gamma_1| = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ParameterError",
    "SystemParams",
    "ValidationReport",
    "default_xi",
    "make_params",
    "select_weight",
    "validate",
    "varpi_bound",
]

DEFAULT_SAFETY = 0.9


class ParameterError(ValueError):
    """Raised when a parameter set cannot be built or violates a precondition."""


@dataclass(frozen=True)
class ValidationReport:
    accepted: bool
    violations: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.accepted

    def describe(self) -> str:
        if self.accepted:
            return "admissible"
        return "; ".join(self.violations)


@dataclass(frozen=True)
class SystemParams:
    """Physical gains, delay, Lyapunov weights and domain length.

    ``admissible`` records whether the set passed :func:`validate`; it is
    only ``False`` for sets built with ``unsafe=True``.
    """

    alpha: float
    beta: float
    tau: float
    xi: float
    varpi: float
    delta: float
    L: float = 1.0
    admissible: bool = True

    @property
    def gain_sum(self) -> float:
        return self.alpha + self.beta

    def dissipation_coefficients(self) -> tuple[float, float]:
        """Coefficients ``(c_z, c_u)`` of ``z(L)^2`` and ``u(1)^2`` in the dissipation bound."""
        r = self.xi / self.tau
        return 0.5 * (self.beta - 2.0 * self.alpha + r), 0.5 * (self.beta - r)

    def as_dict(self) -> dict[str, float]:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "tau": self.tau,
            "xi": self.xi,
            "varpi": self.varpi,
            "delta": self.delta,
            "L": self.L,
        }


def _finite(*vals: float) -> bool:
    return all(isinstance(v, (int, float)) and math.isfinite(v) for v in vals)


def validate(alpha: float, beta: float, tau: float, xi: float) -> ValidationReport:
    """Check the admissibility conditions, naming every violated one."""
    violations: list[str] = []
    for name, val in (("alpha", alpha), ("beta", beta), ("tau", tau), ("xi", xi)):
        if not _finite(val):
            violations.append(f"{name} must be finite (got {val!r})")
    if violations:
        return ValidationReport(False, tuple(violations))
    if alpha <= 0:
        violations.append(f"alpha must be positive (got {alpha})")
    if tau <= 0:
        violations.append(f"tau must be positive (got {tau})")
    if not beta > 0:
        violations.append(f"0 < beta violated (beta={beta})")
    if not beta < alpha:
        violations.append(f"beta < alpha violated (beta={beta}, alpha={alpha})")
    lo, hi = tau * beta, tau * (2.0 * alpha - beta)
    if not xi > lo:
        violations.append(f"xi > tau*beta violated (xi={xi}, tau*beta={lo})")
    if not xi < hi:
        violations.append(f"xi < tau*(2*alpha-beta) violated (xi={xi}, bound={hi})")
    return ValidationReport(not violations, tuple(violations))


def default_xi(alpha: float, beta: float, tau: float) -> float:
    """Midpoint of the admissible ``xi`` interval, which is ``alpha*tau``."""
    if not (_finite(alpha, beta, tau) and 0 < beta < alpha and tau > 0):
        raise ParameterError(
            f"default_xi needs 0 < beta < alpha and tau > 0 (alpha={alpha}, beta={beta}, tau={tau})"
        )
    return 0.5 * tau * (beta + (2.0 * alpha - beta))


def varpi_bound(alpha: float, beta: float, xi: float, L: float, delta: float) -> float:
    """Three-term minimum that ``varpi`` must stay strictly below."""
    s = alpha + beta
    gap = s - delta
    return min(
        1.0 / (s * gap),
        delta / (2.0 * gap * L),
        delta * xi / (2.0 * gap * 1.0),
    )


def select_weight(
    alpha: float, beta: float, xi: float, L: float, safety: float = DEFAULT_SAFETY
) -> tuple[float, float]:
    """Return ``(delta, varpi)`` with ``delta = (alpha+beta)/2``.

    ``varpi`` is ``safety`` times the bound, so it never attains it.
    """
    if not 0.0 < safety < 1.0:
        raise ParameterError(f"safety must lie in (0, 1), got {safety}")
    if not (_finite(L) and L > 0):
        raise ParameterError(f"L must be positive, got {L}")
    if not (0 < beta < alpha and xi > 0):
        raise ParameterError("select_weight needs 0 < beta < alpha and xi > 0")
    delta = 0.5 * (alpha + beta)
    return delta, safety * varpi_bound(alpha, beta, xi, L, delta)


def make_params(
    alpha: float,
    beta: float,
    tau: float,
    L: float = 1.0,
    xi: float | None = None,
    safety: float = DEFAULT_SAFETY,
    unsafe: bool = False,
) -> SystemParams:
    """Validate and complete a parameter set.

    With ``unsafe=True`` an inadmissible set is still returned (flagged
    ``admissible=False``) so that exploratory runs outside the proven regime
    remain possible.
    """
    if not (_finite(L) and L > 0):
        raise ParameterError(f"L must be positive, got {L}")
    if xi is None:
        if 0 < beta < alpha and tau > 0:
            xi = default_xi(alpha, beta, tau)
        elif unsafe and _finite(alpha, tau) and alpha > 0 and tau > 0:
            xi = alpha * tau
        else:
            placeholder = alpha * tau if _finite(alpha, tau) else float("nan")
            report = validate(alpha, beta, tau, placeholder)
            raise ParameterError("inadmissible parameters: " + report.describe())
    report = validate(alpha, beta, tau, xi)
    if not report.accepted and not unsafe:
        raise ParameterError("inadmissible parameters: " + report.describe())
    if not 0.0 < safety < 1.0:
        raise ParameterError(f"safety must lie in (0, 1), got {safety}")
    delta = 0.5 * (alpha + beta)
    gap = alpha + beta - delta
    if report.accepted:
        varpi = safety * varpi_bound(alpha, beta, xi, L, delta)
    elif gap > 0 and xi > 0:
        varpi = safety * varpi_bound(alpha, beta, xi, L, delta)
    else:
        varpi = 0.0
    return SystemParams(
        alpha=float(alpha),
        beta=float(beta),
        tau=float(tau),
        xi=float(xi),
        varpi=float(varpi),
        delta=float(delta),
        L=float(L),
        admissible=report.accepted,
    )
