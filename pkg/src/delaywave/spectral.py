"""Discrete generator, its deflation to the zero-invariant subspace, spectra
and resolvent norms along the imaginary axis.

State vectors are ordered ``(y_0..y_N, z_0..z_N, u_0..u_M)``.  The rows are

* ``y' = z``
* ``z' = Laplacian(y)`` with mirror ghost at ``x = 0`` and the feedback
  ghost at ``x = L``
* ``u_j' = -(u_j - u_{j-1}) / (tau*drho)`` for ``j >= 1`` (upwind), where the
  inflow ``u_0`` is replaced by ``z_N``
* ``u_0' = z_N' - kappa*(u_0 - z_N)``: the junction value follows the boundary
  velocity and any mismatch relaxes at rate ``kappa = 1/(tau*drho)``.

With these rows the functional

    l(Phi) = sum_i wx_i z_i + (alpha+beta) y_N - beta*tau*drho*sum_{j>=1} u_j

satisfies ``l(A Phi) = 0`` identically, so ``ker l`` is invariant and the
compression onto it is an exact restriction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .grid import Grid1D, State
from .params import ParameterError, SystemParams

__all__ = [
    "BVPResult",
    "DeflatedGenerator",
    "GeneratorMatrix",
    "SingularShiftError",
    "SpectralReport",
    "assemble_generator",
    "conserved_functional",
    "deflate",
    "eigenvalues",
    "gram_matrix",
    "h_inner",
    "resolvent_bvp_check",
    "resolvent_norm",
    "resolvent_sweep",
    "spectral_report",
]

MAX_DENSE_DIM = 2000


class SingularShiftError(np.linalg.LinAlgError):
    def __init__(self, message: str, nearest: complex | None = None):
        super().__init__(message)
        self.nearest = nearest


@dataclass(frozen=True)
class GeneratorMatrix:
    matrix: np.ndarray
    params: SystemParams
    grid: Grid1D
    kappa: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def iy(self) -> slice:
        return slice(0, self.grid.N + 1)

    @property
    def iz(self) -> slice:
        n = self.grid.N + 1
        return slice(n, 2 * n)

    @property
    def iu(self) -> slice:
        n = self.grid.N + 1
        return slice(2 * n, 2 * n + self.grid.M + 1)

    @property
    def row_neumann(self) -> int:
        """z-row of the node at x = 0."""
        return self.grid.N + 1

    @property
    def row_feedback(self) -> int:
        """z-row of the node at x = L."""
        return 2 * (self.grid.N + 1) - 1

    @property
    def row_inflow(self) -> int:
        return 2 * (self.grid.N + 1)

    def apply(self, state: State) -> np.ndarray:
        return self.matrix @ state.as_vector()


@dataclass(frozen=True)
class DeflatedGenerator:
    matrix: np.ndarray
    basis: np.ndarray
    functional: np.ndarray
    residual: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray
    max_real_part: float
    gamma_grid: np.ndarray = field(default_factory=lambda: np.empty(0))
    resolvent_norms: np.ndarray = field(default_factory=lambda: np.empty(0))
    lower_bounds: np.ndarray = field(default_factory=lambda: np.empty(0))
    deflation_residual: float = 0.0
    metric: str = "euclidean"


def assemble_generator(params: SystemParams, grid: Grid1D, kappa: float | None = None) -> GeneratorMatrix:
    if not params.admissible:
        raise ParameterError("assemble_generator needs admissible parameters")
    N, M = grid.N, grid.M
    n = N + 1
    d = 2 * n + M + 1
    if kappa is None:
        kappa = 1.0 / (params.tau * grid.drho)
    A = np.zeros((d, d))
    iy, iz, iu = 0, n, 2 * n
    A[np.arange(n), iz + np.arange(n)] = 1.0
    h2 = 1.0 / grid.dx**2
    for i in range(1, N):
        A[iz + i, iy + i - 1] = h2
        A[iz + i, iy + i] = -2.0 * h2
        A[iz + i, iy + i + 1] = h2
    A[iz, iy] = -2.0 * h2
    A[iz, iy + 1] = 2.0 * h2
    A[iz + N, iy + N - 1] = 2.0 * h2
    A[iz + N, iy + N] = -2.0 * h2
    A[iz + N, iz + N] = -2.0 * params.alpha / grid.dx
    A[iz + N, iu + M] = -2.0 * params.beta / grid.dx
    c = 1.0 / (params.tau * grid.drho)
    for j in range(1, M + 1):
        A[iu + j, iu + j] = -c
        A[iu + j, (iz + N) if j == 1 else (iu + j - 1)] = c
    A[iu] = A[iz + N]
    A[iu, iu] -= kappa
    A[iu, iz + N] += kappa
    return GeneratorMatrix(A, params, grid, float(kappa))


def conserved_functional(params: SystemParams, grid: Grid1D) -> np.ndarray:
    n = grid.N + 1
    ell = np.zeros(2 * n + grid.M + 1)
    ell[n : 2 * n] = grid.wx
    ell[n - 1] = params.gain_sum
    ell[2 * n + 1 :] = -params.beta * params.tau * grid.drho
    return ell


def gram_matrix(params: SystemParams, grid: Grid1D) -> np.ndarray:
    """Gram matrix of the weighted inner product on the discrete state space.

    The delay part uses the upwind cell weights on ``u_1..u_M`` plus a
    penalty ``xi*drho*(u_0 - z_N)^2`` on the junction mismatch, which makes
    the matrix positive definite and coincides with the plain weighting on
    states with ``u_0 = z_N``.
    """
    N, M = grid.N, grid.M
    n = N + 1
    d = 2 * n + M + 1
    G = np.zeros((d, d))
    D = np.zeros((n, n))
    main = np.full(n, 2.0)
    main[0] = main[-1] = 1.0
    D[np.arange(n), np.arange(n)] = main / grid.dx
    D[np.arange(n - 1), np.arange(1, n)] = -1.0 / grid.dx
    D[np.arange(1, n), np.arange(n - 1)] = -1.0 / grid.dx
    G[:n, :n] = D
    G[n : 2 * n, n : 2 * n] = np.diag(grid.wx)
    w = params.xi * grid.drho
    iu = 2 * n
    G[iu + 1 :, iu + 1 :] = w * np.eye(M)
    zN = 2 * n - 1
    G[iu, iu] += w
    G[zN, zN] += w
    G[iu, zN] -= w
    G[zN, iu] -= w
    ell = conserved_functional(params, grid)
    G += params.varpi * np.outer(ell, ell)
    return G


def h_inner(G: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return float(a @ G @ b)


def deflate(gen: GeneratorMatrix) -> DeflatedGenerator:
    """Compress the generator onto an orthonormal basis of ``ker l``."""
    ell = conserved_functional(gen.params, gen.grid)
    norm = np.linalg.norm(ell)
    if norm < 1e-14:
        raise ParameterError("conserved functional is numerically zero")
    basis = sla.null_space(ell[None, :] / norm)
    Ad = basis.T @ gen.matrix @ basis
    residual = float(np.abs(ell @ gen.matrix @ basis).max() / norm)
    return DeflatedGenerator(Ad, basis, ell, residual)


def eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Full spectrum sorted by real part (descending imaginary part on ties)."""
    if matrix.shape[0] > MAX_DENSE_DIM:
        raise ValueError(f"dimension {matrix.shape[0]} exceeds the dense budget {MAX_DENSE_DIM}")
    try:
        lam = sla.eigvals(matrix)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise np.linalg.LinAlgError(f"eigensolver failed: {exc}") from exc
    order = np.lexsort((-lam.imag, lam.real))
    return lam[order]


def resolvent_norm(matrix: np.ndarray, gamma: float, eigs: np.ndarray | None = None) -> float:
    """Spectral norm of ``(i*gamma - A)^{-1}``, i.e. ``1/sigma_min(i*gamma - A)``."""
    shifted = 1j * gamma * np.eye(matrix.shape[0]) - matrix
    s = sla.svdvals(shifted)
    smin = s[-1]
    if smin <= np.finfo(float).eps * s[0]:
        if eigs is None:
            eigs = eigenvalues(matrix)
        nearest = complex(eigs[np.argmin(np.abs(eigs - 1j * gamma))])
        raise SingularShiftError(f"i*{gamma} is (numerically) an eigenvalue; nearest eigenvalue {nearest}", nearest)
    return float(1.0 / smin)


def _h_factor(G: np.ndarray) -> np.ndarray:
    return np.linalg.cholesky(G).T


def resolvent_sweep(
    matrix: np.ndarray,
    gammas: np.ndarray,
    eigs: np.ndarray | None = None,
    gram: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Resolvent norms and the lower bounds ``1/dist(i*gamma, spectrum)``.

    With ``gram`` the norm is measured in that metric: ``|R|_G = |C R C^{-1}|_2``
    where ``G = C^T C``.
    """
    if eigs is None:
        eigs = eigenvalues(matrix)
    gammas = np.asarray(gammas, dtype=float)
    A = matrix
    if gram is not None:
        C = _h_factor(gram)
        A = C @ matrix @ np.linalg.inv(C)
    norms = np.array([resolvent_norm(A, g, eigs) for g in gammas])
    lower = np.array([1.0 / np.abs(eigs - 1j * g).min() for g in gammas])
    return norms, lower


def spectral_report(
    params: SystemParams,
    grid: Grid1D,
    gammas: np.ndarray | None = None,
) -> SpectralReport:
    gen = assemble_generator(params, grid)
    defl = deflate(gen)
    lam = eigenvalues(defl.matrix)
    rep = SpectralReport(lam, float(lam.real.max()), deflation_residual=defl.residual)
    if gammas is not None:
        norms, lower = resolvent_sweep(defl.matrix, gammas, lam)
        rep.gamma_grid = np.asarray(gammas, float)
        rep.resolvent_norms = norms
        rep.lower_bounds = lower
    return rep


@dataclass(frozen=True)
class BVPResult:
    solution: np.ndarray
    residual: float
    y: np.ndarray
    z: np.ndarray
    u: np.ndarray


def _delay_kernel(
    lam: complex, params: SystemParams, grid: Grid1D, V: np.ndarray, kernel: str
) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(k, w)`` with ``u_j = k_j * z_N + w_j`` for ``j = 1..M``."""
    M = grid.M
    if kernel == "discrete":
        c = 1.0 / (params.tau * grid.drho)
        q = c / (lam + c)
        k = q ** np.arange(1, M + 1)
        w = np.empty(M, dtype=complex)
        acc = 0.0
        for j in range(M):
            acc = q * acc + V[j + 1] / (lam + c)
            w[j] = acc
        return k, w
    if kernel == "exact":
        rho = grid.rho
        tau = params.tau
        k = np.exp(-lam * tau * rho[1:])
        w = np.empty(M, dtype=complex)
        for j in range(1, M + 1):
            eta = rho[: j + 1]
            integrand = np.exp(lam * tau * (eta - rho[j])) * V[: j + 1]
            w[j - 1] = tau * np.trapezoid(integrand, eta)
        return k, w
    raise ValueError(f"unknown kernel {kernel!r}")


def resolvent_bvp_check(
    params: SystemParams,
    grid: Grid1D,
    lam: complex,
    rhs: np.ndarray,
    kernel: str = "discrete",
    gen: GeneratorMatrix | None = None,
) -> BVPResult:
    """Solve ``(lam - A) Phi = rhs`` by reducing to a two-point problem in ``y``.

    ``z = lam*y - F``; the delay line is solved in closed form from the inflow
    ``z_N`` (``kernel="discrete"`` uses the upwind recursion and matches the
    generator exactly, ``"exact"`` the continuous exponential kernel); what
    remains is ``lam^2 y - y_xx = G + lam F`` with a Robin condition at
    ``x = L``, solved as a tridiagonal system.
    """
    if np.real(lam) <= 0:
        raise ValueError("resolvent_bvp_check needs Re(lam) > 0")
    N, M = grid.N, grid.M
    n = N + 1
    rhs = np.asarray(rhs)
    F, Gs, V = rhs[:n], rhs[n : 2 * n], rhs[2 * n :]
    k, w = _delay_kernel(lam, params, grid, V, kernel)
    kM, wM = k[-1], w[-1]
    h2 = 1.0 / grid.dx**2
    two_dx = 2.0 / grid.dx
    a, b = params.alpha, params.beta
    # banded rows: lam^2 y_i - (Laplacian y)_i = Gs_i + lam F_i
    diag = np.full(n, lam * lam + 2.0 * h2, dtype=complex)
    upper = np.full(n - 1, -h2, dtype=complex)
    lower = np.full(n - 1, -h2, dtype=complex)
    upper[0] = -2.0 * h2
    lower[-1] = -2.0 * h2
    b_vec = (Gs + lam * F).astype(complex)
    # feedback flux at x = L: a*zN + b*uM with zN = lam*yN - F_N, uM = kM*zN + wM
    diag[-1] += two_dx * (a + b * kM) * lam
    b_vec[-1] += two_dx * ((a + b * kM) * F[-1] - b * wM)
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = upper
    ab[1] = diag
    ab[2, :-1] = lower
    try:
        y = sla.solve_banded((1, 1), ab, b_vec, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise SingularShiftError(f"reduced boundary-value problem is singular at lam={lam}") from exc
    z = lam * y - F
    zN = z[-1]
    u = np.empty(M + 1, dtype=complex)
    u[1:] = k * zN + w
    if gen is None:
        gen = assemble_generator(params, grid)
    # junction row: (lam + kappa) u_0 = V_0 + (lam z_N - G_N) + kappa z_N
    u[0] = (V[0] + lam * zN - Gs[-1] + gen.kappa * zN) / (lam + gen.kappa)
    sol = np.concatenate([y, z, u])
    if np.isrealobj(rhs) and np.isreal(lam):
        sol = sol.real
    residual = float(np.abs((lam * np.eye(gen.dim) - gen.matrix) @ sol - rhs).max())
    return BVPResult(sol, residual, sol[:n], sol[n : 2 * n], sol[2 * n :])
