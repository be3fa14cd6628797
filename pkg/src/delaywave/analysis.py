"""Parameter sweeps and descriptive decay fits."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import Config
from .functionals import equilibrium_chi
from .params import ParameterError, default_xi, validate
from .spectral import assemble_generator, deflate, eigenvalues
from .stepper import Scenario, TimeSeries, run

__all__ = [
    "DecayFit",
    "SWEEP_HEADER",
    "fit_decay",
    "scenario_from_config",
    "sweep",
]

SWEEP_HEADER = (
    "alpha",
    "beta",
    "tau",
    "admissible",
    "chi",
    "final_err",
    "final_basic_energy",
    "invariant_drift",
    "converged",
    "max_re_eig",
    "status",
    "message",
)


def scenario_from_config(cfg: Config) -> Scenario:
    params = cfg.params()
    y0, z0, f = cfg.profiles()
    return Scenario.build(
        params,
        cfg.N,
        y0,
        z0,
        f,
        cfg.T_final,
        record_every=cfg.record_every,
        cfl=cfg.cfl,
        M_min=cfg.M_min,
        metadata={"seed": cfg.seed},
    )


def _sweep_row(args: tuple[Config, float, float, float]) -> tuple:
    cfg, a, b, t = args
    xi = default_xi(a, b, t) if 0 < b < a and t > 0 else a * t
    report = validate(a, b, t, xi)
    row = {"alpha": a, "beta": b, "tau": t, "admissible": report.accepted}
    nan = math.nan
    if not report.accepted and not cfg.unsafe:
        return _pack(row, nan, nan, nan, nan, False, nan, "skipped", report.describe())
    try:
        sub = cfg.with_gains(a, b, t)
        scen = scenario_from_config(sub)
        params = scen.params
        y0, z0, f = sub.profiles()
        chi = equilibrium_chi(y0, z0, f, params, scen.grid) if params.admissible else nan
        ts = run(scen)
        final = ts.final_state
        err = float(np.abs(final.y - chi).max()) if params.admissible else nan
        E = ts.column("invariant_E")
        drift = float(np.abs(E - E[0]).max())
        max_re = nan
        if cfg.sweep.spectral and params.admissible:
            gen = assemble_generator(params, scen.grid)
            max_re = float(eigenvalues(deflate(gen).matrix).real.max())
        ok = bool(err <= cfg.sweep.tolerance) if params.admissible else False
        return _pack(row, chi, err, ts.records[-1].basic_energy, drift, ok, max_re, "ok", "")
    except (ArithmeticError, ValueError, ParameterError, np.linalg.LinAlgError) as exc:
        return _pack(row, nan, nan, nan, nan, False, nan, "failed", str(exc))


def _pack(row, chi, err, energy, drift, ok, max_re, status, message):
    return (
        row["alpha"],
        row["beta"],
        row["tau"],
        row["admissible"],
        chi,
        err,
        energy,
        drift,
        ok,
        max_re,
        status,
        message,
    )


def sweep(
    cfg: Config,
    triples: list[tuple[float, float, float]] | None = None,
    workers: int | None = None,
) -> list[tuple]:
    """One summary row per ``(alpha, beta, tau)``; failures are recorded, not raised.

    Each triple uses the midpoint ``xi``.  Rows come back in input order and
    duplicates are kept.
    """
    if triples is None:
        triples = cfg.sweep.triples()
    workers = workers or cfg.sweep.workers
    jobs = [(cfg, float(a), float(b), float(t)) for a, b, t in triples]
    if workers <= 1 or len(jobs) <= 1:
        return [_sweep_row(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_row, jobs))


@dataclass(frozen=True)
class DecayFit:
    status: str
    exp_omega: float = math.nan
    exp_amplitude: float = math.nan
    exp_residual: float = math.nan
    log_C: float = math.nan
    log_residual: float = math.nan
    n_points: int = 0

    def rows(self) -> list[tuple]:
        return [
            ("exponential", "A*exp(-2*omega*t)", self.exp_amplitude, self.exp_omega, self.exp_residual, self.n_points),
            ("logarithmic", "(C/log(2+t))^2", self.log_C, math.nan, self.log_residual, self.n_points),
        ]


def fit_decay(t: np.ndarray, energy: np.ndarray, min_rows: int = 20) -> DecayFit:
    """Least-squares fits of an energy trace against two model families.

    Both fits are done on ``log(energy)``; residuals are RMS of the log
    misfit.  The exponential family is ``A*exp(-2*omega*t)`` (so ``omega``
    is the amplitude rate) and the logarithmic one ``(C/log(2+t))^2``.
    Nothing is claimed about which family the underlying system obeys.
    """
    t = np.asarray(t, float)
    e = np.asarray(energy, float)
    if e.size and np.all(e == 0):
        return DecayFit("already at equilibrium", n_points=int(e.size))
    keep = e > 0
    t, e = t[keep], e[keep]
    if t.size < min_rows:
        raise ValueError(f"fit_decay needs at least {min_rows} rows with positive energy, got {t.size}")
    le = np.log(e)
    slope, intercept = np.polyfit(t, le, 1)
    exp_res = float(np.sqrt(np.mean((le - (intercept + slope * t)) ** 2)))
    g = -2.0 * np.log(np.log(2.0 + t))
    two_logC = float(np.mean(le - g))
    log_res = float(np.sqrt(np.mean((le - (two_logC + g)) ** 2)))
    return DecayFit(
        "fitted",
        exp_omega=float(-slope / 2.0),
        exp_amplitude=float(math.exp(intercept)),
        exp_residual=exp_res,
        log_C=float(math.exp(two_logC / 2.0)),
        log_residual=log_res,
        n_points=int(t.size),
    )


def fit_series(series: TimeSeries) -> DecayFit:
    return fit_decay(series.t, series.column("basic_energy"))

