"""Command-line entry point.

Exit codes: 0 success, 1 invalid input (config or parameters), 2 runtime or
numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .analysis import SWEEP_HEADER, fit_decay, scenario_from_config, sweep
from .config import Config, ConfigError, load_config
from .delay_line import DelayLockError
from .functionals import equilibrium_chi, norm_equivalence_check
from .grid import GridError, make_grid
from .output import emit_rows, emit_spectrum, emit_timeseries, read_timeseries
from .params import ParameterError, validate
from .presets import PresetError
from .scheme import characteristic_M
from .spectral import assemble_generator, deflate, gram_matrix, resolvent_sweep, spectral_report
from .stepper import BlowUpError, CFLError, run

log = logging.getLogger("delaywave")

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


def _load(args) -> Config:
    if not args.config:
        raise ConfigError("--config is required for this command")
    cfg = load_config(args.config, unsafe=args.unsafe)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.workers is not None:
        cfg = replace(cfg, sweep=replace(cfg.sweep, workers=args.workers))
    return cfg


def _out(args, cfg: Config | None, default: str) -> Path:
    if args.out:
        return Path(args.out)
    if cfg is not None and cfg.output:
        return Path(cfg.output)
    return Path(default)


def cmd_check_params(args) -> int:
    cfg = _load(args)
    p = cfg.params()
    rep = validate(p.alpha, p.beta, p.tau, p.xi)
    grid = make_grid(cfg.L, cfg.N, characteristic_M(p.tau, cfg.L / cfg.N, cfg.cfl, cfg.M_min))
    lo, hi = norm_equivalence_check(p, grid, rng_seed=cfg.seed)
    y0, z0, f = cfg.profiles()
    print(rep.describe())
    for key, val in p.as_dict().items():
        print(f"{key} = {val!r}")
    print(f"N = {grid.N}, M = {grid.M}, dt = {p.tau / grid.M!r}")
    if p.admissible:
        print(f"chi = {equilibrium_chi(y0, z0, f, p, grid)!r}")
    print(f"norm ratio bounds (seed {cfg.seed}) = [{lo!r}, {hi!r}]")
    return EXIT_OK if rep.accepted else EXIT_INVALID


def cmd_simulate(args) -> int:
    cfg = _load(args)
    series = run(scenario_from_config(cfg))
    path = emit_timeseries(series, _out(args, cfg, "timeseries.csv"), cfg.to_ini())
    log.info("wrote %d rows to %s", len(series), path)
    return EXIT_OK


def _spectral_grid(cfg: Config):
    p = cfg.params()
    M = cfg.spectral_M or characteristic_M(p.tau, cfg.L / cfg.N, cfg.cfl, cfg.M_min)
    return p, make_grid(cfg.L, cfg.N, M)


def cmd_spectrum(args) -> int:
    cfg = _load(args)
    p, grid = _spectral_grid(cfg)
    rep = spectral_report(p, grid)
    path = _out(args, cfg, "spectrum.csv")
    emit_spectrum(rep, path, metadata={"N": grid.N, "M": grid.M, "seed": cfg.seed})
    print(f"max Re = {rep.max_real_part!r}")
    return EXIT_OK


def cmd_resolvent_sweep(args) -> int:
    cfg = _load(args)
    p, grid = _spectral_grid(cfg)
    gammas = np.linspace(cfg.gamma_min, cfg.gamma_max, cfg.n_gamma)
    rep = spectral_report(p, grid, gammas)
    h_norms: dict[int, float] = {}
    if cfg.h_metric_every > 0:
        gen = assemble_generator(p, grid)
        defl = deflate(gen)
        G = defl.basis.T @ gram_matrix(p, grid) @ defl.basis
        idx = list(range(0, len(gammas), cfg.h_metric_every))
        norms, _ = resolvent_sweep(defl.matrix, gammas[idx], rep.eigenvalues, gram=G)
        h_norms = dict(zip(idx, norms))
    path = _out(args, cfg, "resolvent.csv")
    eig_path = path.with_name(path.stem + "_eigenvalues" + path.suffix)
    emit_spectrum(rep, eig_path, path, {"N": grid.N, "M": grid.M, "seed": cfg.seed}, h_norms)
    print(f"max resolvent norm = {float(rep.resolvent_norms.max())!r}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    if not cfg.sweep.triples():
        raise ConfigError("[sweep] needs non-empty alpha, beta and tau lists")
    rows = sweep(cfg)
    path = emit_rows(_out(args, cfg, "sweep.csv"), SWEEP_HEADER, rows, {"seed": cfg.seed}, cfg.to_ini())
    failed = sum(r[SWEEP_HEADER.index("status")] == "failed" for r in rows)
    log.info("wrote %d rows to %s (%d failed)", len(rows), path, failed)
    return EXIT_OK


def cmd_fit_decay(args) -> int:
    if not args.series:
        raise ConfigError("fit-decay needs a time-series CSV")
    try:
        _, _, cols = read_timeseries(args.series)
    except (OSError, ValueError, StopIteration) as exc:
        raise ConfigError(f"cannot read time series: {exc}", None, args.series) from None
    fit = fit_decay(cols["t"], cols["basic_energy"])
    header = ("family", "model", "amplitude", "omega", "rms_log_residual", "n_points")
    if args.out:
        emit_rows(args.out, header, fit.rows(), {"status": fit.status})
    print(f"status = {fit.status}")
    if fit.status == "fitted":
        print(f"exponential: omega = {fit.exp_omega!r}, A = {fit.exp_amplitude!r}, residual = {fit.exp_residual!r}")
        print(f"logarithmic: C = {fit.log_C!r}, residual = {fit.log_residual!r}")
    return EXIT_OK


COMMANDS = {
    "check-params": cmd_check_params,
    "simulate": cmd_simulate,
    "spectrum": cmd_spectrum,
    "resolvent-sweep": cmd_resolvent_sweep,
    "sweep": cmd_sweep,
    "fit-decay": cmd_fit_decay,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="delaywave", description="Damped wave equation with boundary delay.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config")
        sp.add_argument("--out")
        sp.add_argument("--unsafe", action="store_true", help="allow parameters outside the admissible region")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--workers", type=int)
        if name == "fit-decay":
            sp.add_argument("series", nargs="?", help="time-series CSV written by simulate")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ParameterError, PresetError, GridError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BlowUpError as exc:
        print(f"blow-up at step {exc.step_index} (t = {exc.t:.6g}): {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ArithmeticError, np.linalg.LinAlgError, CFLError, DelayLockError, OSError, ValueError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
