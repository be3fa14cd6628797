"""Finite-difference and spectral toolkit for a 1D wave equation with boundary delay feedback."""

from .config import Config, ConfigError, load_config, parse_config
from .delay_line import HistoryBuffer, advance_delay, check_lock, oracle_lookup
from .functionals import (
    FunctionalRecord,
    basic_energy,
    equilibrium_chi,
    invariant_E,
    lyapunov_norm_sq,
    norm_equivalence_check,
)
from .grid import Grid1D, State, init_state, make_grid
from .params import ParameterError, SystemParams, make_params, select_weight, validate
from .spectral import assemble_generator, deflate, eigenvalues, resolvent_bvp_check, spectral_report
from .stepper import BlowUpError, Scenario, TimeSeries, run, run_oracle, step

__version__ = "0.1.0"
