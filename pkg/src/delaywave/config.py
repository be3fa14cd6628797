"""INI-style run configuration.

Grammar: ``[section]`` headers followed by ``key = value`` lines; ``#`` and
``;`` start comments (also inline after whitespace).  Keys are case
sensitive.  Recognised sections and keys, with defaults:

    [params]    alpha, beta, tau (required); xi (midpoint); safety = 0.9
    [grid]      L = 1.0; N = 100; M_min = 4; cfl = 0.9
    [initial]   y0 = zero; z0 = zero; f = zero      (preset syntax, see presets)
    [run]       mode = simulate; T_final = 10.0; record_every = 1;
                output = (none); seed = 0
    [spectral]  M = (from the time-step lock); gamma_min = -50; gamma_max = 50;
                n_gamma = 101; h_metric_every = 0
    [sweep]     alpha, beta, tau = comma-separated lists; tolerance = 1e-3;
                spectral = false; workers = 1

Unknown sections or keys, duplicate keys and unparsable values are errors
that cite the offending line.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .params import ParameterError, SystemParams, make_params
from .presets import PresetError, PresetSpec, parse_preset, profile_from_spec

__all__ = ["Config", "ConfigError", "MODES", "load_config", "parse_config"]

MODES = ("simulate", "spectrum", "resolvent-sweep", "sweep", "check-params")

_SCHEMA: dict[str, dict[str, type]] = {
    "params": {"alpha": float, "beta": float, "tau": float, "xi": float, "safety": float},
    "grid": {"L": float, "N": int, "M_min": int, "cfl": float},
    "initial": {"y0": str, "z0": str, "f": str},
    "run": {"mode": str, "T_final": float, "record_every": int, "output": str, "seed": int},
    "spectral": {"M": int, "gamma_min": float, "gamma_max": float, "n_gamma": int, "h_metric_every": int},
    "sweep": {"alpha": list, "beta": list, "tau": list, "tolerance": float, "spectral": bool, "workers": int},
}


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = ""
        if path:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line


@dataclass(frozen=True)
class SweepSettings:
    alpha: tuple[float, ...] = ()
    beta: tuple[float, ...] = ()
    tau: tuple[float, ...] = ()
    tolerance: float = 1e-3
    spectral: bool = False
    workers: int = 1

    def triples(self) -> list[tuple[float, float, float]]:
        return [(a, b, t) for a in self.alpha for b in self.beta for t in self.tau]


@dataclass(frozen=True)
class Config:
    alpha: float
    beta: float
    tau: float
    xi: float | None = None
    safety: float = 0.9
    L: float = 1.0
    N: int = 100
    M_min: int = 4
    cfl: float = 0.9
    y0: PresetSpec = PresetSpec("zero")
    z0: PresetSpec = PresetSpec("zero")
    f: PresetSpec = PresetSpec("zero")
    mode: str = "simulate"
    T_final: float = 10.0
    record_every: int = 1
    output: str | None = None
    seed: int = 0
    spectral_M: int | None = None
    gamma_min: float = -50.0
    gamma_max: float = 50.0
    n_gamma: int = 101
    h_metric_every: int = 0
    sweep: SweepSettings = field(default_factory=SweepSettings)
    unsafe: bool = False

    def params(self) -> SystemParams:
        return make_params(self.alpha, self.beta, self.tau, L=self.L, xi=self.xi, safety=self.safety, unsafe=self.unsafe)

    def profiles(self):
        return (
            profile_from_spec(self.y0, self.L),
            profile_from_spec(self.z0, self.L),
            profile_from_spec(self.f, self.L),
        )

    def with_gains(self, alpha: float, beta: float, tau: float) -> "Config":
        return replace(self, alpha=alpha, beta=beta, tau=tau, xi=None)

    def to_ini(self) -> str:
        """Resolved configuration in the same grammar (round-trips through ``parse_config``)."""
        lines = ["[params]", f"alpha = {self.alpha!r}", f"beta = {self.beta!r}", f"tau = {self.tau!r}"]
        if self.xi is not None:
            lines.append(f"xi = {self.xi!r}")
        lines += [f"safety = {self.safety!r}", "", "[grid]"]
        lines += [f"L = {self.L!r}", f"N = {self.N}", f"M_min = {self.M_min}", f"cfl = {self.cfl!r}", ""]
        lines += ["[initial]", f"y0 = {self.y0}", f"z0 = {self.z0}", f"f = {self.f}", ""]
        lines += ["[run]", f"mode = {self.mode}", f"T_final = {self.T_final!r}", f"record_every = {self.record_every}"]
        if self.output is not None:
            lines.append(f"output = {self.output}")
        lines += [f"seed = {self.seed}", "", "[spectral]"]
        if self.spectral_M is not None:
            lines.append(f"M = {self.spectral_M}")
        lines += [
            f"gamma_min = {self.gamma_min!r}",
            f"gamma_max = {self.gamma_max!r}",
            f"n_gamma = {self.n_gamma}",
            f"h_metric_every = {self.h_metric_every}",
        ]
        sw = self.sweep
        if sw.alpha or sw.beta or sw.tau:
            lines += ["", "[sweep]"]
            lines += [f"{k} = " + ", ".join(repr(v) for v in getattr(sw, k)) for k in ("alpha", "beta", "tau")]
            lines += [f"tolerance = {sw.tolerance!r}", f"spectral = {str(sw.spectral).lower()}", f"workers = {sw.workers}"]
        return "\n".join(lines) + "\n"


_KEY_LINE = re.compile(r"^\s*([^=:#;\s][^=:]*?)\s*[=:]")
_SECTION_LINE = re.compile(r"^\s*\[([^\]]+)\]")


def _line_index(text: str) -> dict[tuple[str, str], int]:
    where: dict[tuple[str, str], int] = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        m = _SECTION_LINE.match(line)
        if m:
            section = m.group(1).strip()
            continue
        m = _KEY_LINE.match(line)
        if m and section is not None and not line.lstrip().startswith(("#", ";")):
            where.setdefault((section, m.group(1).strip()), lineno)
    return where


def _convert(raw: str, kind: type, key: str, line: int | None, path: str | None):
    try:
        if kind is float:
            return float(raw)
        if kind is int:
            val = float(raw)
            if val != int(val):
                raise ValueError
            return int(val)
        if kind is bool:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError
        if kind is list:
            return tuple(float(v) for v in raw.split(",") if v.strip())
        return raw.strip()
    except ValueError:
        raise ConfigError(f"cannot parse {key} = {raw!r} as {kind.__name__}", line, path) from None


def parse_config(text: str, path: str | None = None, unsafe: bool = False) -> Config:
    cp = configparser.ConfigParser(
        strict=True,
        interpolation=None,
        inline_comment_prefixes=("#", ";"),
        comment_prefixes=("#", ";"),
        default_section="\x00defaults",
    )
    cp.optionxform = str  # keep key case
    try:
        cp.read_string(text, source=path or "<config>")
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r} in [{exc.section}]", exc.lineno, path) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}]", exc.lineno, path) from None
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("key outside any [section]", exc.lineno, path) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError("malformed line", lineno, path) from None
    lines = _line_index(text)
    values: dict[tuple[str, str], object] = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]", _find_section(text, section), path)
        for key, raw in cp.items(section):
            line = lines.get((section, key))
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]", line, path)
            values[(section, key)] = _convert(raw, _SCHEMA[section][key], key, line, path)

    def get(section: str, key: str, default=None):
        return values.get((section, key), default)

    for req in ("alpha", "beta", "tau"):
        if ("params", req) not in values:
            raise ConfigError(f"missing required key {req!r} in [params]", None, path)

    def preset(key: str, kind: str) -> PresetSpec:
        raw = get("initial", key, "zero")
        try:
            return parse_preset(raw, kind)
        except PresetError as exc:
            raise ConfigError(str(exc), lines.get(("initial", key)), path) from None

    mode = get("run", "mode", "simulate")
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}", lines.get(("run", "mode")), path)

    sweep = SweepSettings(
        alpha=get("sweep", "alpha", ()),
        beta=get("sweep", "beta", ()),
        tau=get("sweep", "tau", ()),
        tolerance=get("sweep", "tolerance", 1e-3),
        spectral=get("sweep", "spectral", False),
        workers=get("sweep", "workers", 1),
    )
    cfg = Config(
        alpha=get("params", "alpha"),
        beta=get("params", "beta"),
        tau=get("params", "tau"),
        xi=get("params", "xi"),
        safety=get("params", "safety", 0.9),
        L=get("grid", "L", 1.0),
        N=get("grid", "N", 100),
        M_min=get("grid", "M_min", 4),
        cfl=get("grid", "cfl", 0.9),
        y0=preset("y0", "spatial"),
        z0=preset("z0", "spatial"),
        f=preset("f", "history"),
        mode=mode,
        T_final=get("run", "T_final", 10.0),
        record_every=get("run", "record_every", 1),
        output=get("run", "output"),
        seed=get("run", "seed", 0),
        spectral_M=get("spectral", "M"),
        gamma_min=get("spectral", "gamma_min", -50.0),
        gamma_max=get("spectral", "gamma_max", 50.0),
        n_gamma=get("spectral", "n_gamma", 101),
        h_metric_every=get("spectral", "h_metric_every", 0),
        sweep=sweep,
        unsafe=unsafe,
    )
    _check_ranges(cfg, lines, path)
    try:
        cfg.params()
    except ParameterError as exc:
        raise ConfigError(f"{exc} (admissibility: 0 < beta < alpha, tau*beta < xi < tau*(2*alpha - beta))", lines.get(("params", "xi"), lines.get(("params", "alpha"))), path) from None
    return cfg


def _find_section(text: str, name: str) -> int | None:
    for lineno, line in enumerate(text.splitlines(), start=1):
        m = _SECTION_LINE.match(line)
        if m and m.group(1).strip() == name:
            return lineno
    return None


def _check_ranges(cfg: Config, lines: dict, path: str | None) -> None:
    def bad(section: str, key: str, msg: str):
        raise ConfigError(f"{key}: {msg}", lines.get((section, key)), path)

    if not cfg.L > 0:
        bad("grid", "L", "must be positive")
    if cfg.N < 8:
        bad("grid", "N", "must be >= 8")
    if cfg.M_min < 4:
        bad("grid", "M_min", "must be >= 4")
    if not 0 < cfg.cfl <= 1:
        bad("grid", "cfl", "must lie in (0, 1]")
    if not 0 < cfg.safety < 1:
        bad("params", "safety", "must lie in (0, 1)")
    if cfg.T_final < 0:
        bad("run", "T_final", "must be >= 0")
    if cfg.record_every < 1:
        bad("run", "record_every", "must be >= 1")
    if cfg.spectral_M is not None and cfg.spectral_M < 4:
        bad("spectral", "M", "must be >= 4")
    if cfg.n_gamma < 1:
        bad("spectral", "n_gamma", "must be >= 1")
    if cfg.sweep.workers < 1:
        bad("sweep", "workers", "must be >= 1")


def load_config(path: str | Path, unsafe: bool = False) -> Config:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", None, str(p)) from None
    return parse_config(text, str(p), unsafe)


def config_from_lines(lines: list[str], unsafe: bool = False) -> Config:
    return parse_config("\n".join(lines), None, unsafe)
