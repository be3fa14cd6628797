"""CSV emission and parsing.

Files are RFC-4180 CSV with leading ``#`` comment lines carrying metadata
(``# key = value``) and the resolved configuration (``# config | <line>``).
Floats are written with 17 significant digits so a re-parse is bit-exact.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .functionals import FunctionalRecord
from .spectral import SpectralReport
from .stepper import TimeSeries

__all__ = [
    "TIMESERIES_HEADER",
    "emit_rows",
    "emit_spectrum",
    "emit_timeseries",
    "format_float",
    "read_csv",
    "read_timeseries",
]

TIMESERIES_HEADER = FunctionalRecord.FIELDS
CONFIG_PREFIX = "# config | "


def format_float(v: float) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.16e}"


def _format(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return "" if v is None else str(v)


def _header_lines(metadata: dict | None, config_text: str | None) -> list[str]:
    out = []
    for key, val in (metadata or {}).items():
        sval = format_float(val) if isinstance(val, float) else str(val)
        out.append(f"# {key} = {sval}")
    if config_text:
        out.extend(CONFIG_PREFIX + line for line in config_text.rstrip("\n").splitlines())
    return out


def emit_rows(
    path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence],
    metadata: dict | None = None,
    config_text: str | None = None,
) -> Path:
    path = Path(path)
    buf = io.StringIO()
    for line in _header_lines(metadata, config_text):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format(v) for v in row])
    path.write_text(buf.getvalue())
    return path


def emit_timeseries(series: TimeSeries, path: str | Path, config_text: str | None = None) -> Path:
    return emit_rows(
        path,
        TIMESERIES_HEADER,
        (r.as_tuple() for r in series.records),
        series.metadata,
        config_text,
    )


def emit_spectrum(report: SpectralReport, eig_path: str | Path, resolvent_path: str | Path | None = None,
                  metadata: dict | None = None, h_norms: dict[int, float] | None = None) -> list[Path]:
    meta = dict(metadata or {})
    meta.setdefault("max_real_part", report.max_real_part)
    meta.setdefault("deflation_residual", report.deflation_residual)
    meta.setdefault("metric", report.metric)
    written = [
        emit_rows(eig_path, ("re", "im"), ((lam.real, lam.imag) for lam in report.eigenvalues), meta)
    ]
    if resolvent_path is not None:
        h_norms = h_norms or {}
        rows = (
            (g, r, lb, h_norms.get(k, math.nan))
            for k, (g, r, lb) in enumerate(zip(report.gamma_grid, report.resolvent_norms, report.lower_bounds))
        )
        written.append(emit_rows(resolvent_path, ("gamma", "resolvent_norm", "lower_bound", "resolvent_norm_h"), rows, meta))
    return written


def read_csv(path: str | Path) -> tuple[dict[str, str], list[str], list[str], list[list[str]]]:
    """Return ``(metadata, config_lines, header, rows)``; cells stay strings."""
    meta: dict[str, str] = {}
    config_lines: list[str] = []
    body: list[str] = []
    for line in Path(path).read_text().splitlines():
        if line.startswith(CONFIG_PREFIX):
            config_lines.append(line[len(CONFIG_PREFIX):])
        elif line.startswith("#"):
            key, sep, val = line[1:].partition("=")
            if sep:
                meta[key.strip()] = val.strip()
        else:
            body.append(line)
    reader = csv.reader(body)
    header = next(reader)
    return meta, config_lines, header, [r for r in reader]


def read_timeseries(path: str | Path) -> tuple[dict[str, str], list[str], dict[str, np.ndarray]]:
    meta, config_lines, header, rows = read_csv(path)
    if tuple(header) != TIMESERIES_HEADER:
        raise ValueError(f"unexpected header {header}")
    data = np.array([[float(c) for c in r] for r in rows], dtype=float).reshape(len(rows), len(header))
    return meta, config_lines, {name: data[:, k] for k, name in enumerate(header)}
