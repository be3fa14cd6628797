"""Named initial-data profiles used by the config loader.

A preset is written ``name`` or ``name(arg, key=value, ...)``, e.g.
``gaussian(center=0.5, width=0.1, amplitude=1)`` or ``constant(3)``.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["PresetError", "PresetSpec", "parse_preset", "profile_from_spec"]


class PresetError(ValueError):
    pass


@dataclass(frozen=True)
class PresetSpec:
    name: str
    args: tuple[tuple[str, float], ...] = ()

    def kwargs(self) -> dict[str, float]:
        return dict(self.args)

    def __str__(self) -> str:
        if not self.args:
            return self.name
        inner = ", ".join(f"{k}={v!r}" for k, v in self.args)
        return f"{self.name}({inner})"


# parameter names in positional order, with defaults
_SPATIAL: dict[str, tuple[tuple[str, float | None], ...]] = {
    "zero": (),
    "constant": (("c", None),),
    "gaussian": (("center", 0.5), ("width", 0.1), ("amplitude", 1.0)),
    "sine": (("k", 1.0), ("amplitude", 1.0)),
    "cosine": (("k", 1.0), ("amplitude", 1.0)),
}
_HISTORY: dict[str, tuple[tuple[str, float | None], ...]] = {
    "zero": (),
    "constant": (("c", None),),
    "ramp": (("slope", 1.0), ("intercept", 0.0)),
}

_CALL = re.compile(r"^\s*([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*$", re.S)


def parse_preset(text: str, kind: str = "spatial") -> PresetSpec:
    table = _SPATIAL if kind == "spatial" else _HISTORY
    m = _CALL.match(text)
    if not m:
        raise PresetError(f"cannot parse preset {text!r}")
    name, inner = m.group(1).lower(), m.group(2)
    if name not in table:
        raise PresetError(f"unknown {kind} preset {name!r}; known: {', '.join(sorted(table))}")
    signature = table[name]
    given: dict[str, float] = {}
    if inner and inner.strip():
        try:
            call = ast.parse(f"f({inner})", mode="eval").body
        except SyntaxError as exc:
            raise PresetError(f"bad arguments in preset {text!r}") from exc
        assert isinstance(call, ast.Call)
        names = [k for k, _ in signature]
        if len(call.args) > len(names):
            raise PresetError(f"too many arguments for preset {name!r}")
        for pos, node in enumerate(call.args):
            given[names[pos]] = _number(node, text)
        for kw in call.keywords:
            if kw.arg not in names:
                raise PresetError(f"preset {name!r} has no parameter {kw.arg!r}")
            if kw.arg in given:
                raise PresetError(f"parameter {kw.arg!r} given twice in {text!r}")
            given[kw.arg] = _number(kw.value, text)
    args = []
    for key, default in signature:
        if key in given:
            args.append((key, given[key]))
        elif default is None:
            raise PresetError(f"preset {name!r} needs parameter {key!r}")
        else:
            args.append((key, float(default)))
    return PresetSpec(name, tuple(args))


def _number(node: ast.AST, text: str) -> float:
    try:
        val = ast.literal_eval(node)
    except ValueError as exc:
        raise PresetError(f"non-numeric argument in preset {text!r}") from exc
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        raise PresetError(f"non-numeric argument in preset {text!r}")
    return float(val)


def profile_from_spec(spec: PresetSpec, L: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised callable for a preset.

    Spatial ``sine``/``cosine`` use ``k*pi*x/L`` so that ``cosine(k)`` with
    integer ``k`` satisfies both Neumann conditions.  History presets take
    ``s`` in ``(-tau, 0)``.
    """
    kw = spec.kwargs()
    name = spec.name
    if name == "zero":
        return lambda x: np.zeros_like(np.asarray(x, float))
    if name == "constant":
        c = kw["c"]
        return lambda x: np.full_like(np.asarray(x, float), c)
    if name == "gaussian":
        x0, w, amp = kw["center"], kw["width"], kw["amplitude"]
        if w <= 0:
            raise PresetError("gaussian width must be positive")
        return lambda x: amp * np.exp(-(((np.asarray(x, float) - x0) / w) ** 2))
    if name == "sine":
        k, amp = kw["k"], kw["amplitude"]
        return lambda x: amp * np.sin(k * np.pi * np.asarray(x, float) / L)
    if name == "cosine":
        k, amp = kw["k"], kw["amplitude"]
        return lambda x: amp * np.cos(k * np.pi * np.asarray(x, float) / L)
    if name == "ramp":
        slope, b = kw["slope"], kw["intercept"]
        return lambda s: b + slope * np.asarray(s, float)
    raise PresetError(f"unknown preset {name!r}")
