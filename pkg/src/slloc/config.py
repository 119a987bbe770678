"""YAML problem files.

Schema (unknown keys are rejected at every level)::

    label: my-problem          # optional
    L: 1.0
    audit_points: 2048         # optional, >= 1024
    p: tanh-fig1               # named coefficient, see COEFFICIENT_PRESETS
    q: {family: sine, base: 2.0, amplitude: 1.0, frequency: 1.0}
    w: {samples: [[0.0, 1.0], [0.5, 1.2], [1.0, 1.0]]}

A coefficient is a number (constant), a named coefficient, a closed-form
family mapping (``constant``: value; ``tanh``: scale, shift, offset, length;
``sine``: base, amplitude, frequency) or a table of ``[x, value]`` samples.
"""

from __future__ import annotations

import yaml

from .errors import ConfigError
from .problem import (
    DEFAULT_AUDIT_POINTS,
    Problem,
    coefficient_from_dict,
    constant,
    make_problem,
    sine_profile,
    tanh_profile,
)

COEFFICIENT_PRESETS = {
    "zero": lambda L: constant(0.0),
    "one": lambda L: constant(1.0),
    "tanh-fig1": lambda L: tanh_profile(40, 10, 1.1, length=L),
    "tanh-setup2": lambda L: tanh_profile(40, 20, 1.1, length=L),
    "sine-2": lambda L: sine_profile(2.0),
}

_TOP_KEYS = {"label", "L", "audit_points", "p", "q", "w"}


def _coefficient(spec, L):
    if isinstance(spec, str):
        try:
            return COEFFICIENT_PRESETS[spec](L)
        except KeyError:
            raise ConfigError(
                f"unknown coefficient preset {spec!r}; expected one of {sorted(COEFFICIENT_PRESETS)}"
            ) from None
    return coefficient_from_dict(spec)


def problem_from_config(data) -> Problem:
    if not isinstance(data, dict):
        raise ConfigError("problem config must be a mapping")
    extra = set(data) - _TOP_KEYS
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    for key in ("L", "p", "q", "w"):
        if key not in data:
            raise ConfigError(f"config is missing required key {key!r}")
    try:
        L = float(data["L"])
    except (TypeError, ValueError):
        raise ConfigError(f"L must be a number, got {data['L']!r}") from None
    return make_problem(
        L,
        _coefficient(data["p"], L),
        _coefficient(data["q"], L),
        _coefficient(data["w"], L),
        label=str(data.get("label", "custom")),
        audit_points=int(data.get("audit_points", DEFAULT_AUDIT_POINTS)),
    )


def load_problem(path) -> Problem:
    with open(path, encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: not valid YAML ({exc})") from None
    return problem_from_config(data)


def dump_problem(problem: Problem, path) -> None:
    data = problem.to_dict()
    data["audit_points"] = problem.audit_points
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(data, fh, sort_keys=False)
