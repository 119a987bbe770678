"""Sturm-Liouville problems ``-(p u')' + q u = lambda w u`` on ``[0, L]``, u(0) = u(L) = 0.

Coefficients are :class:`CoefficientFn` objects: either closed-form families
with analytic first and second derivatives, or tabulated samples interpolated
with a monotone-safe cubic (PCHIP).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (
    BadInterval,
    ConfigError,
    NegativePotential,
    NonFiniteCoefficient,
    NonPositiveCoefficient,
    UnknownPreset,
)

DEFAULT_AUDIT_POINTS = 1024

Fn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class CoefficientFn:
    """A scalar coefficient on ``[0, L]``.

    ``source`` is the serializable description used to rebuild it; see
    :func:`coefficient_from_dict`.
    """

    kind: str
    values: Fn
    first_derivative: Fn | None
    second_derivative: Fn | None
    source: dict = field(default_factory=dict)

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.broadcast_to(np.asarray(self.values(x), dtype=np.float64), x.shape).copy()

    def d1(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.broadcast_to(np.asarray(self.first_derivative(x), dtype=np.float64), x.shape).copy()

    def d2(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.broadcast_to(np.asarray(self.second_derivative(x), dtype=np.float64), x.shape).copy()

    @property
    def is_analytic(self) -> bool:
        return self.kind == "preset"

    def to_dict(self) -> dict:
        return dict(self.source)


def constant(value: float) -> CoefficientFn:
    c = float(value)
    zero = lambda x: np.zeros_like(x)
    return CoefficientFn(
        "preset",
        lambda x: np.full_like(x, c),
        zero,
        zero,
        {"family": "constant", "value": c},
    )


def tanh_profile(scale: float, shift: float, offset: float, length: float = 1.0) -> CoefficientFn:
    """``tanh(scale * x / length - shift) + offset``."""
    k = float(scale) / float(length)

    def val(x):
        return np.tanh(k * x - shift) + offset

    def d1(x):
        return k / np.cosh(k * x - shift) ** 2

    def d2(x):
        s = k * x - shift
        return -2.0 * k * k * np.tanh(s) / np.cosh(s) ** 2

    src = {
        "family": "tanh",
        "scale": float(scale),
        "shift": float(shift),
        "offset": float(offset),
        "length": float(length),
    }
    return CoefficientFn("preset", val, d1, d2, src)


def sine_profile(base: float, amplitude: float = 1.0, frequency: float = 1.0) -> CoefficientFn:
    """``base + amplitude * sin(2 pi frequency x)``."""
    w = 2.0 * np.pi * float(frequency)
    src = {
        "family": "sine",
        "base": float(base),
        "amplitude": float(amplitude),
        "frequency": float(frequency),
    }
    return CoefficientFn(
        "preset",
        lambda x: base + amplitude * np.sin(w * x),
        lambda x: amplitude * w * np.cos(w * x),
        lambda x: -amplitude * w * w * np.sin(w * x),
        src,
    )


def tabulated(x, values) -> CoefficientFn:
    """Coefficient from samples; derivatives by centered differences of the interpolant."""
    x = np.asarray(x, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    if x.ndim != 1 or x.shape != v.shape or x.size < 2:
        raise ConfigError("tabulated coefficient needs matching 1-D x and value arrays (>= 2 points)")
    if np.any(np.diff(x) <= 0):
        raise ConfigError("tabulated x values must be strictly increasing")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
        raise NonFiniteCoefficient("tabulated coefficient contains non-finite samples")
    interp = PchipInterpolator(x, v, extrapolate=True)
    span = x[-1] - x[0]
    # centered-difference step; clipped to the table so both stencils stay inside
    step = 1e-4 * span

    def _clip(t):
        return np.clip(t, x[0] + step, x[-1] - step)

    def d1(t):
        c = _clip(np.asarray(t, dtype=np.float64))
        return (interp(c + step) - interp(c - step)) / (2.0 * step)

    def d2(t):
        c = _clip(np.asarray(t, dtype=np.float64))
        return (interp(c + step) - 2.0 * interp(c) + interp(c - step)) / step**2

    src = {"samples": np.column_stack([x, v]).tolist()}
    return CoefficientFn("tabulated", lambda t: interp(t), d1, d2, src)


_FAMILIES = {
    "constant": (constant, {"value"}),
    "tanh": (tanh_profile, {"scale", "shift", "offset", "length"}),
    "sine": (sine_profile, {"base", "amplitude", "frequency"}),
}


def coefficient_from_dict(d) -> CoefficientFn:
    """Rebuild a coefficient from its ``to_dict()`` form.

    Accepted shapes: a bare number (constant), ``{"family": name, **params}``
    or ``{"samples": [[x, value], ...]}``.
    """
    if isinstance(d, (int, float)) and not isinstance(d, bool):
        return constant(d)
    if not isinstance(d, dict):
        raise ConfigError(f"coefficient must be a number or a mapping, got {type(d).__name__}")
    if "samples" in d:
        extra = set(d) - {"samples"}
        if extra:
            raise ConfigError(f"unknown keys for tabulated coefficient: {sorted(extra)}")
        arr = np.asarray(d["samples"], dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ConfigError("samples must be a list of [x, value] pairs")
        return tabulated(arr[:, 0], arr[:, 1])
    family = d.get("family")
    if family not in _FAMILIES:
        raise ConfigError(f"unknown coefficient family {family!r}; expected one of {sorted(_FAMILIES)}")
    factory, allowed = _FAMILIES[family]
    params = {k: v for k, v in d.items() if k != "family"}
    extra = set(params) - allowed
    if extra:
        raise ConfigError(f"unknown keys for {family} coefficient: {sorted(extra)}")
    try:
        return factory(**{k: float(v) for k, v in params.items()})
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {family} coefficient: {exc}") from None


@dataclass(frozen=True, eq=False)
class Problem:
    L: float
    p: CoefficientFn
    q: CoefficientFn
    w: CoefficientFn
    label: str = "custom"
    audit_points: int = DEFAULT_AUDIT_POINTS

    def audit_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.audit_points)

    @property
    def is_analytic(self) -> bool:
        return self.p.is_analytic and self.q.is_analytic and self.w.is_analytic

    @property
    def unit_weight(self) -> bool:
        w = self.w.source
        return w.get("family") == "constant" and w.get("value") == 1.0

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "L": float(self.L),
            "p": self.p.to_dict(),
            "q": self.q.to_dict(),
            "w": self.w.to_dict(),
        }


def make_problem(L, p, q, w, label="custom", audit_points=DEFAULT_AUDIT_POINTS) -> Problem:
    """Validate coefficients on a uniform audit grid and build a :class:`Problem`."""
    L = float(L)
    if not np.isfinite(L) or L <= 0:
        raise BadInterval(f"interval length must be positive, got {L}")
    if audit_points < DEFAULT_AUDIT_POINTS:
        raise ValueError(f"audit grid needs at least {DEFAULT_AUDIT_POINTS} points")
    x = np.linspace(0.0, L, audit_points)
    for name, coeff in (("p", p), ("q", q), ("w", w)):
        v = coeff(x)
        if not np.all(np.isfinite(v)):
            raise NonFiniteCoefficient(f"{name} is not finite on [0, {L}]")
        if name in ("p", "w") and np.min(v) <= 0:
            i = int(np.argmin(v))
            raise NonPositiveCoefficient(f"{name}({x[i]:.6g}) = {v[i]:.6g} is not positive")
        if name == "q" and np.min(v) < 0:
            i = int(np.argmin(v))
            raise NegativePotential(f"q({x[i]:.6g}) = {v[i]:.6g} is negative")
    return Problem(L, p, q, w, label, audit_points)


def problem_from_dict(d: dict, audit_points=DEFAULT_AUDIT_POINTS) -> Problem:
    allowed = {"label", "L", "p", "q", "w"}
    extra = set(d) - allowed
    if extra:
        raise ConfigError(f"unknown problem keys: {sorted(extra)}")
    missing = {"L", "p", "q", "w"} - set(d)
    if missing:
        raise ConfigError(f"missing problem keys: {sorted(missing)}")
    return make_problem(
        d["L"],
        coefficient_from_dict(d["p"]),
        coefficient_from_dict(d["q"]),
        coefficient_from_dict(d["w"]),
        label=str(d.get("label", "custom")),
        audit_points=audit_points,
    )


PRESETS = ("laplacian-B", "fig1-tanh-metric", "setup2", "setup3")


def preset(name: str, length: float | None = None) -> Problem:
    """The configurations used in the figures.

    ``length`` applies to ``laplacian-B`` only (default 1).
    """
    if name == "laplacian-B":
        L = 1.0 if length is None else float(length)
        return make_problem(L, constant(1.0), constant(0.0), constant(1.0), label=name)
    if length is not None:
        raise ValueError(f"preset {name!r} has a fixed length")
    if name == "fig1-tanh-metric":
        return make_problem(1.0, tanh_profile(40, 10, 1.1), constant(0.0), constant(1.0), label=name)
    if name == "setup2":
        return make_problem(1.0, tanh_profile(40, 20, 1.1), sine_profile(2.0), constant(1.0), label=name)
    if name == "setup3":
        L = 5.0
        return make_problem(L, tanh_profile(40, 10, 1.1, length=L), sine_profile(2.0), constant(1.0), label=name)
    raise UnknownPreset(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}")
