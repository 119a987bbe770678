"""Landscape functions and their convergence bounds.

``ell~_k`` solves ``T^k ell~_k = 1`` (k tridiagonal solves from the constant
function, one factorization), ``ell_k = ell~_k / ||ell~_k||_2`` converges to the
first eigenfunction. The generalized variant solves ``(tT)^k ell_{k,t} = 1``.
These are computed by repeated solves, never by eigen-synthesis, so comparing
them with eigenpairs cross-checks two independent computations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGap, IndexOutOfRange, NonPositiveLandscape, OutOfWindow
from .liouville import DEFAULT_GRID
from .numerics import SampledFn, integrate
from .problem import Problem
from .spectral import EigenPair, direct_system


@dataclass(frozen=True, eq=False)
class LandscapeIterate:
    k: int
    values: SampledFn
    raw: SampledFn
    raw_norm: float
    normalized: bool = True
    t: float | None = None
    weighted_caveat: bool = False


@dataclass(frozen=True, eq=False)
class ProjectionOfOne:
    j: int
    values: SampledFn
    coefficient: float

    @property
    def norm(self) -> float:
        return abs(self.coefficient)


def _weighted_norm(f: SampledFn, w: np.ndarray) -> float:
    return float(np.sqrt(integrate(SampledFn(f.grid, f.values**2 * w))))


def _iterates(prob: Problem, k: int, n: int, scale: float = 1.0):
    """Yield ``(j, ell~_j)`` for j = 1..k, each solve divided by ``scale``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    sys, grid = direct_system(prob, n)
    factor = sys.factor()
    w = sys.mass_diag
    cur = np.ones(grid.n - 2)
    for j in range(1, k + 1):
        cur = factor.solve(w * cur) / scale
        full = np.zeros(grid.n)
        full[1:-1] = cur
        yield j, SampledFn(grid, full)


def _finish(prob, j, raw: SampledFn, t=None, normalize=True) -> LandscapeIterate:
    interior = raw.values[1:-1]
    if not np.all(interior > 0):
        raise NonPositiveLandscape(f"landscape iterate k={j} is not positive in the interior")
    w = prob.w(raw.x)
    norm = _weighted_norm(raw, w)
    vals = raw * (1.0 / norm) if normalize else raw
    return LandscapeIterate(
        k=j,
        values=vals,
        raw=raw,
        raw_norm=norm,
        normalized=normalize,
        t=t,
        weighted_caveat=not prob.unit_weight,
    )


def landscape(prob: Problem, n: int = DEFAULT_GRID) -> LandscapeIterate:
    """Solve ``T ell = 1``; ``values`` normalized, ``raw`` holds ell itself."""
    (_, raw), = _iterates(prob, 1, n)
    return _finish(prob, 1, raw)


def iterated_landscape_sequence(prob: Problem, k_max: int, n: int = DEFAULT_GRID) -> list:
    return [_finish(prob, j, raw) for j, raw in _iterates(prob, k_max, n)]


def iterated_landscape(prob: Problem, k: int, n: int = DEFAULT_GRID) -> LandscapeIterate:
    return iterated_landscape_sequence(prob, k, n)[-1]


def generalized_landscape(prob: Problem, k: int, t: float, n: int = DEFAULT_GRID) -> LandscapeIterate:
    """Unnormalized ``ell_{k,t}`` with ``(tT)^k ell_{k,t} = 1``."""
    if t <= 0:
        raise ValueError("t must be positive")
    for j, raw in _iterates(prob, k, n, scale=t):
        pass
    return _finish(prob, j, raw, t=t, normalize=False)


def projection_of_one(pairs: list, j: int, weight=None) -> ProjectionOfOne:
    """``P_j 1 = <phi_j, 1> phi_j`` for unit eigenfunctions.

    ``weight`` samples w for the weighted inner product (default w = 1).
    """
    if not 1 <= j <= len(pairs):
        raise IndexOutOfRange(f"eigen index {j} outside 1..{len(pairs)}")
    phi = pairs[j - 1].values
    vals = phi.values if weight is None else phi.values * weight
    coeff = integrate(SampledFn(phi.grid, vals))
    return ProjectionOfOne(j, phi * coeff, coeff)


def prop1_bound(lambda1: float, lambda2: float, L: float, p1_norm: float, k: int) -> float:
    """``2 sqrt(lambda1) L / ||P_1 1|| * (lambda1/lambda2)^(k - 1/2)``."""
    if not lambda1 < lambda2:
        raise DegenerateGap(f"need lambda1 < lambda2, got {lambda1} and {lambda2}")
    if lambda1 <= 0 or p1_norm <= 0 or k < 1:
        raise ValueError("need lambda1 > 0, p1_norm > 0 and k >= 1")
    return 2.0 * np.sqrt(lambda1) * L / p1_norm * (lambda1 / lambda2) ** (k - 0.5)


def prop2_bound(L: float, t: float, lambda_next: float, k: int, lambda_n0: float | None = None) -> float:
    """``L / sqrt(t) * (t lambda_{n0+1})^-(k - 1/2)`` for t in the window."""
    if not t * lambda_next > 1.0:
        raise OutOfWindow(f"t={t} is not above 1/lambda_(n0+1)={1.0 / lambda_next:.6g}")
    if lambda_n0 is not None and not t * lambda_n0 < 1.0:
        raise OutOfWindow(f"t={t} is not below 1/lambda_n0={1.0 / lambda_n0:.6g}")
    if k < 1:
        raise ValueError("k must be >= 1")
    return L / np.sqrt(t) * (t * lambda_next) ** -(k - 0.5)


def check_window(pairs: list, t: float, n0: int) -> None:
    """Raise :class:`OutOfWindow` unless ``1/lambda_{n0+1} < t < 1/lambda_{n0}``."""
    if not 1 <= n0 < len(pairs):
        raise IndexOutOfRange(f"n0={n0} needs eigenpairs 1..{n0 + 1}")
    lo, hi = 1.0 / pairs[n0].lam, 1.0 / pairs[n0 - 1].lam
    if not lo < t < hi:
        raise OutOfWindow(f"t={t} outside ]{lo:.6g}, {hi:.6g}[ for n0={n0}")


def prop2_residual(pairs: list, t: float, k: int, n0: int, j_max: int = 20, weight=None) -> float:
    """Sup norm of the tail ``sum_{j=n0+1}^{j_max} (t lambda_j)^-k P_j 1``."""
    if not n0 < j_max <= len(pairs):
        raise IndexOutOfRange(f"need n0 < j_max <= {len(pairs)}, got n0={n0}, j_max={j_max}")
    total = np.zeros_like(pairs[0].values.values)
    for j in range(n0 + 1, j_max + 1):
        proj = projection_of_one(pairs, j, weight)
        total += (t * pairs[j - 1].lam) ** -k * proj.values.values
    return float(np.max(np.abs(total)))


def first_mode_error(ell: LandscapeIterate, phi1: EigenPair) -> float:
    """``||ell_k - phi_1||_inf`` after sign alignment."""
    a, b = ell.values.values, phi1.values.values
    if np.dot(a, b) < 0:
        b = -b
    return float(np.max(np.abs(a - b)))
