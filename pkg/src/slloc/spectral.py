"""Eigenpairs of the Sturm-Liouville operator and the Volterra operator K_Q.

Two independent discretizations are provided:

* direct: conservative second-order finite differences of
  ``-(p phi')' + q phi = lambda w phi`` with ``p`` at half nodes;
* normal form: three-point finite differences of ``-v'' + Q v = lambda v``
  on the Liouville-transformed interval ``[0, B]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import TooFewNodes
from .liouville import DEFAULT_GRID, LiouvilleForm, pushforward, transform
from .numerics import Grid, SampledFn, TridiagSystem, integrate, tridiag_eigs
from .problem import Problem


@dataclass(frozen=True, eq=False)
class EigenPair:
    index: int
    lam: float
    values: SampledFn
    coordinate: str = "x"
    normalization: str = "unit-L2-weighted"


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    pairs: list
    route: str
    grid: int
    normal_form_pairs: list = field(default_factory=list)
    eigenvalue_deltas: np.ndarray | None = None
    eigenfunction_deltas: np.ndarray | None = None


def _check_sizes(n_modes, n):
    if n < 5 or n % 2 == 0:
        raise TooFewNodes(f"grid size must be odd and >= 5, got {n}")
    if not 1 <= n_modes <= n - 2:
        raise ValueError(f"n_modes must lie in [1, {n - 2}], got {n_modes}")


def direct_system(prob: Problem, n: int):
    """Interior FD system ``A phi = lambda M phi`` and its x grid."""
    grid = Grid(0.0, prob.L, n)
    x = grid.nodes
    h = grid.h
    p_half = prob.p(0.5 * (x[:-1] + x[1:]))
    inner = x[1:-1]
    diag = (p_half[:-1] + p_half[1:]) / h**2 + prob.q(inner)
    off = -p_half[1:-1] / h**2
    return TridiagSystem(diag, off, prob.w(inner)), grid


def _normalize(grid: Grid, interior: np.ndarray, weight=None) -> np.ndarray:
    full = np.zeros(grid.n)
    full[1:-1] = interior
    sq = full * full if weight is None else full * full * weight
    return full / np.sqrt(integrate(SampledFn(grid, sq)))


def eigenpairs_direct(prob: Problem, n_modes: int, n: int = DEFAULT_GRID) -> list:
    """Lowest ``n_modes`` eigenpairs, unit in ``L^2(w dx)``, first lobe positive."""
    _check_sizes(n_modes, n)
    sys, grid = direct_system(prob, n)
    lam, vecs = tridiag_eigs(sys, n_modes)
    w = prob.w(grid.nodes)
    return [
        EigenPair(k + 1, float(lam[k]), SampledFn(grid, _normalize(grid, vecs[k], w)))
        for k in range(n_modes)
    ]


def normal_form_system(lf: LiouvilleForm) -> TridiagSystem:
    h = lf.y_grid.h
    m = lf.y_grid.n - 2
    return TridiagSystem(2.0 / h**2 + lf.Q.values[1:-1], np.full(m - 1, -1.0 / h**2))


def eigenpairs_normal_form(lf: LiouvilleForm, n_modes: int, n: int | None = None) -> list:
    """Lowest eigenpairs of ``-v'' + Q v = lambda v`` on ``[0, B]`` (identity mass)."""
    if n is not None and n != lf.y_grid.n:
        lf = transform(lf.problem, n)
    n = lf.y_grid.n
    _check_sizes(n_modes, n)
    lam, vecs = tridiag_eigs(normal_form_system(lf), n_modes)
    grid = lf.y_grid
    return [
        EigenPair(k + 1, float(lam[k]), SampledFn(grid, _normalize(grid, vecs[k])), coordinate="y")
        for k in range(n_modes)
    ]


def cross_validate(prob: Problem, n_modes: int, n: int = DEFAULT_GRID) -> SpectrumReport:
    """Run both routes; report relative eigenvalue and sup-norm eigenfunction deltas."""
    direct = eigenpairs_direct(prob, n_modes, n)
    lf = transform(prob, n)
    normal = eigenpairs_normal_form(lf, n_modes)
    w = prob.w(lf.x_grid.nodes)
    lam_d = np.array([p.lam for p in direct])
    lam_n = np.array([p.lam for p in normal])
    fdeltas = []
    for d, v in zip(direct, normal):
        phi = pushforward(v.values, lf).values
        phi = phi / np.sqrt(integrate(SampledFn(lf.x_grid, phi * phi * w)))
        if np.dot(phi, d.values.values) < 0:
            phi = -phi
        fdeltas.append(np.max(np.abs(phi - d.values.values)))
    return SpectrumReport(
        pairs=direct,
        route="direct",
        grid=n,
        normal_form_pairs=normal,
        eigenvalue_deltas=np.abs(lam_n - lam_d) / np.abs(lam_d),
        eigenfunction_deltas=np.array(fdeltas),
    )


def apply_KQ(Q: SampledFn, lam: float, u: SampledFn) -> SampledFn:
    """``K_Q u(y) = int_0^y Q(z) sin(sqrt(lam) (y - z)) u(z) dz`` at every node.

    Simpson on each prefix; the last interval of an odd prefix is a trapezoid.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if Q.grid != u.grid:
        raise ValueError("Q and u must share a grid")
    if Q.grid.a != 0.0:
        raise ValueError("K_Q integrates from y = 0; grid must start at 0")
    g = np.ascontiguousarray(Q.values * u.values)
    h = Q.grid.h
    sines = np.ascontiguousarray(np.sin(np.sqrt(lam) * h * np.arange(Q.grid.n)))
    return SampledFn(Q.grid, kernels.volterra_apply(g, sines, h))


def kq_norm_bounds(B: float, lam: float, q_norms) -> tuple:
    """Operator-norm bounds of K_Q on L^2 and L^4 (``q_norms = (sup, l4, ...)``)."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    sup, l4 = q_norms[0], q_norms[1]
    bound_2 = B * sup / 2.0
    bound_4 = (B**3 / 12.0 + 5.0 * B / (32.0 * lam) + 5.0 / (32.0 * lam**1.5)) ** 0.25 * l4
    return bound_2, bound_4


def slope_at_origin(v: SampledFn) -> float:
    """Fourth-order one-sided estimate of v'(0)."""
    c = np.array([-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -0.25])
    return float(np.dot(c, v.values[:5]) / v.grid.h)


def volterra_residual(pair: EigenPair, lf: LiouvilleForm) -> float:
    """Sup-norm residual of the Volterra equation for a normal-form eigenpair.

    The eigenfunction is rescaled so that v'(0) = (w(0) p(0))^(-1/4) first.
    """
    if pair.coordinate != "y":
        raise ValueError("volterra_residual needs a normal-form (y) eigenpair")
    prob = lf.problem
    slope = float((prob.w(0.0) * prob.p(0.0)) ** -0.25)
    v = pair.values * (slope / slope_at_origin(pair.values))
    root = np.sqrt(pair.lam)
    phi = np.sin(root * v.grid.nodes)
    kv = apply_KQ(lf.Q, pair.lam, v).values
    r = v.values - slope / root * phi - kv / root
    return float(np.max(np.abs(r)))


def rayleigh_quotient(prob: Problem, pair: EigenPair) -> float:
    """``(int p phi'^2 + q phi^2) / int w phi^2`` with centered differences."""
    phi = pair.values
    x = phi.x
    dphi = np.gradient(phi.values, phi.grid.h, edge_order=2)
    num = integrate(SampledFn(phi.grid, prob.p(x) * dphi**2 + prob.q(x) * phi.values**2))
    den = integrate(SampledFn(phi.grid, prob.w(x) * phi.values**2))
    return num / den
