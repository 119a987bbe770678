"""Liouville transformation to the normal form ``-v'' + Q(y) v = lambda v`` on ``[0, B]``.

With ``y(x) = int_0^x sqrt(w/p)``, ``f(y) = (w p)^(1/4)(x(y))`` and
``v(y) = phi(x(y)) f(y)``, the potential is ``Q = f''/f + q/w`` evaluated at
``x(y)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .errors import InverseInterpolationFailure, TooFewNodes
from .numerics import Grid, SampledFn, lp_norm, second_derivative, simpson_weights
from .problem import Problem

DEFAULT_GRID = 4097
#: Simpson subintervals per grid interval when accumulating y(x)
REFINE = 8

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _speed(prob: Problem, x):
    return np.sqrt(prob.w(x) / prob.p(x))


def _gl_integral(prob, x0, x1):
    """Gauss-Legendre integral of sqrt(w/p) over [x0, x1], elementwise."""
    half = 0.5 * (x1 - x0)
    pts = x0[..., None] + half[..., None] * (_GL_NODES + 1.0)
    return half * (_speed(prob, pts) @ _GL_WEIGHTS)


def _cumulative_y(prob: Problem, x: np.ndarray, refine: int = REFINE) -> np.ndarray:
    h = x[1] - x[0]
    sub = np.linspace(0.0, 1.0, refine + 1)
    pts = x[:-1, None] + h * sub[None, :]
    seg = _speed(prob, pts) @ simpson_weights(refine + 1, h / refine)
    return np.concatenate([[0.0], np.cumsum(seg)])


def _f_second_over_f(prob: Problem, x):
    """f''(y)/f(y) at y = y(x) via the chain rule, from analytic p, w derivatives."""
    p, p1, p2 = prob.p(x), prob.p.d1(x), prob.p.d2(x)
    w, w1, w2 = prob.w(x), prob.w.d1(x), prob.w.d2(x)
    m = w * p
    m1 = w1 * p + w * p1
    m2 = w2 * p + 2.0 * w1 * p1 + w * p2
    g1 = m1 / (4.0 * m)
    g2 = m2 / (4.0 * m) - 3.0 * m1**2 / (16.0 * m**2)
    # d/dy = r d/dx with r = sqrt(p/w); f'' = r^2 g'' + r r' g'
    r2 = p / w
    rr1 = (p1 * w - p * w1) / (2.0 * w * w)
    return r2 * g2 + rr1 * g1


@dataclass(frozen=True, eq=False)
class LiouvilleForm:
    problem: Problem
    B: float
    y_of_x: SampledFn
    x_of_y: SampledFn
    f: SampledFn
    Q: SampledFn
    q_norms: tuple

    @property
    def x_grid(self) -> Grid:
        return self.y_of_x.grid

    @property
    def y_grid(self) -> Grid:
        return self.x_of_y.grid

    def x_at(self, y) -> np.ndarray:
        """Inverse map x(y) at arbitrary points of [0, B]."""
        return _invert(self.problem, self.x_grid.nodes, self.y_of_x.values, np.asarray(y, dtype=float))

    def y_at(self, x) -> np.ndarray:
        """Forward map y(x) at arbitrary points of [0, L]."""
        x = np.asarray(x, dtype=np.float64)
        nodes = self.x_grid.nodes
        i = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, nodes.size - 2)
        return self.y_of_x.values[i] + _gl_integral(self.problem, nodes[i], x)


def _invert(prob, x_nodes, y_nodes, targets, max_iter=30):
    flat = np.atleast_1d(targets).astype(np.float64).ravel()
    i = np.clip(np.searchsorted(y_nodes, flat, side="right") - 1, 0, y_nodes.size - 2)
    lo = x_nodes[i].copy()
    hi = x_nodes[i + 1].copy()
    x0, y0 = x_nodes[i], y_nodes[i]
    guess = PchipInterpolator(y_nodes, x_nodes)(flat)
    bad = ~((guess >= lo) & (guess <= hi))
    x = np.where(bad, 0.5 * (lo + hi), guess)
    tol = 4.0 * np.finfo(float).eps * max(y_nodes[-1], 1.0)
    for _ in range(max_iter):
        F = y0 + _gl_integral(prob, x0, x) - flat
        done = np.abs(F) <= tol
        if done.all():
            break
        lo = np.where(F < 0, x, lo)
        hi = np.where(F > 0, x, hi)
        step = x - F / _speed(prob, x)
        # bisection whenever Newton leaves the bracket
        outside = (step <= lo) | (step >= hi)
        x = np.where(done, x, np.where(outside, 0.5 * (lo + hi), step))
    else:
        F = y0 + _gl_integral(prob, x0, x) - flat
        if np.max(np.abs(F)) > 1e3 * tol:
            raise InverseInterpolationFailure(
                f"x(y) inversion residual {np.max(np.abs(F)):.3g} exceeds tolerance"
            )
    return x.reshape(np.shape(targets))


def transform(prob: Problem, n: int = DEFAULT_GRID) -> LiouvilleForm:
    """Liouville normal form of ``prob`` sampled on ``n``-point x and y grids."""
    if n < 65 or n % 2 == 0:
        raise TooFewNodes(f"transform needs an odd grid size >= 65, got {n}")
    xg = Grid(0.0, prob.L, n)
    x = xg.nodes
    y = _cumulative_y(prob, x)
    if np.any(np.diff(y) <= 0):
        raise InverseInterpolationFailure("y(x) lost strict monotonicity on the grid")
    B = float(y[-1])
    yg = Grid(0.0, B, n)
    xy = _invert(prob, x, y, yg.nodes)
    xy[0], xy[-1] = 0.0, prob.L
    if np.any(np.diff(xy) <= 0):
        raise InverseInterpolationFailure("x(y) is not strictly increasing")

    f_vals = (prob.w(xy) * prob.p(xy)) ** 0.25
    f = SampledFn(yg, f_vals)
    if prob.is_analytic:
        fpp_over_f = _f_second_over_f(prob, xy)
    else:
        fpp_over_f = second_derivative(f).values / f_vals
    Q = SampledFn(yg, fpp_over_f + prob.q(xy) / prob.w(xy))
    norms = (lp_norm(Q, np.inf), lp_norm(Q, 4), lp_norm(Q, 1))
    return LiouvilleForm(prob, B, SampledFn(xg, y), SampledFn(yg, xy), f, Q, norms)


def q_norms(lf: LiouvilleForm) -> tuple:
    """``(sup |Q|, ||Q||_4, ||Q||_1)`` over ``[0, B]``."""
    return lf.q_norms


def pushforward(v: SampledFn, lf: LiouvilleForm) -> SampledFn:
    """Map a normal-form function back to x: ``phi(x) = v(y(x)) / f(y(x))``."""
    if not np.isclose(v.grid.b, lf.B, rtol=1e-12, atol=0.0) or v.grid.a != 0.0:
        raise ValueError("v must be sampled on [0, B] of this Liouville form")
    prob = lf.problem
    x = lf.x_grid.nodes
    yx = np.clip(lf.y_of_x.values, 0.0, v.grid.b)
    vy = CubicSpline(v.grid.nodes, v.values)(yx)
    vy[0], vy[-1] = v.values[0], v.values[-1]
    g = (prob.w(x) * prob.p(x)) ** 0.25
    return SampledFn(lf.x_grid, vy / g)
