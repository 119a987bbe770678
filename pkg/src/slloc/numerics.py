"""Grids, Simpson quadrature, L^t norms, finite differences and tridiagonal solvers.

The tridiagonal eigensolver uses Sturm-sequence bisection for the
eigenvalues followed by inverse iteration for the eigenvectors. The inner
loops live in :mod:`slloc.kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .errors import ConvergenceFailure, EvenNodeCount, SingularPivot, TooFewNodes

#: relative shift perturbation used when inverse iteration hits an exact breakdown
SHIFT_PERTURBATION = 1e-10
#: maximum inverse iterations per eigenvector
MAX_INVERSE_ITERATIONS = 10


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``n`` nodes on ``[a, b]``."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise TooFewNodes(f"grid needs at least 3 nodes, got {self.n}")
        if not self.b > self.a:
            raise ValueError(f"grid endpoints must satisfy a < b, got [{self.a}, {self.b}]")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        x = self.a + self.h * np.arange(self.n)
        x[-1] = self.b
        x.flags.writeable = False
        return x


@dataclass(frozen=True)
class SampledFn:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("sampled function has non-finite entries")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    def __mul__(self, c):
        return SampledFn(self.grid, self.values * c)

    __rmul__ = __mul__


def sample(fn, grid: Grid) -> SampledFn:
    """Evaluate a vectorized callable on ``grid``."""
    return SampledFn(grid, np.broadcast_to(fn(grid.nodes), (grid.n,)))


def simpson_weights(n: int, h: float) -> np.ndarray:
    if n % 2 == 0:
        raise EvenNodeCount(f"Simpson's rule needs an odd node count, got {n}")
    w = np.full(n, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (h / 3.0)


def integrate(f: SampledFn) -> float:
    """Composite Simpson integral of ``f`` over its grid."""
    return float(np.dot(simpson_weights(f.grid.n, f.grid.h), f.values))


def cumulative_simpson(values: np.ndarray, h: float) -> np.ndarray:
    """Running integral from the first node, Simpson on even prefixes.

    Odd prefixes add a trapezoid on the last interval.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    out = np.zeros(n)
    if n < 2:
        return out
    pair = h / 3.0 * (values[0:-2:2] + 4.0 * values[1:-1:2] + values[2::2])
    out[2::2] = np.cumsum(pair)
    out[1::2] = out[0:-1:2] + 0.5 * h * (values[0:-1:2] + values[1::2])
    return out


def lp_norm(f: SampledFn, t) -> float:
    """``(integral |f|^t)^(1/t)`` for ``t`` in {1, 2, 4}, max |f| for ``t = inf``."""
    if t in (np.inf, "inf", float("inf")):
        return float(np.max(np.abs(f.values)))
    if t not in (1, 2, 4):
        raise ValueError(f"unsupported norm exponent {t!r}; use 1, 2, 4 or inf")
    s = integrate(SampledFn(f.grid, np.abs(f.values) ** t))
    return float(max(s, 0.0) ** (1.0 / t))


def second_derivative(f: SampledFn) -> SampledFn:
    """Second-order accurate second derivative, one-sided at the endpoints."""
    n = f.grid.n
    if n < 5:
        raise TooFewNodes(f"second_derivative needs at least 5 nodes, got {n}")
    v = f.values
    h2 = f.grid.h**2
    d2 = np.empty(n)
    d2[1:-1] = (v[:-2] - 2.0 * v[1:-1] + v[2:]) / h2
    d2[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2
    d2[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / h2
    return SampledFn(f.grid, d2)


@dataclass(frozen=True)
class TridiagSystem:
    """Symmetric tridiagonal matrix with an optional diagonal mass matrix."""

    diag: np.ndarray
    off: np.ndarray
    mass_diag: np.ndarray | None = None

    def __post_init__(self):
        d = np.ascontiguousarray(self.diag, dtype=np.float64)
        e = np.ascontiguousarray(self.off, dtype=np.float64)
        if d.ndim != 1 or e.shape != (max(d.shape[0] - 1, 0),):
            raise ValueError("off-diagonal must have length len(diag) - 1")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "off", e)
        if self.mass_diag is not None:
            m = np.ascontiguousarray(self.mass_diag, dtype=np.float64)
            if m.shape != d.shape:
                raise ValueError("mass_diag must match diag in length")
            if not np.all(m > 0):
                raise ValueError("mass_diag entries must be positive")
            object.__setattr__(self, "mass_diag", m)

    @property
    def size(self) -> int:
        return self.diag.shape[0]

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.off * v[1:]
        out[1:] += self.off * v[:-1]
        return out

    def massvec(self, v: np.ndarray) -> np.ndarray:
        return v if self.mass_diag is None else self.mass_diag * v

    def norm_inf(self) -> float:
        row = np.abs(self.diag).copy()
        row[:-1] += np.abs(self.off)
        row[1:] += np.abs(self.off)
        return float(row.max())

    def factor(self) -> "TridiagFactor":
        return TridiagFactor(self)


class TridiagFactor:
    """LDL^T (Thomas) factorization of ``sys`` reused across solves."""

    def __init__(self, sys: TridiagSystem):
        tiny = np.finfo(np.float64).tiny * max(1.0, sys.norm_inf())
        piv, mult, bad = kernels.ldl_factor(sys.diag, sys.off, tiny)
        if bad >= 0:
            raise SingularPivot(f"zero pivot at row {bad} in tridiagonal elimination")
        self.system = sys
        self._piv = piv
        self._mult = mult

    def solve(self, rhs) -> np.ndarray:
        rhs = np.ascontiguousarray(rhs, dtype=np.float64)
        if rhs.shape != (self.system.size,):
            raise ValueError("right-hand side does not match the system size")
        return kernels.ldl_solve(self._piv, self._mult, self.system.off, rhs)


def tridiag_solve(sys: TridiagSystem, rhs) -> np.ndarray:
    """Solve ``A x = rhs`` by the Thomas algorithm (no pivoting)."""
    return sys.factor().solve(rhs)


def _fix_sign(v: np.ndarray) -> np.ndarray:
    big = np.abs(v) > 1e-8 * np.max(np.abs(v))
    first = int(np.argmax(big))
    return -v if v[first] < 0 else v


def tridiag_eigs(sys: TridiagSystem, count: int):
    """Smallest ``count`` eigenpairs of ``A v = lambda M v``.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as rows, M-orthonormal, first significant entry positive.
    """
    m = sys.size
    if not 1 <= count <= m:
        raise ValueError(f"count must lie in [1, {m}], got {count}")
    d, e = sys.diag, sys.off
    if sys.mass_diag is not None:
        s = 1.0 / np.sqrt(sys.mass_diag)
        d = d * s * s
        e = e * s[:-1] * s[1:]
    else:
        s = None
    d = np.ascontiguousarray(d)
    e = np.ascontiguousarray(e)
    e2 = np.ascontiguousarray(e * e)

    radius = np.zeros(m)
    radius[:-1] += np.abs(e)
    radius[1:] += np.abs(e)
    lo = float(np.min(d - radius))
    hi = float(np.max(d + radius))
    span = max(hi - lo, abs(lo), abs(hi), 1.0)
    lo -= 2.0 * np.finfo(float).eps * span + 1e-300
    hi += 2.0 * np.finfo(float).eps * span + 1e-300
    pivmin = np.finfo(np.float64).tiny * max(1.0, float(e2.max()) if m > 1 else 1.0)

    lam = np.asarray(kernels.bisect_eigenvalues(d, e2, 0, count, lo, hi, pivmin))
    reduced = TridiagSystem(d, e)
    vecs = _inverse_iteration(reduced, lam, pivmin)
    if s is not None:
        vecs = vecs * s[None, :]
    vecs = np.array([_fix_sign(v) for v in vecs])
    return lam, vecs


def _inverse_iteration(sys: TridiagSystem, lam: np.ndarray, pivmin: float) -> np.ndarray:
    m = sys.size
    eps = np.finfo(np.float64).eps
    tnorm = sys.norm_inf()
    rng = np.random.default_rng(20240531)
    out = np.empty((lam.shape[0], m))
    for k, sigma in enumerate(lam):
        x = rng.uniform(-1.0, 1.0, m)
        x /= np.linalg.norm(x)
        shift = float(sigma)
        converged = False
        extra = 0
        for _ in range(MAX_INVERSE_ITERATIONS):
            y, _replaced = kernels.gepp_solve(sys.diag, sys.off, shift, x, pivmin)
            if not np.all(np.isfinite(y)):
                shift = shift + SHIFT_PERTURBATION * max(abs(shift), tnorm * eps)
                continue
            growth = np.linalg.norm(y)
            if k:
                # all earlier vectors, twice: cheap and robust against close pairs
                prev = out[:k]
                y -= prev.T @ (prev @ y)
                y -= prev.T @ (prev @ y)
            x = y / np.linalg.norm(y)
            if converged:
                extra += 1
                if extra >= 1:
                    break
            elif 1.0 / growth <= max(1e-12 * abs(shift), 32.0 * eps * tnorm):
                converged = True
        else:
            if not converged:
                raise ConvergenceFailure(
                    f"inverse iteration did not converge for eigenvalue #{k + 1} ({sigma:.6g})"
                )
        out[k] = x
    return out
