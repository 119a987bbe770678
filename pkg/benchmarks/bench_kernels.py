"""Compiled vs pure-Python kernel timings.

Usage: python benchmarks/bench_kernels.py [--repeat R]

Times each kernel on a 4095-unknown problem (the interior of the default
4097-node grid) and one end-to-end eigensolve with each backend swapped in.
"""

from __future__ import annotations

import argparse
import contextlib
import timeit

import numpy as np

from slloc import _pykernels, kernels
from slloc.problem import preset
from slloc.spectral import eigenpairs_direct

try:
    from slloc import _ckernels
except ImportError:  # extension not built
    _ckernels = None

NAMES = ("sturm_count", "bisect_eigenvalues", "gepp_solve", "ldl_factor", "ldl_solve", "volterra_apply")


def _cases(m: int):
    rng = np.random.default_rng(0)
    h = 1.0 / (m + 1)
    d = np.full(m, 2.0 / h**2) + rng.uniform(0, 1, m)
    e = np.full(m - 1, -1.0 / h**2)
    e2 = e * e
    rhs = rng.standard_normal(m)
    g = rng.standard_normal(m)
    sines = np.sin(30.0 * h * np.arange(m))
    return {
        "sturm_count": lambda k: k.sturm_count(d, e2, 5000.0, 1e-300),
        "bisect_eigenvalues": lambda k: k.bisect_eigenvalues(d, e2, 0, 10, 0.0, 4.1 / h**2, 1e-300),
        "gepp_solve": lambda k: k.gepp_solve(d, e, 9.9, rhs, 1e-300),
        "ldl_factor": lambda k: k.ldl_factor(d, e, 1e-300),
        "ldl_solve": (lambda k, f=_pykernels.ldl_factor(d, e, 1e-300): k.ldl_solve(f[0], f[1], e, rhs)),
        "volterra_apply": lambda k: k.volterra_apply(g, sines, h),
    }


@contextlib.contextmanager
def _backend(module):
    saved = {n: getattr(kernels, n) for n in NAMES}
    for n in NAMES:
        setattr(kernels, n, getattr(module, n))
    try:
        yield
    finally:
        for n, fn in saved.items():
            setattr(kernels, n, fn)


def _best(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05 and number < 10_000:
        number *= 4
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--size", type=int, default=4095)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not available; nothing to compare")
        return 1
    print(f"{'kernel':<22}{'cython [ms]':>14}{'python [ms]':>14}{'speedup':>10}")
    for name, fn in _cases(args.size).items():
        tc = _best(lambda: fn(_ckernels), args.repeat)
        tp = _best(lambda: fn(_pykernels), args.repeat)
        print(f"{name:<22}{tc * 1e3:>14.3f}{tp * 1e3:>14.3f}{tp / tc:>10.1f}")
    prob = preset("setup2")
    row = []
    for module in (_ckernels, _pykernels):
        with _backend(module):
            row.append(_best(lambda: eigenpairs_direct(prob, 10, 4097), 1))
    print(f"{'eigenpairs (10 modes)':<22}{row[0] * 1e3:>14.3f}{row[1] * 1e3:>14.3f}{row[1] / row[0]:>10.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
