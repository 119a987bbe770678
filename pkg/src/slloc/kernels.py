"""Kernel backend selection.

The compiled extension ``slloc._ckernels`` is used when it imports; otherwise
the numpy implementation in ``slloc._pykernels`` is used. Setting the
environment variable ``SLLOC_KERNELS=python`` forces the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("SLLOC_KERNELS", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

sturm_count = _impl.sturm_count
bisect_eigenvalues = _impl.bisect_eigenvalues
gepp_solve = _impl.gepp_solve
ldl_factor = _impl.ldl_factor
ldl_solve = _impl.ldl_solve
volterra_apply = _impl.volterra_apply

__all__ = [
    "BACKEND",
    "sturm_count",
    "bisect_eigenvalues",
    "gepp_solve",
    "ldl_factor",
    "ldl_solve",
    "volterra_apply",
]
