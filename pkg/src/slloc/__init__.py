"""Localization of Sturm-Liouville eigenfunctions.

Eigensolvers for ``-(p u')' + q u = lambda w u`` with Dirichlet conditions,
the Liouville normal form, bounds on the localization coefficient
``alpha(u) = ||u||_2^4 / ||u||_4^4`` and iterated landscape functions.
"""

__version__ = "0.1.0"

from .errors import NumericalError, SllocError, ValidationError
from .kernels import BACKEND
from .problem import PRESETS, Problem, make_problem, preset

__all__ = [
    "BACKEND",
    "NumericalError",
    "PRESETS",
    "Problem",
    "SllocError",
    "ValidationError",
    "__version__",
    "make_problem",
    "preset",
]
