import functools

import numpy as np
import pytest

from slloc.liouville import transform
from slloc.problem import preset
from slloc.spectral import eigenpairs_direct

STUDY_PRESETS = ("fig1-tanh-metric", "setup2", "setup3")


def default_grid(prob):
    return 8193 if prob.L > 1.0 else 4097


@functools.lru_cache(maxsize=None)
def cached_problem(name):
    return preset(name)


@functools.lru_cache(maxsize=None)
def cached_form(name, n=None):
    prob = cached_problem(name)
    return transform(prob, n or default_grid(prob))


@functools.lru_cache(maxsize=None)
def cached_pairs(name, modes, n=None):
    prob = cached_problem(name)
    return tuple(eigenpairs_direct(prob, modes, n or default_grid(prob)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
