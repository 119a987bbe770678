import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import STUDY_PRESETS, cached_form, cached_pairs, cached_problem, default_grid
from slloc.errors import TooFewNodes
from slloc.liouville import transform
from slloc.numerics import Grid, SampledFn, integrate, lp_norm, sample
from slloc.problem import constant, make_problem, preset, sine_profile, tabulated
from slloc.spectral import (
    apply_KQ,
    cross_validate,
    eigenpairs_direct,
    eigenpairs_normal_form,
    kq_norm_bounds,
    rayleigh_quotient,
    slope_at_origin,
    volterra_residual,
)


def test_laplacian_eigenpairs_are_exact_discrete_modes():
    n = 1025
    h = 1.0 / (n - 1)
    pairs = eigenpairs_direct(preset("laplacian-B"), 8, n)
    for p in pairs:
        k = p.index
        assert p.lam == pytest.approx(4 / h**2 * np.sin(k * np.pi * h / 2) ** 2, abs=1e-15 * 4 / h**2 * 16)
        exact = np.sqrt(2) * np.sin(k * np.pi * p.values.x)
        assert np.max(np.abs(p.values.values - exact)) < 1e-6
        assert p.coordinate == "x"


@pytest.mark.parametrize("name", STUDY_PRESETS)
def test_eigenvalues_strictly_increase(name):
    lam = np.array([p.lam for p in cached_pairs(name, 40)])
    assert np.all(np.diff(lam) > 0)


@pytest.mark.parametrize("name", STUDY_PRESETS)
def test_rayleigh_quotient_consistency(name):
    prob = cached_problem(name)
    for p in cached_pairs(name, 40)[:10]:
        assert abs(rayleigh_quotient(prob, p) - p.lam) <= 1e-4 * p.lam


def test_weighted_normalization():
    xs = np.linspace(0, 1, 4001)
    prob = make_problem(1.0, constant(1.0), constant(0.0), tabulated(xs, 1 + xs))
    pairs = eigenpairs_direct(prob, 3, 513)
    w = prob.w(pairs[0].values.x)
    for p in pairs:
        assert integrate(SampledFn(p.values.grid, p.values.values**2 * w)) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("name", STUDY_PRESETS)
def test_routes_agree(name):
    rep = cross_validate(cached_problem(name), 20, default_grid(cached_problem(name)))
    assert np.max(rep.eigenvalue_deltas) < 5e-4
    assert np.max(rep.eigenfunction_deltas[:10]) < 5e-3


def test_routes_agree_with_variable_weight():
    xs = np.linspace(0, 1, 20001)
    prob = make_problem(1.0, sine_profile(2.0, 0.5), constant(1.0), tabulated(xs, 1.5 + np.cos(3 * xs)))
    rep = cross_validate(prob, 10, 2049)
    assert np.max(rep.eigenvalue_deltas) < 1e-3


def test_size_checks():
    prob = preset("laplacian-B")
    with pytest.raises(TooFewNodes):
        eigenpairs_direct(prob, 3, 100)
    with pytest.raises(ValueError):
        eigenpairs_direct(prob, 200, 129)


# ---------------------------------------------------------------- Volterra operator


def test_kq_of_constant_product_has_closed_form():
    # Q u = 1 gives (1 - cos(r y)) / r
    g = Grid(0.0, 2.0, 2001)
    lam = 9.0
    one = sample(lambda y: np.ones_like(y), g)
    got = apply_KQ(one, lam, one).values
    np.testing.assert_allclose(got, (1 - np.cos(3 * g.nodes)) / 3, atol=1e-9)


def test_kq_second_order_on_odd_prefixes():
    lam = 4.0
    errs = []
    for n in (101, 201):
        g = Grid(0.0, 1.0, n)
        one = sample(lambda y: np.ones_like(y), g)
        errs.append(np.max(np.abs(apply_KQ(one, lam, one).values - (1 - np.cos(2 * g.nodes)) / 2)))
    assert errs[0] / errs[1] > 3.5


def test_kq_argument_checks():
    g = Grid(0.0, 1.0, 11)
    f = sample(np.sin, g)
    with pytest.raises(ValueError):
        apply_KQ(f, -1.0, f)
    with pytest.raises(ValueError):
        apply_KQ(f, 1.0, sample(np.sin, Grid(0.0, 1.0, 13)))
    with pytest.raises(ValueError):
        apply_KQ(sample(np.sin, Grid(0.5, 1.0, 11)), 1.0, sample(np.sin, Grid(0.5, 1.0, 11)))


def test_kq_bound_values():
    b2, b4 = kq_norm_bounds(1.0, 0.74, (1.0, 1.0))
    assert b2 == 0.5
    assert b4 == pytest.approx(0.857207, abs=5e-7)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(0.3, 4.0),
    st.floats(0.5, 400.0),
    st.integers(1, 6),
    st.integers(1, 9),
)
def test_kq_respects_norm_bounds(B, lam, qf, uf):
    g = Grid(0.0, B, 1025)
    y = g.nodes
    Q = SampledFn(g, 1.5 + np.cos(qf * y) * np.sin(0.3 * qf * y))
    u = SampledFn(g, np.sin(uf * y / B * np.pi) + 0.2 * y)
    ku = apply_KQ(Q, lam, u)
    b2, b4 = kq_norm_bounds(B, lam, (lp_norm(Q, np.inf), lp_norm(Q, 4)))
    assert lp_norm(ku, 2) <= b2 * lp_norm(u, 2) * (1 + 1e-3)
    assert lp_norm(ku, 4) <= b4 * lp_norm(u, 4) * (1 + 1e-3)


def test_slope_estimate_fourth_order():
    g = Grid(0.0, 1.0, 201)
    assert slope_at_origin(sample(lambda y: np.sin(2 * y), g)) == pytest.approx(2.0, abs=1e-8)


@pytest.mark.parametrize("name", STUDY_PRESETS)
def test_volterra_residual_is_second_order(name):
    prob = cached_problem(name)
    res = []
    for n in (2049, 4097):
        lf = transform(prob, n)
        res.append(np.array([volterra_residual(p, lf) for p in eigenpairs_normal_form(lf, 5)]))
    ratio = res[0] / res[1]
    assert np.all(ratio > 3.6) and np.all(ratio < 4.4)
    assert np.max(res[1]) < 1e-4


def test_volterra_residual_needs_normal_form_pair():
    lf = cached_form("setup2")
    with pytest.raises(ValueError):
        volterra_residual(cached_pairs("setup2", 40)[0], lf)


@pytest.mark.slow
@pytest.mark.parametrize("name", STUDY_PRESETS)
def test_richardson_order_both_routes(name):
    prob = cached_problem(name)
    d, nf = [], []
    for n in (2049, 4097, 8193):
        d.append(np.array([p.lam for p in eigenpairs_direct(prob, 10, n)]))
        nf.append(np.array([p.lam for p in eigenpairs_normal_form(transform(prob, n), 10)]))
    for lam in (d, nf):
        order = np.log2(np.abs(lam[0] - lam[1]) / np.abs(lam[1] - lam[2]))
        assert np.all((order > 1.8) & (order < 2.2))
