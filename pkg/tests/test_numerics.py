import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slloc.errors import EvenNodeCount, SingularPivot, TooFewNodes
from slloc.numerics import (
    Grid,
    SampledFn,
    TridiagSystem,
    cumulative_simpson,
    integrate,
    lp_norm,
    sample,
    second_derivative,
    simpson_weights,
    tridiag_eigs,
    tridiag_solve,
)


def test_grid_nodes_hit_endpoints_exactly():
    g = Grid(0.0, 0.3, 7)
    assert g.nodes[0] == 0.0 and g.nodes[-1] == 0.3
    assert g.h == pytest.approx(0.05)


def test_grid_rejects_small_or_reversed():
    with pytest.raises(TooFewNodes):
        Grid(0, 1, 2)
    with pytest.raises(ValueError):
        Grid(1, 0, 5)


def test_sampled_fn_is_read_only_and_finite():
    g = Grid(0, 1, 5)
    f = SampledFn(g, np.ones(5))
    with pytest.raises(ValueError):
        f.values[0] = 2.0
    with pytest.raises(ValueError):
        SampledFn(g, np.array([1, 2, np.nan, 4, 5.0]))
    with pytest.raises(ValueError):
        SampledFn(g, np.ones(4))


def test_simpson_exact_on_cubics():
    g = Grid(-1.0, 2.0, 9)
    f = sample(lambda x: 4 * x**3 - x**2 + 3, g)
    assert integrate(f) == pytest.approx(15.0 - 3.0 + 9.0, rel=1e-14)


def test_simpson_needs_odd_nodes():
    with pytest.raises(EvenNodeCount):
        simpson_weights(10, 0.1)
    with pytest.raises(EvenNodeCount):
        integrate(SampledFn(Grid(0, 1, 4), np.ones(4)))


def test_simpson_fourth_order():
    errs = []
    for n in (33, 65, 129):
        errs.append(abs(integrate(sample(np.exp, Grid(0, 1, n))) - (np.e - 1)))
    assert errs[0] / errs[1] == pytest.approx(16, rel=0.02)
    assert errs[1] / errs[2] == pytest.approx(16, rel=0.02)


def test_cumulative_simpson_matches_antiderivative():
    x = np.linspace(0, np.pi, 2001)
    c = cumulative_simpson(np.sin(x), x[1] - x[0])
    np.testing.assert_allclose(c[::2], 1 - np.cos(x[::2]), atol=1e-12)
    np.testing.assert_allclose(c, 1 - np.cos(x), atol=1e-7)


def test_lp_norms_of_sine():
    f = sample(lambda x: np.sin(np.pi * x), Grid(0, 1, 2049))
    assert lp_norm(f, 2) == pytest.approx(np.sqrt(0.5), rel=1e-12)
    assert lp_norm(f, 4) == pytest.approx((3 / 8) ** 0.25, rel=1e-12)
    assert lp_norm(f, 1) == pytest.approx(2 / np.pi, rel=1e-12)
    assert lp_norm(f, np.inf) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        lp_norm(f, 3)


@settings(max_examples=40, deadline=None)
@given(
    st.floats(-5, 5),
    st.floats(-5, 5),
    st.integers(0, 4),
)
def test_quadrature_linearity(a, b, k):
    g = Grid(0, 2, 201)
    f = sample(lambda x: np.cos((k + 1) * x) + 2, g)
    h = sample(lambda x: x**k, g)
    lhs = integrate(SampledFn(g, a * f.values + b * h.values))
    rhs = a * integrate(f) + b * integrate(h)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(a * integrate(f)) + abs(b * integrate(h)))


def test_second_derivative_second_order_everywhere():
    errs = []
    for n in (65, 129):
        g = Grid(0, 1, n)
        d2 = second_derivative(sample(lambda x: np.sin(3 * x), g)).values
        errs.append(np.max(np.abs(d2 + 9 * np.sin(3 * g.nodes))))
    assert errs[0] / errs[1] > 3.5
    with pytest.raises(TooFewNodes):
        second_derivative(SampledFn(Grid(0, 1, 3), np.zeros(3)))


def _random_spd(rng, m):
    d = rng.uniform(3, 5, m)
    e = rng.uniform(-1, 1, m - 1)
    return TridiagSystem(d, e, rng.uniform(0.5, 2.0, m))


def test_solve_then_multiply(rng):
    sys = _random_spd(rng, 300)
    rhs = rng.standard_normal(300)
    x = tridiag_solve(sys, rhs)
    assert np.max(np.abs(sys.matvec(x) - rhs)) <= 1e-10 * np.max(np.abs(rhs))
    f = sys.factor()
    np.testing.assert_allclose(f.solve(rhs), x, rtol=1e-14)


def test_singular_system_raises():
    with pytest.raises(SingularPivot):
        TridiagSystem(np.array([1.0, 1.0]), np.array([1.0])).factor()


def test_bad_shapes():
    with pytest.raises(ValueError):
        TridiagSystem(np.ones(3), np.ones(3))
    with pytest.raises(ValueError):
        TridiagSystem(np.ones(3), np.ones(2), np.array([1.0, -1.0, 1.0]))


def test_eigs_against_discrete_laplacian():
    m = 4095
    h = 1.0 / (m + 1)
    sys = TridiagSystem(np.full(m, 2 / h**2), np.full(m - 1, -1 / h**2))
    lam, vecs = tridiag_eigs(sys, 12)
    k = np.arange(1, 13)
    exact = 4 / h**2 * np.sin(k * np.pi * h / 2) ** 2
    # Sturm counts are accurate to a few eps * ||T|| in absolute terms
    np.testing.assert_allclose(lam, exact, rtol=0, atol=8 * np.finfo(float).eps * sys.norm_inf())
    # first significant entry positive
    for v in vecs:
        big = np.abs(v) > 1e-8 * np.abs(v).max()
        assert v[np.argmax(big)] > 0


def test_eigs_generalized_invariants(rng):
    sys = _random_spd(rng, 400)
    lam, vecs = tridiag_eigs(sys, 25)
    assert np.all(np.diff(lam) > 0)
    gram = vecs @ (sys.mass_diag[None, :] * vecs).T
    assert np.max(np.abs(gram - np.eye(25))) <= 1e-8
    for lv, v in zip(lam, vecs):
        Av, Mv = sys.matvec(v), sys.massvec(v)
        r = np.max(np.abs(Av - lv * Mv))
        assert r <= 1e-8 * (abs(lv) * np.max(np.abs(Mv)) + np.max(np.abs(Av)))
    dense = np.diag(sys.diag) + np.diag(sys.off, 1) + np.diag(sys.off, -1)
    minv = 1 / np.sqrt(sys.mass_diag)
    ref = np.linalg.eigvalsh(minv[:, None] * dense * minv[None, :])[:25]
    np.testing.assert_allclose(lam, ref, rtol=1e-11)


def test_eigs_residual_on_large_fd_system():
    from slloc.problem import preset
    from slloc.spectral import direct_system

    sys, _ = direct_system(preset("setup2"), 4097)
    lam, vecs = tridiag_eigs(sys, 10)
    for lv, v in zip(lam, vecs):
        Av, Mv = sys.matvec(v), sys.massvec(v)
        assert np.max(np.abs(Av - lv * Mv)) <= 1e-8 * (abs(lv) * np.max(np.abs(Mv)) + np.max(np.abs(Av)))


def test_eigs_count_checked():
    sys = TridiagSystem(np.full(5, 2.0), np.full(4, -1.0))
    with pytest.raises(ValueError):
        tridiag_eigs(sys, 6)
    with pytest.raises(ValueError):
        tridiag_eigs(sys, 0)
