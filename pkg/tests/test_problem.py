import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slloc.config import dump_problem, load_problem, problem_from_config
from slloc.errors import (
    BadInterval,
    ConfigError,
    NegativePotential,
    NonFiniteCoefficient,
    NonPositiveCoefficient,
    UnknownPreset,
    ValidationError,
)
from slloc.problem import (
    PRESETS,
    coefficient_from_dict,
    constant,
    make_problem,
    preset,
    problem_from_dict,
    sine_profile,
    tabulated,
    tanh_profile,
)


@pytest.mark.parametrize("name", PRESETS)
def test_presets_satisfy_positivity(name):
    prob = preset(name)
    x = prob.audit_grid()
    assert prob.p(x).min() > 0 and prob.w(x).min() > 0 and prob.q(x).min() >= 0


@pytest.mark.parametrize("name", PRESETS)
def test_preset_round_trip(name):
    prob = preset(name)
    back = problem_from_dict(prob.to_dict())
    x = prob.audit_grid()
    for c in ("p", "q", "w"):
        a, b = getattr(prob, c)(x), getattr(back, c)(x)
        assert np.all(np.abs(a - b) <= 1e-14 * np.maximum(np.abs(a), 1e-300))
    assert back.L == prob.L and back.label == prob.label


def test_preset_shapes():
    assert preset("setup3").L == 5.0
    fig1 = preset("fig1-tanh-metric")
    assert fig1.p(np.array([0.25]))[0] == pytest.approx(1.1)
    assert preset("laplacian-B", 2.5).L == 2.5
    with pytest.raises(UnknownPreset):
        preset("nonsense")
    with pytest.raises(ValueError):
        preset("setup2", length=3)


def test_setup3_profile_scales_with_length():
    s3 = preset("setup3")
    f1 = preset("fig1-tanh-metric")
    np.testing.assert_allclose(s3.p(np.array([1.25, 2.5])), f1.p(np.array([0.25, 0.5])))


@pytest.mark.parametrize(
    "coeff",
    [tanh_profile(40, 10, 1.1), tanh_profile(40, 10, 1.1, length=5), sine_profile(2.0, 0.5, 3.0), constant(2.0)],
)
def test_analytic_derivatives_match_differences(coeff):
    x = np.linspace(0.05, 0.95, 37)
    h = 1e-5
    d1 = (coeff(x + h) - coeff(x - h)) / (2 * h)
    d2 = (coeff(x + h) - 2 * coeff(x) + coeff(x - h)) / h**2
    np.testing.assert_allclose(coeff.d1(x), d1, rtol=1e-6, atol=1e-6)
    np.testing.assert_allclose(coeff.d2(x), d2, rtol=1e-3, atol=1e-2)


def test_tabulated_reproduces_samples_and_slopes():
    x = np.linspace(0, 1, 201)
    c = tabulated(x, 1 + x**2)
    np.testing.assert_allclose(c(x), 1 + x**2, rtol=1e-14)
    assert c.d1(np.array([0.5]))[0] == pytest.approx(1.0, rel=1e-3)
    assert not c.is_analytic
    with pytest.raises(ConfigError):
        tabulated([0, 0, 1], [1, 1, 1])
    with pytest.raises(NonFiniteCoefficient):
        tabulated([0, 1], [1, np.inf])


def test_validation_errors():
    one, zero = constant(1.0), constant(0.0)
    with pytest.raises(BadInterval):
        make_problem(0.0, one, zero, one)
    with pytest.raises(NonPositiveCoefficient):
        make_problem(1.0, sine_profile(0.0), zero, one)
    with pytest.raises(NonPositiveCoefficient):
        make_problem(1.0, one, zero, constant(-1.0))
    with pytest.raises(NegativePotential):
        make_problem(1.0, one, sine_profile(0.5), one)
    with pytest.raises(NonFiniteCoefficient):
        make_problem(1.0, one, zero, _nan_coefficient())


def _nan_coefficient():
    c = constant(1.0)
    return type(c)("preset", lambda x: np.where(x > 0.5, np.nan, 1.0), c.d1, c.d2, {"family": "constant", "value": 1.0})


def test_validation_errors_are_value_errors():
    assert issubclass(BadInterval, ValidationError) and issubclass(BadInterval, ValueError)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 3.0), st.floats(-2, 2), st.floats(0.05, 5))
def test_constructed_problems_are_admissible(amp, shift, L):
    base = amp + 0.01
    prob = make_problem(L, sine_profile(base, amp, 0.7), constant(0.0), tanh_profile(2, shift, 1.01))
    x = prob.audit_grid()
    assert prob.p(x).min() > 0 and prob.w(x).min() > 0


def test_coefficient_dict_forms():
    assert coefficient_from_dict(3)(np.array([0.2]))[0] == 3.0
    c = coefficient_from_dict({"samples": [[0, 1], [1, 2]]})
    assert c(np.array([0.5]))[0] == pytest.approx(1.5)
    with pytest.raises(ConfigError):
        coefficient_from_dict({"family": "tanh", "scale": 1, "shift": 0, "offset": 2, "bogus": 1})
    with pytest.raises(ConfigError):
        coefficient_from_dict({"family": "cosine"})
    with pytest.raises(ConfigError):
        coefficient_from_dict("x")
    with pytest.raises(ConfigError):
        problem_from_dict({"L": 1, "p": 1, "q": 0, "w": 1, "extra": 0})


def test_yaml_round_trip(tmp_path):
    prob = preset("setup2")
    path = tmp_path / "p.yaml"
    dump_problem(prob, path)
    back = load_problem(path)
    x = prob.audit_grid()
    for c in ("p", "q", "w"):
        np.testing.assert_allclose(getattr(back, c)(x), getattr(prob, c)(x), rtol=1e-14)


def test_yaml_named_coefficients(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("label: demo\nL: 1\np: tanh-fig1\nq: sine-2\nw: one\n")
    prob = load_problem(path)
    ref = preset("setup2")
    x = np.linspace(0, 1, 11)
    np.testing.assert_allclose(prob.q(x), ref.q(x))
    assert prob.label == "demo"


@pytest.mark.parametrize(
    "data",
    [
        {"L": 1, "p": 1, "q": 0, "w": 1, "colour": "red"},
        {"L": 1, "p": 1, "q": 0},
        {"L": "x", "p": 1, "q": 0, "w": 1},
        {"L": 1, "p": "no-such-coefficient", "q": 0, "w": 1},
        [1, 2],
    ],
)
def test_config_rejects_bad_input(data):
    with pytest.raises(ConfigError):
        problem_from_config(data)


def test_config_rejects_invalid_yaml(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("L: [1,\n")
    with pytest.raises(ConfigError):
        load_problem(path)
