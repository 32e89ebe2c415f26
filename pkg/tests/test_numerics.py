import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fittedcd.numerics import KERNEL_SERIES_MAX, SERIES_THRESHOLD, kernel_a, kernel_b, layer_exp, scaled_ratio, sigma

mpmath.mp.dps = 50


def sigma_mp(x):
    x = mpmath.mpf(x)
    if x == 0:
        return mpmath.mpf(1)
    return x / -mpmath.expm1(-x)


def ulps(value):
    return np.spacing(abs(value))


# log-spaced magnitudes over the full working range 1e-300 .. 700
MAGNITUDES = np.concatenate(
    (np.logspace(-300, 0, 3001), np.linspace(1.0, 700.0, 7000), [KERNEL_SERIES_MAX, SERIES_THRESHOLD, np.nextafter(SERIES_THRESHOLD, 0)])
)


def test_sigma_oracle_values():
    assert sigma(1.0) == pytest.approx(1.5819767068693265, rel=1e-15)
    assert sigma(0.0) == 1.0
    assert kernel_a(1.0) == pytest.approx(0.5819767068693265, rel=1e-14)
    assert kernel_b(1.0) == pytest.approx(0.4180232931306735, rel=1e-14)


@pytest.mark.parametrize("x", [-700, -50, -1, -0.3, -1e-2, -1e-5, 1e-12, 1e-3, 0.0099, 0.0101, 0.5, 3, 40, 700])
def test_sigma_matches_high_precision(x):
    ref = float(sigma_mp(x))
    assert abs(sigma(x) - ref) <= 1e-14 * abs(ref)


@given(st.floats(min_value=-700, max_value=700, allow_nan=False))
def test_sigma_relative_accuracy_property(x):
    ref = float(sigma_mp(x))
    assert abs(sigma(x) - ref) <= 1e-14 * abs(ref) + 1e-300


def test_sigma_antisymmetry_identity_over_range():
    for x in MAGNITUDES:
        sp, sm = sigma(x), sigma(-x)
        assert abs((sp - sm) - x) <= 4 * ulps(max(sp, 1.0)), x


def test_kernels_sum_to_one_over_range():
    for rho in MAGNITUDES:
        a, b = kernel_a(rho), kernel_b(rho)
        assert 0.0 < a < 1.0 and 0.0 < b < 1.0
        assert abs(a + b - 1.0) <= 4 * ulps(1.0), rho


def test_kernel_limits():
    assert kernel_a(1e-12) == pytest.approx(0.5, abs=1e-12)
    assert kernel_b(1e-12) == pytest.approx(0.5, abs=1e-12)
    assert kernel_a(700.0) == pytest.approx(1.0 - 1.0 / 700.0, rel=1e-15)
    assert kernel_b(700.0) == pytest.approx(1.0 / 700.0, rel=1e-13)


def test_series_branch_is_continuous():
    for f, switch in ((sigma, SERIES_THRESHOLD), (kernel_a, KERNEL_SERIES_MAX), (kernel_b, KERNEL_SERIES_MAX)):
        below = np.nextafter(switch, 0)
        assert f(below) == pytest.approx(f(switch), rel=1e-13)


@pytest.mark.parametrize("rho", [1e-8, 1e-3, 0.0101, 0.3, 1.0, 1.999, 2.0, 2.5, 50.0, 700.0])
def test_kernels_match_high_precision(rho):
    r = mpmath.mpf(rho)
    ka = float(1 / -mpmath.expm1(-r) - 1 / r)
    kb = float(1 / r - 1 / mpmath.expm1(r))
    assert kernel_a(rho) == pytest.approx(ka, rel=1e-15)
    assert kernel_b(rho) == pytest.approx(kb, rel=1e-15)


@given(st.floats(min_value=-700, max_value=700), st.floats(min_value=-700, max_value=700))
def test_sigma_increasing(x, y):
    if x < y:
        assert sigma(x) <= sigma(y)


def test_sigma_strictly_increasing_on_grid():
    xs = np.linspace(-700, 700, 200_001)
    assert np.all(np.diff(sigma(xs)) > 0)


def test_array_and_scalar_agree():
    xs = np.array([-3.0, -1e-4, 0.0, 1e-4, 3.0])
    np.testing.assert_array_equal(sigma(xs), [sigma(float(x)) for x in xs])
    assert isinstance(sigma(2.0), float)


def test_extreme_arguments_finite():
    xs = np.array([-1e6, -745.0, 745.0, 1e6])
    assert np.all(np.isfinite(sigma(xs)))
    assert sigma(-1e6) == 0.0
    assert np.all(np.isfinite(kernel_a(np.array([1e-300, 1e6])))) and np.all(np.isfinite(kernel_b(np.array([1e-300, 1e6]))))


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_non_finite_rejected(bad):
    with pytest.raises(ValueError):
        sigma(bad)


@pytest.mark.parametrize("rho", [0.0, -1.0])
def test_kernels_need_positive_rho(rho):
    with pytest.raises(ValueError):
        kernel_a(rho)
    with pytest.raises(ValueError):
        kernel_b(rho)


@pytest.mark.parametrize("eps", [1.0, 2.0**-8, 2.0**-20])
def test_layer_functions(eps):
    x = np.linspace(0, 1, 101)
    e = layer_exp(x, 2.0, eps)
    assert e[-1] == 1.0 and np.all((e >= 0) & (e <= 1))
    r = scaled_ratio(x, 3.0, eps)
    assert r[0] == 0.0 and r[-1] == pytest.approx(1.0)
    assert np.all(np.isfinite(r))
    ref = [float(mpmath.exp(-3 * (1 - mpmath.mpf(t)) / eps) * mpmath.expm1(-3 * mpmath.mpf(t) / eps) / mpmath.expm1(-3 / eps)) for t in x[1:-1:10]]
    np.testing.assert_allclose(r[1:-1:10], ref, rtol=1e-13, atol=1e-300)


def test_layer_exp_underflows_cleanly():
    assert layer_exp(0.0, 3.0, 2.0**-20) == 0.0
    assert math.isfinite(scaled_ratio(0.5, 3.0, 2.0**-20))
