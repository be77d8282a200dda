from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regulator_lab.cube_regulator import _toy_integrand, _toy_w_on_ray
from regulator_lab.errors import DomainError, InvalidInterval, NonConvergence, UndersampledPath, ZeroSample
from regulator_lab.numerics import (
    Interval,
    chebyshev_points,
    compactify_ray,
    compactify_ray_derivative,
    fsum_complex,
    integrate_adaptive,
    integrate_pieces,
    richardson_table,
    unwrapped_argument_change,
    winding_number,
)

coeff = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)


def test_constant_integrand():
    res = integrate_adaptive(lambda x: np.ones_like(x), Interval(0.0, 1.0))
    assert abs(res.value - 1.0) < 1e-14


def test_log_endpoint_singularity():
    res = integrate_adaptive(np.log, Interval(0.0, 1.0, lo_singular=True), 1e-13)
    assert abs(res.value + 1.0) < 1e-12


def test_log_singularity_at_upper_endpoint():
    res = integrate_adaptive(lambda x: np.log(1.0 - x), Interval(0.0, 1.0, hi_singular=True), 1e-13)
    assert abs(res.value + 1.0) < 1e-12


def test_both_endpoints_singular():
    f = lambda x: np.log(x) + np.log(1.0 - x)
    res = integrate_adaptive(f, Interval(0.0, 1.0, True, True), 1e-13)
    assert abs(res.value + 2.0) < 1e-12


def test_complex_integrand():
    res = integrate_adaptive(lambda x: np.exp(1j * x), Interval(0.0, math.pi))
    assert abs(res.value - 2j) < 1e-13


def test_invalid_interval():
    with pytest.raises(InvalidInterval):
        Interval(1.0, 0.0)
    with pytest.raises(InvalidInterval):
        Interval(0.0, math.inf)


def test_bad_tolerance():
    with pytest.raises(DomainError):
        integrate_adaptive(np.sin, Interval(0.0, 1.0), 0.0)


def test_panel_budget_exhausted():
    with pytest.raises(NonConvergence):
        integrate_adaptive(lambda x: np.sin(1.0 / x), Interval(1e-6, 1.0), 1e-14, max_panels=20)


@given(st.lists(coeff, min_size=1, max_size=6), st.lists(coeff, min_size=1, max_size=6), coeff, coeff)
@settings(max_examples=60, deadline=None)
def test_linearity(pc, qc, a, b):
    tol = 1e-12
    iv = Interval(-1.0, 2.0)
    f = lambda x: np.polyval(pc, x)
    g = lambda x: np.polyval(qc, x)
    lhs = integrate_adaptive(lambda x: a * f(x) + b * g(x), iv, tol).value
    rhs = a * integrate_adaptive(f, iv, tol).value + b * integrate_adaptive(g, iv, tol).value
    assert abs(lhs - rhs) < 10 * tol * max(1.0, abs(lhs))


@given(st.lists(coeff, min_size=1, max_size=6))
@settings(max_examples=40, deadline=None)
def test_orientation_is_exact(pc):
    f = lambda x: np.polyval(pc, x) * np.exp(x)
    iv = Interval(-0.5, 1.5)
    fwd = integrate_adaptive(f, iv)
    back = integrate_adaptive(f, iv, reverse=True)
    assert back.value == -fwd.value
    assert back.evaluations == fwd.evaluations


def test_refinement_within_error_estimate():
    f = lambda x: np.log(x) * np.cos(3 * x)
    iv = Interval(0.0, 2.0, lo_singular=True)
    coarse = integrate_adaptive(f, iv, 1e-8)
    fine = integrate_adaptive(f, iv, 1e-13, max_panels=20_000)
    assert abs(coarse.value - fine.value) <= coarse.error_estimate + 1e-13


def test_integrate_pieces_sums_intervals():
    res = integrate_pieces(np.exp, [Interval(0.0, 0.5), Interval(0.5, 1.0)])
    assert abs(res.value - (math.e - 1.0)) < 1e-13


def test_fsum_complex_is_exact_on_cancellation():
    assert fsum_complex([1e16 + 1j, 1.0 - 1e16j, -1e16 + 1e16j]) == 1.0 + 1j


def test_compactify_examples():
    assert compactify_ray(0.5) == -1.0
    assert -1e-6 < compactify_ray(1 - 1e-7) < 0
    assert compactify_ray(1e-9) < -1e8
    assert compactify_ray_derivative(0.5) == 4.0


def test_compactify_domain():
    for s in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            compactify_ray(s)


def test_compactify_monotone_on_grid():
    s = np.linspace(1e-3, 1 - 1e-3, 1000)
    z = compactify_ray(s)
    # z increases from -inf to 0 while |z| strictly decreases
    assert np.all(np.diff(z) > 0)
    assert np.all(np.diff(np.abs(z)) < 0)


def test_compactify_derivative_matches_finite_difference():
    s = np.linspace(0.1, 0.9, 9)
    h = 1e-6
    fd = (compactify_ray(s + h) - compactify_ray(s - h)) / (2 * h)
    assert np.allclose(fd, compactify_ray_derivative(s), rtol=1e-7)


def test_winding_examples():
    theta = np.linspace(0.0, 2 * math.pi, 400)
    assert winding_number(np.exp(1j * theta)) == 1
    assert winding_number(np.exp(-1j * theta)) == -1
    assert winding_number(np.exp(2j * theta)) == 2


def test_winding_errors():
    with pytest.raises(ZeroSample):
        winding_number([1.0, 0.0, 1.0])
    with pytest.raises(UndersampledPath):
        winding_number([1.0, -1.0, 1.0])
    with pytest.raises(DomainError):
        winding_number([1.0, 1j])


@given(st.integers(min_value=-3, max_value=3), st.floats(min_value=0.5, max_value=3.0),
       st.floats(min_value=-0.4, max_value=0.4), st.floats(min_value=-0.4, max_value=0.4))
@settings(max_examples=100, deadline=None)
def test_conjugation_flips_winding(k, r, cx, cy):
    theta = np.linspace(0.0, 2 * math.pi, 2000)
    samples = complex(cx, cy) + r * np.exp(1j * k * theta)
    n = winding_number(samples)
    assert winding_number(np.conj(samples)) == -n
    expected = k if r > math.hypot(cx, cy) else 0
    assert n == expected


def test_unwrapped_argument_change_open_path():
    theta = np.linspace(0.0, math.pi / 2, 50)
    assert abs(unwrapped_argument_change(np.exp(1j * theta)) - math.pi / 2) < 1e-14


def test_toy_integrand_against_dense_trapezoid():
    res = integrate_pieces(_toy_integrand, [Interval(0.0, 0.5, lo_singular=True), Interval(0.5, 1.0, hi_singular=True)], 1e-11)
    n = 10 ** 6
    s = (np.arange(n) + 0.5) / n
    dense = float(np.sum(_toy_integrand(s)).real / n)
    assert math.isfinite(res.value.real)
    assert abs(res.value.real - dense) < 1e-6
    assert abs(_toy_w_on_ray(np.array([0.5]))[0]) == pytest.approx(2 ** (-5 / 3), rel=1e-14)


def test_chebyshev_points():
    pts = chebyshev_points(8)
    assert np.all(np.diff(pts) > 0) and 0 < pts[0] and pts[-1] < 1


def test_richardson_removes_linear_and_quadratic_terms():
    steps = [0.1, 0.05, 0.025]
    values = [3.0 + 2 * h - 7 * h * h for h in steps]
    assert abs(richardson_table(values, steps)[-1] - 3.0) < 1e-13
    with pytest.raises(DomainError):
        richardson_table([1.0], [0.1, 0.2])
