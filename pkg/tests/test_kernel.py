"""
Tests for the kernel module and sphere sampling
Kernel values, sphere areas, the fundamental solution and extended-real
helpers, cross-checked against mpmath.
"""

import sys
import math
from pathlib import Path

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.geometry.kernel import (
    as_point, check_dimension, dhat, ext_add, ext_div, ext_mul, ext_sub,
    fundamental_solution, kernel_difference, kernel_k, sphere_area
)
from src.geometry.sphere import sphere_cover_grid, sphere_points, sphere_quadrature
from src.utils.errors import DomainError, ExtendedArithmeticError

radii = st.floats(min_value=1e-6, max_value=1e6, allow_nan=False, allow_infinity=False)


def test_kernel_values():
    assert kernel_k(2, 1.0) == 0.0
    assert kernel_k(1, 2.5) == 2.5
    assert kernel_k(3, 2.0) == -0.5
    assert kernel_k(1, 0.0) == 0.0
    assert kernel_k(2, 0.0) == -math.inf
    assert kernel_k(3, 0.0) == -math.inf


def test_kernel_d3_matches_mpmath():
    for t in (0.1, 0.5, 1.0, 3.7):
        expected = float(-mpmath.power(mpmath.mpf(t), -1))
        assert kernel_k(3, t) == pytest.approx(expected, rel=1e-15)
    expected = float(-mpmath.power(mpmath.mpf('0.3'), -3))
    assert kernel_k(5, 0.3) == pytest.approx(expected, rel=1e-14)


def test_kernel_rejects_negative_and_nan():
    with pytest.raises(DomainError):
        kernel_k(2, -1.0)
    with pytest.raises(DomainError):
        kernel_k(2, float('nan'))
    with pytest.raises(DomainError):
        kernel_k(2, np.array([1.0, -0.1]))


def test_kernel_vectorized():
    out = kernel_k(2, np.array([1.0, math.e]))
    assert isinstance(out, np.ndarray)
    np.testing.assert_allclose(out, [0.0, 1.0])


@pytest.mark.parametrize("d", [1, 2, 3])
@given(a=radii, b=radii)
@settings(max_examples=300, deadline=None)
def test_kernel_monotone(d, a, b):
    lo, hi = min(a, b), max(a, b)
    assert kernel_k(d, lo) <= kernel_k(d, hi)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_kernel_monotone_random_pairs(d):
    rng = np.random.default_rng(d)
    pairs = np.sort(rng.uniform(0.0, 10.0, size=(10000, 2)), axis=1)
    assert np.all(kernel_k(d, pairs[:, 0]) <= kernel_k(d, pairs[:, 1]))


def test_sphere_area_exact():
    assert sphere_area(1) == 2.0
    assert sphere_area(2) == 2.0 * math.pi
    assert sphere_area(3) == 4.0 * math.pi


@pytest.mark.parametrize("d", [4, 5, 7])
def test_sphere_area_gamma_formula(d):
    expected = float(2 * mpmath.power(mpmath.pi, mpmath.mpf(d) / 2) / mpmath.gamma(mpmath.mpf(d) / 2))
    assert sphere_area(d) == pytest.approx(expected, rel=1e-13)


def test_dhat():
    assert [dhat(d) for d in (1, 2, 3, 4, 5)] == [1, 1, 1, 2, 3]


def test_check_dimension():
    assert check_dimension(3) == 3
    for bad in (0, -1, 1.5, True):
        with pytest.raises(DomainError):
            check_dimension(bad)


def test_as_point_scalar_pads():
    np.testing.assert_array_equal(as_point(0.5, 3), [0.5, 0.0, 0.0])
    with pytest.raises(DomainError):
        as_point([1.0, 2.0], 3)


def test_fundamental_solution():
    assert fundamental_solution(2, [0.0, 0.0], [math.e, 0.0]) == pytest.approx(1.0 / (2.0 * math.pi))
    assert fundamental_solution(3, [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]) == -math.inf
    values = fundamental_solution(1, [0.0], np.array([[1.0], [3.0]]))
    np.testing.assert_allclose(values, [0.5, 1.5])


def test_kernel_difference():
    assert kernel_difference(2, 1.0, 0.0) == math.inf
    assert kernel_difference(1, 2.0, 0.5) == 1.5
    with pytest.raises(DomainError):
        kernel_difference(2, 0.0, 1.0)


def test_extended_arithmetic():
    assert ext_add(math.inf, 1.0) == math.inf
    assert ext_sub(math.inf, -math.inf) == math.inf
    assert ext_mul(0.0, math.inf) == 0.0
    assert ext_div(1.0, math.inf) == 0.0
    with pytest.raises(ExtendedArithmeticError):
        ext_add(math.inf, -math.inf)
    with pytest.raises(ExtendedArithmeticError):
        ext_sub(math.inf, math.inf)
    with pytest.raises(ExtendedArithmeticError):
        ext_div(1.0, 0.0)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_sphere_quadrature_weights(d):
    nodes, weights = sphere_quadrature([0.0] * d, 2.0, 256, d)
    assert weights.sum() == pytest.approx(1.0)
    assert np.all(weights >= 0)
    np.testing.assert_allclose(np.linalg.norm(nodes, axis=1), 2.0)


def test_sphere_quadrature_integrates_quadratic_d3():
    # mean of x^2 over the unit sphere is 1/3
    nodes, weights = sphere_quadrature([0.0, 0.0, 0.0], 1.0, 512, 3)
    assert float(np.dot(weights, nodes[:, 0] ** 2)) == pytest.approx(1.0 / 3.0, rel=1e-10)


@pytest.mark.parametrize("d", [2, 3])
def test_sphere_cover_grid_covers(d):
    pts, delta = sphere_cover_grid(np.zeros(d), 1.0, 200, d)
    probes = sphere_points(np.zeros(d), 1.0, 3000, d)
    chord = np.min(np.linalg.norm(probes[:, None, :] - pts[None, :, :], axis=2), axis=1)
    geodesic = 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))
    assert np.max(geodesic) <= delta + 1e-12


def test_sphere_points_reject_bad_input():
    with pytest.raises(DomainError):
        sphere_points([0.0, 0.0], 0.0, 10, 2)
    with pytest.raises(DomainError):
        sphere_points([0.0, 0.0], 1.0, 0, 2)
