"""
Tests for Hausdorff contents
Gauges, content upper bounds from dyadic and enclosing-ball covers, the
integral N_0^h and the Besicovitch cover.
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

from src.potential.hausdorff import (
    Gauge, besicovitch_cover, content_cover, content_upper_bound, dyadic_cover,
    minimum_enclosing_ball, n0h_integral, power_gauge_constant
)
from src.utils.errors import DomainError


def test_power_gauge_constant():
    assert power_gauge_constant(0) == 1.0
    assert power_gauge_constant(1) == pytest.approx(2.0)
    assert power_gauge_constant(2) == pytest.approx(math.pi)
    assert power_gauge_constant(3) == pytest.approx(4.0 * math.pi / 3.0)
    expected = float(mpmath.power(mpmath.pi, 0.75) / mpmath.gamma(1.75))
    assert power_gauge_constant(1.5) == pytest.approx(expected, rel=1e-13)


def test_gauge_evaluation():
    h = Gauge.power(1.0, 2.0)
    assert h(0.0) == 0.0
    assert h(0.5) == pytest.approx(2.0)
    np.testing.assert_allclose(h(np.array([0.25, 1.0])), [1.0, 4.0])
    tab = Gauge.tabulated([0.0, 1.0, 2.0], [0.0, 1.0, 1.5])
    assert tab(0.5) == pytest.approx(0.5)
    assert tab(1.5) == pytest.approx(1.25)
    assert tab(10.0) == pytest.approx(1.5)
    assert tab.scaled(2.0)(1.0) == pytest.approx(2.0)
    assert h.scaled(0.5)(0.5) == pytest.approx(1.0)


def test_gauge_validation():
    with pytest.raises(DomainError):
        Gauge.power(-1.0)
    with pytest.raises(DomainError):
        Gauge.tabulated([0.0, 1.0], [0.0, -1.0])
    with pytest.raises(DomainError):
        Gauge.tabulated([0.0, 1.0, 0.5], [0.0, 1.0, 2.0])
    with pytest.raises(DomainError):
        Gauge.tabulated([0.1, 1.0], [0.0, 1.0])
    with pytest.raises(DomainError):
        Gauge('cubic')
    with pytest.raises(DomainError):
        Gauge.power(1.0)(-0.5)


def test_minimum_enclosing_ball():
    square = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, 0.5]])
    center, radius = minimum_enclosing_ball(square)
    np.testing.assert_allclose(center, [0.5, 0.5], atol=1e-12)
    assert radius == pytest.approx(math.sqrt(0.5))
    center, radius = minimum_enclosing_ball(np.array([[2.0, 3.0]]))
    assert radius == 0.0
    with pytest.raises(DomainError):
        minimum_enclosing_ball(np.zeros((0, 2)))


@pytest.mark.parametrize("d", [1, 2, 3])
def test_minimum_enclosing_ball_contains_points(d):
    rng = np.random.default_rng(30 + d)
    for _ in range(20):
        pts = rng.normal(size=(int(rng.integers(2, 40)), d))
        center, radius = minimum_enclosing_ball(pts)
        assert np.all(np.linalg.norm(pts - center, axis=1) <= radius * (1 + 1e-12))
        # no smaller than half the diameter of the set
        spread = np.max(np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2))
        assert radius >= spread / 2.0 * (1 - 1e-12)


def test_single_point_content():
    h = Gauge.power(1.0)
    assert content_upper_bound(np.array([[0.3, 0.4]]), h, 0.5) == pytest.approx(h(1e-12))
    assert content_upper_bound(np.zeros((0, 2)), h, 0.5) == 0.0


def test_content_of_clustered_points_uses_one_ball():
    h = Gauge.power(1.0)
    S = np.array([[0.0, 0.0], [0.01, 0.0], [0.0, 0.01]])
    value = content_upper_bound(S, h, 0.5)
    _, radius = minimum_enclosing_ball(S)
    assert value <= h(radius) * (1 + 1e-12)


def test_content_cover_covers():
    rng = np.random.default_rng(8)
    S = rng.uniform(-1.0, 1.0, size=(60, 2))
    h = Gauge.power(1.5)
    cover = content_cover(S, h, 0.3)
    assert cover.covers(S)
    assert all(radius <= 0.3 for _, radius in cover.balls)
    assert cover.total_gauge == pytest.approx(content_upper_bound(S, h, 0.3))


def test_dyadic_cover_balls_realize_total():
    rng = np.random.default_rng(9)
    S = rng.uniform(0.0, 1.0, size=(25, 3))
    h = Gauge.power(2.0)
    cover = dyadic_cover(S, h, 0.4, keep_balls=True)
    assert cover.covers(S)
    radii = np.array([r for _, r in cover.balls])
    assert float(np.sum(h(radii))) == pytest.approx(cover.total_gauge)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_content_monotone_in_set_and_radius(d):
    rng = np.random.default_rng(d)
    h = Gauge.power(max(d - 1.5, 0.5))
    for _ in range(20):
        S = rng.uniform(-1.0, 1.0, size=(int(rng.integers(2, 30)), d))
        subset = S[: max(1, len(S) // 2)]
        r = float(rng.uniform(0.05, 1.0))
        full = content_upper_bound(S, h, r)
        assert content_upper_bound(subset, h, r) <= full * (1 + 1e-12)
        assert content_upper_bound(S, h, 2.0 * r) <= full * (1 + 1e-12)


@given(seed=st.integers(min_value=0, max_value=10_000))
@settings(max_examples=50, deadline=None)
def test_content_subadditive(seed):
    rng = np.random.default_rng(seed)
    h = Gauge.power(1.0)
    A = rng.uniform(-1.0, 1.0, size=(8, 2))
    B = rng.uniform(-1.0, 1.0, size=(8, 2))
    r = 0.2
    joint = content_upper_bound(np.vstack([A, B]), h, r)
    assert joint <= (content_upper_bound(A, h, r) + content_upper_bound(B, h, r)) * (1 + 1e-12)


def test_content_rejects_bad_radius():
    with pytest.raises(DomainError):
        content_upper_bound(np.array([[0.0, 0.0]]), Gauge.power(1.0), 0.0)


def test_n0h_closed_forms():
    # d = 2, h(t) = π t^2: N(r) = ∫ π s ds = π r^2 / 2
    assert n0h_integral(Gauge.power(2.0), 1.5, 2) == pytest.approx(math.pi * 1.5 ** 2 / 2.0)
    # d = 3 needs p > 1
    assert n0h_integral(Gauge.power(1.0), 1.0, 3) == math.inf
    assert n0h_integral(Gauge.power(1.0, 0.0), 1.0, 3) == 0.0
    with pytest.raises(DomainError):
        n0h_integral(Gauge.power(1.0), 0.0, 2)


@pytest.mark.parametrize("d,p", [(1, 0.5), (2, 0.5), (2, 1.0), (3, 1.5), (3, 2.5)])
def test_n0h_quadrature_matches_closed_form(d, p):
    h = Gauge.power(p, 1.3)
    closed = n0h_integral(h, 0.8, d)
    assert n0h_integral(h, 0.8, d, method='quad') == pytest.approx(closed, rel=1e-9)


def test_n0h_tabulated_gauge():
    h = Gauge.tabulated([0.0, 0.5, 1.0], [0.0, 1.0, 1.0])
    # d = 1: ∫_0^0.5 2s ds + ∫_0.5^1 1 ds
    assert n0h_integral(h, 1.0, 1) == pytest.approx(0.25 + 0.5)
    # d = 2: ∫_0^0.5 2 ds + ∫_0.5^1 1/s ds
    assert n0h_integral(h, 1.0, 2) == pytest.approx(1.0 + math.log(2.0))
    assert n0h_integral(h, 1.0, 3) == math.inf


@pytest.mark.parametrize("d", [1, 2, 3])
def test_besicovitch_cover_random_instances(d):
    rng = np.random.default_rng(50 + d)
    for _ in range(100):
        n = int(rng.integers(1, 40))
        pts = rng.uniform(-1.0, 1.0, size=(n, d))
        radii = rng.uniform(0.05, 0.6, size=n)
        cover = besicovitch_cover(pts, radii, d, Gauge.power(1.0))
        assert cover.covers(pts)
        assert 1 <= cover.multiplicity <= 5 ** d
        assert len(cover.balls) <= n


def test_besicovitch_cover_largest_first():
    pts = np.array([[0.0, 0.0], [0.1, 0.0], [0.5, 0.0]])
    cover = besicovitch_cover(pts, [0.2, 1.0, 0.1], 2)
    assert cover.balls == [((0.1, 0.0), 1.0)]
    assert cover.total_gauge is None


def test_besicovitch_multiplicity_found_between_the_points():
    # each disc misses the other centers; all three overlap around the centroid
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])
    cover = besicovitch_cover(pts, [0.6] * 3, 2)
    assert len(cover.balls) == 3
    assert cover.multiplicity == 3


def test_besicovitch_multiplicity_at_a_meeting_of_three_spheres():
    pts = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, math.sqrt(3.0) / 2.0, 0.0],
                    [0.5, math.sqrt(3.0) / 6.0, math.sqrt(2.0 / 3.0)]])
    # circumradius of the unit tetrahedron is sqrt(6)/4 < 0.62
    cover = besicovitch_cover(pts, [0.62] * 4, 3)
    assert len(cover.balls) == 4
    assert cover.multiplicity == 4


def test_besicovitch_multiplicity_dominates_grid_depth():
    rng = np.random.default_rng(77)
    pts = rng.uniform(-1.0, 1.0, size=(25, 2))
    radii = rng.uniform(0.1, 0.6, size=25)
    cover = besicovitch_cover(pts, radii, 2)
    centers = np.array([c for c, _ in cover.balls])
    sel = np.array([t for _, t in cover.balls])
    axis = np.linspace(-1.7, 1.7, 241)
    grid = np.stack(np.meshgrid(axis, axis), axis=-1).reshape(-1, 2)
    depth = np.sum(np.linalg.norm(grid[:, None, :] - centers[None, :, :], axis=2) <= sel, axis=1)
    assert cover.multiplicity >= int(np.max(depth))


def test_besicovitch_cover_validation():
    with pytest.raises(DomainError):
        besicovitch_cover(np.zeros((2, 2)), [1.0], 2)
    with pytest.raises(DomainError):
        besicovitch_cover(np.zeros((1, 2)), [0.0], 2)
    assert besicovitch_cover(np.zeros((0, 2)), [], 2).balls == []
