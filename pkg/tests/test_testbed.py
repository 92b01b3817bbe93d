"""
Tests for the test-function catalog
Normalization, exact Riesz measures, sub-mean-value behaviour, the circle
mean identity for log|p| and boundary suprema with their certified sides.
"""

import sys
import math
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.geometry.domains import Ball, Interval, make_sdf_domain
from src.potential.riesz import integrated_counting
from src.testbed.functions import (
    TestFunction, function_from_json, jensen_circle_mean, make_test_function, riesz_of,
    sphere_mean, submeanvalue_check, sup_on_boundary
)
from src.utils.errors import DomainError

CATALOG = [
    ('log_poly_abs', {'zeros': [{'loc': [0.5, 0.0], 'multiplicity': 2}, {'loc': [-0.2, 0.7]}],
                      'harmonic': [[1.0, 0.0], [0.2, -0.1]]}, 2, [0.1, 0.1]),
    ('newton_potential', {'atoms': [{'loc': [0.5, 0.0, 0.0], 'mass': 1.5}],
                          'linear': [0.3, 0.0, 0.0], 'constant': 2.0}, 3, [0.0, 0.0, 0.0]),
    ('convex_pl', {'breakpoints': [-0.5, 0.7], 'slopes': [-1.0, 0.5, 2.0], 'intercept': 0.1}, 1, [0.2]),
    ('poisson_sum', {'center': [0.0, 0.0], 'radius': 1.5, 'constant': 0.3,
                     'poles': [{'loc': [1.5, 0.0], 'weight': 2.0}]}, 2, [0.0, 0.0]),
]


@pytest.mark.parametrize("kind,params,d,o", CATALOG)
def test_normalized_at_base_point(kind, params, d, o):
    u = make_test_function(kind, params, d, o)
    assert u.evaluate(o) == pytest.approx(0.0, abs=1e-12)
    again = function_from_json(u.to_json(), d, o)
    assert again.evaluate(o) == pytest.approx(0.0, abs=1e-12)


def test_riesz_measures():
    log_poly = make_test_function(*CATALOG[0])
    mu = riesz_of(log_poly)
    assert mu.total_mass == pytest.approx(3.0)
    assert mu.has_atom_at([0.5, 0.0])

    newton = make_test_function(*CATALOG[1])
    assert newton.riesz().total_mass == pytest.approx(1.5)

    # slope jumps 1.5 and 1.5 give atoms of mass 0.75
    pl = make_test_function(*CATALOG[2])
    mu = pl.riesz()
    np.testing.assert_allclose(sorted(mu.locations[:, 0]), [-0.5, 0.7])
    np.testing.assert_allclose(mu.masses, [0.75, 0.75])

    assert len(make_test_function(*CATALOG[3]).riesz()) == 0


def test_atoms_are_minus_infinity():
    u = make_test_function(*CATALOG[0])
    assert u.evaluate([0.5, 0.0]) == -math.inf
    v = make_test_function(*CATALOG[1])
    assert v.evaluate([0.5, 0.0, 0.0]) == -math.inf


def test_construction_errors():
    with pytest.raises(DomainError):
        make_test_function('log_poly_abs', {'zeros': [{'loc': [0.0, 0.0]}]}, 2, [0.0, 0.0])
    with pytest.raises(DomainError):
        make_test_function('log_poly_abs', {'zeros': []}, 3, [0.0, 0.0, 0.0])
    with pytest.raises(DomainError):
        make_test_function('convex_pl', {'breakpoints': [0.0], 'slopes': [1.0, -1.0]}, 1, [0.5])
    with pytest.raises(DomainError):
        make_test_function('convex_pl', {'breakpoints': [0.0, 1.0], 'slopes': [0.0, 1.0]}, 1, [0.5])
    with pytest.raises(DomainError):
        make_test_function('poisson_sum', {'center': [0.0, 0.0], 'radius': 1.0,
                                           'poles': [{'loc': [1.0, 0.0], 'weight': -1.0}]}, 2, [0.0, 0.0])
    with pytest.raises(DomainError):
        make_test_function('bessel', {}, 2, [0.0, 0.0])
    with pytest.raises(DomainError):
        function_from_json({'zeros': []}, 2, [0.0, 0.0])


@pytest.mark.parametrize("kind,params,d,o", CATALOG[:2] + CATALOG[3:])
def test_submeanvalue_property(kind, params, d, o):
    u = make_test_function(kind, params, d, o)
    rng = np.random.default_rng(17)
    for _ in range(10):
        x = rng.uniform(-0.1, 0.1, size=d)
        assert submeanvalue_check(u, x, 0.3, 1024)


def test_submeanvalue_strict_around_a_zero():
    u = make_test_function(*CATALOG[0])
    # zero at distance 0.1 inside the sphere: mean exceeds u(x) by 2 ln 3
    assert submeanvalue_check(u, [0.4, 0.0], 0.3, 1024)
    x = np.array([0.4, 0.0])
    assert sphere_mean(u, x, 0.3, 1024) - u.evaluate(x) == pytest.approx(2.0 * math.log(3.0), rel=1e-6)


def test_submeanvalue_detects_superharmonic():
    # negative mass makes u strictly superharmonic around the atom
    u = TestFunction('newton_potential', 3, {'atoms': [{'loc': [0.0, 0.0, 0.0], 'mass': -1.0}]},
                     [1.0, 0.0, 0.0], 0.0)
    assert not submeanvalue_check(u, [0.1, 0.0, 0.0], 0.5, 1024)


def test_harmonic_mean_value_property():
    u = make_test_function(*CATALOG[3])
    x = np.array([0.2, -0.3])
    assert sphere_mean(u, x, 0.4, 2048) == pytest.approx(u.evaluate(x), abs=1e-10)


def test_jensen_circle_mean_matches_integrated_counting():
    rng = np.random.default_rng(23)
    for _ in range(20):
        count = int(rng.integers(1, 6))
        moduli = rng.choice(np.concatenate([rng.uniform(0.1, 0.85, 20), rng.uniform(1.15, 2.0, 20)]),
                            size=count)
        angles = rng.uniform(0.0, 2.0 * np.pi, size=count)
        zeros = [{'loc': [m * math.cos(a), m * math.sin(a)], 'multiplicity': int(rng.integers(1, 3))}
                 for m, a in zip(moduli, angles)]
        harmonic = rng.normal(size=(3, 2)).tolist()
        u = make_test_function('log_poly_abs', {'zeros': zeros, 'harmonic': harmonic}, 2, [0.0, 0.0])
        mean = jensen_circle_mean(u, 1.0, 4096)
        assert mean == pytest.approx(integrated_counting(u.riesz(), [0.0, 0.0], 1.0), abs=1e-6)


def test_jensen_circle_mean_needs_plane():
    with pytest.raises(DomainError):
        jensen_circle_mean(make_test_function(*CATALOG[1]), 1.0, 64)


def test_sup_on_interval_is_exact():
    u = make_test_function(*CATALOG[2])
    sup = sup_on_boundary(u, Interval(-1.0, 1.5), 16)
    assert sup.kind == 'exact'
    assert sup.lower == sup.value == sup.upper
    assert sup.value == pytest.approx(max(u.evaluate(-1.0), u.evaluate(1.5)))


def test_sup_on_ball_brackets_true_value():
    direction = [math.cos(0.1), math.sin(0.1)]
    u = make_test_function('newton_potential', {'atoms': [], 'linear': direction}, 2, [0.0, 0.0])
    sup = sup_on_boundary(u, Ball([0.0, 0.0], 1.0), 64)
    assert sup.kind == 'lower_estimate'
    assert sup.lower <= 1.0 + 1e-12
    assert sup.upper >= 1.0


def test_sup_on_sdf_domain_brackets_true_value():
    u = make_test_function('newton_potential', {'atoms': [], 'linear': [1.0, 0.0]}, 2, [0.0, 0.0])
    D = make_sdf_domain('box', {'lo': [-1.0, -1.0], 'hi': [1.0, 1.0]}, 2)
    sup = sup_on_boundary(u, D, 256, seed=2)
    assert sup.lower <= 1.0 + D.eps_geo
    assert sup.upper >= 1.0
    assert sup.value == pytest.approx(1.0, abs=1e-3)


def test_sup_floor_at_zero_when_base_point_inside():
    u = make_test_function('log_poly_abs', {'zeros': [{'loc': [3.0, 0.0]}]}, 2, [0.0, 0.0])
    sup = sup_on_boundary(u, Ball([0.0, 0.0], 1.0), 128)
    assert sup.lower >= 0.0


def test_lipschitz_bound_infinite_on_atom_sphere():
    u = make_test_function(*CATALOG[0])
    assert u.lipschitz_on_sphere([0.0, 0.0], 0.5) == math.inf
    assert math.isfinite(u.lipschitz_on_sphere([0.0, 0.0], 0.3))
