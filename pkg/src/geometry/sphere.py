"""
Sphere Sampling
Point sets on spheres ∂B_c(r): quasi-uniform samples, normalized quadrature
rules for the surface measure, and grids with a known covering radius.
"""

import math
import numpy as np
from typing import Tuple

from src.geometry.kernel import check_dimension, as_point
from src.utils.errors import DomainError

_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def _unit_sphere_points(n: int, d: int) -> np.ndarray:
    """Quasi-uniform points on the unit sphere of R^d."""
    if d == 1:
        return np.array([[-1.0] if k % 2 == 0 else [1.0] for k in range(n)])
    if d == 2:
        theta = 2.0 * math.pi * np.arange(n) / n
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if d == 3:
        k = np.arange(n) + 0.5
        z = 1.0 - 2.0 * k / n
        rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        phi = _GOLDEN_ANGLE * np.arange(n)
        return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    # Higher dimensions: deterministic normalized Gaussians
    g = np.random.default_rng(0).standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sphere_points(center, r: float, n: int, d: int) -> np.ndarray:
    """
    Quasi-uniform points on ∂B_center(r).

    Args:
        center: Sphere center
        r: Radius (> 0)
        n: Number of points (>= 1)
        d: Dimension

    Returns:
        (n, d) array; in d=1 the two endpoints alternate
    """
    d = check_dimension(d)
    if n < 1:
        raise DomainError(f"need at least one sample point, got n={n}")
    if r <= 0:
        raise DomainError(f"sphere radius must be positive, got {r}")
    return as_point(center, d) + r * _unit_sphere_points(int(n), d)


def sphere_quadrature(center, r: float, n: int, d: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Quadrature rule for the normalized surface measure of ∂B_center(r).

    d=1 uses the two endpoints, d=2 the trapezoidal rule in the angle, d=3 a
    Gauss-Legendre rule in the height times a trapezoidal rule in azimuth.
    Weights are nonnegative and sum to one.

    Returns:
        (nodes, weights) with nodes of shape (m, d)
    """
    d = check_dimension(d)
    c = as_point(center, d)
    if r <= 0:
        raise DomainError(f"sphere radius must be positive, got {r}")

    if d == 1:
        nodes = np.array([[c[0] - r], [c[0] + r]])
        weights = np.array([0.5, 0.5])
    elif d == 2:
        m = max(int(n), 3)
        nodes = sphere_points(c, r, m, 2)
        weights = np.full(m, 1.0 / m)
    elif d == 3:
        n_height = max(2, int(round(math.sqrt(max(n, 8) / 2.0))))
        n_azimuth = 2 * n_height
        z, w = np.polynomial.legendre.leggauss(n_height)
        phi = 2.0 * math.pi * np.arange(n_azimuth) / n_azimuth
        zz, pp = np.meshgrid(z, phi, indexing='ij')
        rho = np.sqrt(1.0 - zz ** 2)
        unit = np.column_stack([(rho * np.cos(pp)).ravel(),
                                (rho * np.sin(pp)).ravel(),
                                zz.ravel()])
        nodes = c + r * unit
        weights = (np.repeat(w, n_azimuth) / 2.0) / n_azimuth
    else:
        m = max(int(n), 1)
        nodes = sphere_points(c, r, m, d)
        weights = np.full(m, 1.0 / m)

    return nodes, weights / weights.sum()


def sphere_cover_grid(center, r: float, n: int, d: int) -> Tuple[np.ndarray, float]:
    """
    Grid on ∂B_center(r) with a certified geodesic covering radius.

    Every point of the sphere lies within the returned geodesic distance of
    some grid point.

    Returns:
        (points, covering_radius)

    Raises:
        DomainError: For d > 3 (no certified grid is provided)
    """
    d = check_dimension(d)
    c = as_point(center, d)
    if r <= 0:
        raise DomainError(f"sphere radius must be positive, got {r}")

    if d == 1:
        return np.array([[c[0] - r], [c[0] + r]]), 0.0
    if d == 2:
        m = max(int(n), 3)
        return sphere_points(c, r, m, 2), math.pi * r / m
    if d == 3:
        n_rows = max(1, int(round(math.sqrt(max(n, 2) / 2.0))))
        n_cols = max(3, int(n) // n_rows)
        theta = (np.arange(n_rows) + 0.5) * math.pi / n_rows
        phi = 2.0 * math.pi * np.arange(n_cols) / n_cols
        tt, pp = np.meshgrid(theta, phi, indexing='ij')
        unit = np.column_stack([(np.sin(tt) * np.cos(pp)).ravel(),
                                (np.sin(tt) * np.sin(pp)).ravel(),
                                np.cos(tt).ravel()])
        # meridian step of half a row plus parallel step of half a column
        covering = r * (math.pi / (2.0 * n_rows) + math.pi / n_cols)
        return c + r * unit, covering
    raise DomainError(f"certified sphere grids are provided for d <= 3, got d={d}")
