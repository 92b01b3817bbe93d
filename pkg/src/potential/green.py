"""
Green Functions
Green functions, harmonic measure, best harmonic majorants and Green
potentials, with the exact ball and interval formulas and the walk-on-spheres
path for signed-distance domains.

Off the exact paths, g_x^D(y) is evaluated through the representation

    g_x^D(y) = ∫ k(|y - z|) dω_x(z) - k(|y - x|)

where ω_x is the harmonic measure of D at x. Balls integrate it with Poisson
weighted sphere quadrature (the half-width is the change between n and 2n
nodes); signed-distance domains average over walk exits (the half-width is the
standard error, one sigma).
"""

import math
import numpy as np
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Tuple

from src.geometry.kernel import as_point, kernel_k
from src.geometry.domains import (
    Ball, Domain, Interval, NestedPair, diameter, gap, inradius_at
)
from src.geometry.sphere import sphere_quadrature
from src.potential.harnack import HarnackValue, ORACLE_ESTIMATE
from src.potential.riesz import AtomicMeasure, restrict
from src.potential.walk import walk_on_spheres, walk_settings
from src.utils.errors import DomainError, SidednessError
from src.utils.logger import get_logger

logger = get_logger(__name__)

EXACT = 'exact'
QUADRATURE = 'quadrature'
MONTE_CARLO = 'monte_carlo'


@dataclass(frozen=True)
class Estimate:
    """Value with a one-sigma half-width (0 for exact values)."""
    value: float
    half_width: float = 0.0
    kind: str = EXACT

    def band(self, sigma: float = 3.0) -> Tuple[float, float]:
        """[value - sigma * half_width, value + sigma * half_width]."""
        if self.half_width == 0.0:
            return self.value, self.value
        return self.value - sigma * self.half_width, self.value + sigma * self.half_width


@dataclass(frozen=True)
class GreenEstimate(Estimate):
    """Nonnegative Green-type value; clamped records how much was cut at 0."""
    clamped: float = 0.0

    def __post_init__(self):
        if not self.value >= 0:
            raise DomainError(f"Green values are nonnegative, got {self.value}")


@dataclass(frozen=True)
class HarmonicMeasureSample:
    """Discrete harmonic measure: exit points on ∂D with weights summing to 1."""
    exit_points: np.ndarray
    weights: np.ndarray
    seed: int
    eps_shell: float
    kind: str = EXACT

    def __post_init__(self):
        total = float(np.sum(self.weights))
        if not math.isclose(total, 1.0, rel_tol=1e-12):
            raise DomainError(f"harmonic measure weights sum to {total}, not 1")

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values: np.ndarray) -> float:
        return _weighted_mean(values, self.weights)


@dataclass(frozen=True)
class GreenLowerBound:
    """Lower bound on inf over ∂D of g_o^G; degenerate when the Harnack input is +inf."""
    value: float
    R: float
    gap: float
    harnack: float
    degenerate: bool = False


def _weighted_mean(values: np.ndarray, weights: np.ndarray) -> float:
    values = np.asarray(values, dtype=float)
    pos = weights > 0
    if np.any(np.isneginf(values[pos])) and np.any(np.isposinf(values[pos])):
        raise DomainError("integrand takes both infinite values on the sample")
    if np.any(np.isinf(values[pos])):
        return float(values[pos][np.isinf(values[pos])][0])
    return float(np.dot(weights[pos], values[pos]))


# ---------------------------------------------------------------------------
# Exact formulas
# ---------------------------------------------------------------------------

def green_ball_center(r: float, x, y, d: int) -> GreenEstimate:
    """
    Green function of B_x(r) with pole at its center: (k(r) - k(|y - x|))^+.

    Returns +inf at y = x for d >= 2 and 0 outside the closed ball.
    """
    if r <= 0:
        raise DomainError(f"ball radius must be positive, got {r}")
    x = as_point(x, d)
    y = as_point(y, d)
    t = float(np.linalg.norm(y - x))
    value = kernel_k(d, r) - kernel_k(d, t)
    return GreenEstimate(max(value, 0.0))


def _poisson_weights(B: Ball, x: np.ndarray, nodes: np.ndarray, base: np.ndarray) -> np.ndarray:
    r2 = B.radius ** 2
    kernel = (r2 - float(np.sum((x - B.center) ** 2))) / np.linalg.norm(nodes - x, axis=1) ** B.dim
    w = base * kernel
    return w / w.sum()


def _interval_measure(I: Interval, x: float) -> HarmonicMeasureSample:
    a, b = I.a, I.b
    points = np.array([[a], [b]])
    weights = np.array([(b - x) / (b - a), (x - a) / (b - a)])
    return HarmonicMeasureSample(points, weights / weights.sum(), 0, 0.0, EXACT)


def harmonic_measure(D: Domain, x, n: int, seed: int = 0,
                     config: Optional[Dict[str, Any]] = None) -> HarmonicMeasureSample:
    """
    Harmonic measure of D at x.

    Balls: n sphere quadrature nodes with Poisson-kernel weights. Intervals:
    the two endpoint atoms (exact). Signed-distance domains: n walk-on-spheres
    exit points with equal weights.

    Raises:
        DomainError: If x is not inside D
        WalkError: If a walk exceeds the step cap
    """
    x = as_point(x, D.dim)
    if not D.signed_distance(x) < 0:
        raise DomainError(f"point {x.tolist()} is not inside {D!r}")
    if isinstance(D, Ball) and D.dim == 1:
        D = Interval(D.center[0] - D.radius, D.center[0] + D.radius)
    if isinstance(D, Interval):
        return _interval_measure(D, float(x[0]))
    if isinstance(D, Ball):
        nodes, base = sphere_quadrature(D.center, D.radius, n, D.dim)
        return HarmonicMeasureSample(nodes, _poisson_weights(D, x, nodes, base), seed, 0.0, QUADRATURE)

    settings = walk_settings(config or {}, D)
    exits = walk_on_spheres(D, x, n, seed, **settings)
    return HarmonicMeasureSample(exits, np.full(len(exits), 1.0 / len(exits)), seed,
                                 settings['eps_shell'], MONTE_CARLO)


def _integrate(D: Domain, x: np.ndarray, integrand: Callable[[np.ndarray], np.ndarray],
               n: int, seed: int, config: Optional[Dict[str, Any]]) -> Estimate:
    """∫ integrand dω_x with the half-width rule of the domain type."""
    sample = harmonic_measure(D, x, n, seed, config)
    values = integrand(sample.exit_points)
    value = sample.integrate(values)
    if sample.kind == EXACT:
        return Estimate(value, 0.0, EXACT)
    if sample.kind == QUADRATURE:
        finer = harmonic_measure(D, x, 2 * n, seed, config)
        fine_value = finer.integrate(integrand(finer.exit_points))
        if math.isinf(fine_value) or math.isinf(value):
            return Estimate(fine_value, 0.0, QUADRATURE)
        return Estimate(fine_value, abs(fine_value - value), QUADRATURE)
    if math.isinf(value):
        return Estimate(value, 0.0, MONTE_CARLO)
    half_width = float(np.std(values, ddof=1) / math.sqrt(len(values))) if len(values) > 1 else math.inf
    return Estimate(value, half_width, MONTE_CARLO)


def best_harmonic_majorant(u: Any, D: Domain, x, n: int, seed: int = 0,
                           config: Optional[Dict[str, Any]] = None) -> Estimate:
    """
    H_u^D(x) = ∫ u dω_x.

    Args:
        u: Test function (anything with a vectorized evaluate(points))
        D: Domain
        x: Point inside D
        n: Quadrature nodes or walks
        seed: Walk seed

    Returns:
        Estimate; exact on intervals
    """
    x = as_point(x, D.dim)
    return _integrate(D, x, u.evaluate, n, seed, config)


# ---------------------------------------------------------------------------
# Green functions and potentials
# ---------------------------------------------------------------------------

def _is_center(D: Domain, x: np.ndarray) -> bool:
    return isinstance(D, Ball) and bool(np.array_equal(x, D.center))


def _potential(D: Domain, x: np.ndarray, locations: np.ndarray, masses: np.ndarray,
               n: int, seed: int, config: Optional[Dict[str, Any]]) -> GreenEstimate:
    """Σ m_j g_x^D(loc_j) over atoms in closure(D)."""
    d = D.dim
    if len(masses) == 0:
        return GreenEstimate(0.0)
    inside = np.atleast_1d(D.signed_distance(locations)) <= D.eps_geo
    locations, masses = locations[inside], masses[inside]
    if len(masses) == 0:
        return GreenEstimate(0.0)
    dist_x = np.linalg.norm(locations - x, axis=1)
    if d >= 2 and np.any(dist_x == 0.0):
        return GreenEstimate(math.inf)

    if _is_center(D, x):
        terms = np.maximum(kernel_k(d, D.radius) - kernel_k(d, dist_x), 0.0)
        return GreenEstimate(float(np.dot(masses, terms)))

    def integrand(z: np.ndarray) -> np.ndarray:
        dist = np.linalg.norm(z[:, None, :] - locations[None, :, :], axis=2)
        return kernel_k(d, dist) @ masses

    est = _integrate(D, x, integrand, n, seed, config)
    raw = est.value - float(np.dot(masses, kernel_k(d, dist_x)))
    clamped = max(-raw, 0.0)
    if clamped > 0:
        logger.debug(f"Green representation at {x.tolist()} clamped by {clamped:.3e}")
    return GreenEstimate(max(raw, 0.0), est.half_width, est.kind, clamped)


def green_profile(D: Domain, x, points: np.ndarray, n: int, seed: int = 0,
                  config: Optional[Dict[str, Any]] = None) -> List[GreenEstimate]:
    """g_x^D at many points from a single harmonic-measure sample."""
    x = as_point(x, D.dim)
    points = np.asarray(points, dtype=float).reshape(-1, D.dim)
    if not D.signed_distance(x) < 0:
        raise DomainError(f"pole {x.tolist()} is not inside {D!r}")
    d = D.dim
    if _is_center(D, x):
        return [green_ball_center(D.radius, x, p, d) for p in points]

    outside = np.atleast_1d(D.signed_distance(points)) > D.eps_geo
    dist_x = np.linalg.norm(points - x, axis=1)
    sample = harmonic_measure(D, x, n, seed, config)
    finer = harmonic_measure(D, x, 2 * n, seed, config) if sample.kind == QUADRATURE else None

    out = []
    for k, p in enumerate(points):
        if outside[k]:
            out.append(GreenEstimate(0.0))
            continue
        if dist_x[k] == 0.0 and d >= 2:
            out.append(GreenEstimate(math.inf))
            continue
        values = kernel_k(d, np.linalg.norm(sample.exit_points - p, axis=1))
        mean = sample.integrate(values)
        half_width = 0.0
        kind = sample.kind
        if finer is not None:
            fine = finer.integrate(kernel_k(d, np.linalg.norm(finer.exit_points - p, axis=1)))
            half_width = abs(fine - mean) if np.isfinite(fine) and np.isfinite(mean) else 0.0
            mean = fine
        elif sample.kind == MONTE_CARLO and np.all(np.isfinite(values)):
            half_width = float(np.std(values, ddof=1) / math.sqrt(len(values)))
        raw = mean - float(kernel_k(d, dist_x[k]))
        if math.isnan(raw):
            raw = 0.0
        out.append(GreenEstimate(max(raw, 0.0), half_width, kind, max(-raw, 0.0)))
    return out


def green_general(D: Domain, x, y, n: int, seed: int = 0,
                  config: Optional[Dict[str, Any]] = None) -> GreenEstimate:
    """
    g_x^D(y) through the harmonic-measure representation.

    Exact for a ball with pole at its center and on intervals; 0 for y
    outside closure(D). Negative estimates are clamped at 0 and the clamped
    amount is reported.
    """
    return green_profile(D, x, np.atleast_2d(as_point(y, D.dim)), n, seed, config)[0]


def green_potential(D: Domain, x, mu: AtomicMeasure, n: int, seed: int = 0,
                    config: Optional[Dict[str, Any]] = None) -> GreenEstimate:
    """
    Green potential Σ m_j g_x^D(loc_j).

    Atoms outside closure(D) contribute 0; an atom at x gives +inf for d >= 2.
    All atoms share one harmonic-measure sample.
    """
    x = as_point(x, D.dim)
    if not D.signed_distance(x) < 0:
        raise DomainError(f"pole {x.tolist()} is not inside {D!r}")
    return _potential(D, x, mu.locations, mu.masses, n, seed, config)


def green_upper_bound(D: Domain, x, y, diam: Optional[float] = None) -> float:
    """
    k(diam D) - k(|y - x|), an upper bound for g_x^D(y).

    The diameter defaults to its certified upper value (bounding-box diagonal
    for signed-distance domains).
    """
    x = as_point(x, D.dim)
    y = as_point(y, D.dim)
    if diam is None:
        diam = diameter(D).upper
    return kernel_k(D.dim, diam) - kernel_k(D.dim, float(np.linalg.norm(y - x)))


def green_lower_bound_via_harnack(pair: NestedPair, harnack_sup: HarnackValue,
                                  R: Optional[float] = None,
                                  gap_value: Optional[float] = None) -> GreenLowerBound:
    """
    (k(R + đ) - k(R)) / sup_{x ∈ ∂D} dist^{G minus o}(x, ∂B_o(R)).

    R and đ default to inradius_at(D, o) and the lower end of gap(pair).

    Raises:
        SidednessError: If harnack_sup is only an oracle (lower) estimate
    """
    if harnack_sup.kind == ORACLE_ESTIMATE:
        raise SidednessError("the Harnack supremum must be exact or a certified upper bound, "
                             "got an oracle estimate")
    d = pair.dim
    if R is None:
        R = inradius_at(pair.inner, pair.base_point)
    if gap_value is None:
        gap_value = gap(pair).lower
    numerator = kernel_k(d, R + gap_value) - kernel_k(d, R)
    if math.isinf(harnack_sup.value):
        logger.warning("Harnack supremum is +inf; Green lower bound degenerates to 0")
        return GreenLowerBound(0.0, R, gap_value, harnack_sup.value, degenerate=True)
    if not numerator > 0:
        logger.warning(f"certified gap lower end is {gap_value:g}; Green lower bound degenerates to 0")
        return GreenLowerBound(0.0, R, gap_value, harnack_sup.value, degenerate=True)
    return GreenLowerBound(numerator / harnack_sup.value, R, gap_value, harnack_sup.value)


def poisson_jensen_residual(u: Any, D: Domain, x, n: int, seed: int = 0,
                            config: Optional[Dict[str, Any]] = None) -> Estimate:
    """
    u(x) - (H_u^D(x) - ∫ g_x^D dΔ_u) with Δ_u restricted to closure(D).

    H and the potential share one harmonic-measure sample, and the
    representation is used without clamping so the identity is exact in
    expectation.

    Raises:
        DomainError: If x is an atom of Δ_u
    """
    x = as_point(x, D.dim)
    mu = restrict(u.riesz(), D)
    if mu.has_atom_at(x) and D.dim >= 2:
        raise DomainError(f"point {x.tolist()} is an atom of the Riesz measure")
    d = D.dim
    locations, masses = mu.locations, mu.masses
    dist_x = np.linalg.norm(locations - x, axis=1) if len(mu) else np.zeros(0)
    offset = float(np.dot(masses, kernel_k(d, dist_x))) if len(mu) else 0.0

    def integrand(z: np.ndarray) -> np.ndarray:
        harmonic = np.asarray(u.evaluate(z), dtype=float)
        if not len(mu):
            return harmonic
        dist = np.linalg.norm(z[:, None, :] - locations[None, :, :], axis=2)
        return harmonic - kernel_k(d, dist) @ masses

    est = _integrate(D, x, integrand, n, seed, config)
    u_x = float(u.evaluate(x))
    return Estimate(u_x - (est.value + offset), est.half_width, est.kind)
