"""
Riesz Measures
Atomic Riesz measures, the radial counting function μ_x^rad, the integrated
counting function N_x^μ and the integration-by-parts identity tying N_x^μ to
the kernel integral ∫ (k(r) - k(|y - x|)) dμ(y).

Balls are closed: an atom at distance exactly t from x counts in μ_x^rad(t).
"""

import math
import numpy as np
from dataclasses import dataclass
from scipy.integrate import quad
from typing import Any, Iterable, Tuple

from src.geometry.kernel import check_dimension, as_point, kernel_k, dhat
from src.geometry.domains import Domain
from src.utils.errors import DomainError


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Finite sum of point masses Σ m_j δ_{loc_j}."""
    locations: Any
    masses: Any
    dim: int

    def __post_init__(self):
        d = check_dimension(self.dim)
        locs = np.asarray(self.locations, dtype=float).reshape(-1, d)
        masses = np.asarray(self.masses, dtype=float).reshape(-1)
        if len(locs) != len(masses):
            raise DomainError(f"{len(locs)} atom locations but {len(masses)} masses")
        if np.any(~np.isfinite(masses)) or np.any(masses <= 0):
            raise DomainError(f"atom masses must be positive and finite, got {masses.tolist()}")
        if np.any(~np.isfinite(locs)):
            raise DomainError("atom locations must be finite")
        object.__setattr__(self, 'locations', locs)
        object.__setattr__(self, 'masses', masses)
        object.__setattr__(self, 'dim', d)

    @classmethod
    def empty(cls, d: int) -> 'AtomicMeasure':
        return cls(np.zeros((0, d)), np.zeros(0), d)

    @classmethod
    def from_atoms(cls, atoms: Iterable[Tuple[Any, float]], d: int) -> 'AtomicMeasure':
        atoms = list(atoms)
        if not atoms:
            return cls.empty(d)
        locs = [as_point(loc, d) for loc, _ in atoms]
        return cls(np.array(locs), [m for _, m in atoms], d)

    def __len__(self) -> int:
        return len(self.masses)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    def distances(self, x) -> np.ndarray:
        """|loc_j - x| for every atom."""
        x = as_point(x, self.dim)
        return np.linalg.norm(self.locations - x, axis=1)

    def has_atom_at(self, x, tol: float = 0.0) -> bool:
        return bool(len(self) and np.min(self.distances(x)) <= tol)

    def to_json(self) -> dict:
        return {"atoms": [{"loc": loc.tolist(), "mass": float(m)}
                          for loc, m in zip(self.locations, self.masses)]}


@dataclass(frozen=True)
class RadialProfile:
    """Right-continuous step function t -> μ(closed ball B_center(t))."""
    center: Tuple[float, ...]
    jump_radii: Tuple[float, ...]
    cumulative_masses: Tuple[float, ...]

    def __call__(self, t: float) -> float:
        if t < 0:
            raise DomainError(f"radius must be nonnegative, got {t}")
        k = int(np.searchsorted(self.jump_radii, t, side='right'))
        return self.cumulative_masses[k - 1] if k else 0.0


def radial_profile(mu: AtomicMeasure, x) -> RadialProfile:
    """Jump radii and cumulative masses of μ_x^rad."""
    dist = mu.distances(x)
    order = np.argsort(dist, kind='stable')
    radii, idx = np.unique(dist[order], return_index=True)
    cumulative = np.cumsum(mu.masses[order])
    # cumulative mass at each distinct radius includes all atoms at that radius
    ends = np.append(idx[1:], len(order)) - 1
    return RadialProfile(
        center=tuple(as_point(x, mu.dim).tolist()),
        jump_radii=tuple(radii.tolist()),
        cumulative_masses=tuple(cumulative[ends].tolist()) if len(order) else (),
    )


def radial_counting(mu: AtomicMeasure, x, t: float) -> float:
    """
    μ_x^rad(t): total mass of atoms in the closed ball of radius t about x.

    Raises:
        DomainError: If t < 0
    """
    if t < 0:
        raise DomainError(f"radius must be nonnegative, got {t}")
    if not len(mu):
        return 0.0
    return float(np.sum(mu.masses[mu.distances(x) <= t]))


def integrated_counting(mu: AtomicMeasure, x, r: float) -> float:
    """
    N_x^μ(r) = dhat ∫_0^r μ_x^rad(t) / t^{d-1} dt in closed form.

    Evaluates Σ_{a_j <= r} m_j (k(r) - k(a_j)), a_j = |loc_j - x|.

    Args:
        mu: Atomic measure
        x: Center
        r: Radius (>= 0)

    Returns:
        Nonnegative extended real; +inf iff d >= 2, r > 0 and an atom sits at x
    """
    if r < 0:
        raise DomainError(f"radius must be nonnegative, got {r}")
    if r == 0 or not len(mu):
        return 0.0
    dist = mu.distances(x)
    inside = dist <= r
    if not np.any(inside):
        return 0.0
    if mu.dim >= 2 and np.any(dist[inside] == 0.0):
        return math.inf
    terms = mu.masses[inside] * (kernel_k(mu.dim, r) - kernel_k(mu.dim, dist[inside]))
    return float(np.sum(terms))


def integrated_counting_quadrature(mu: AtomicMeasure, x, r: float) -> float:
    """
    N_x^μ(r) by adaptive quadrature of its defining integral.

    μ_x^rad is constant between consecutive jump radii, so the integral is
    split at the jumps and each piece integrates t^{1-d} with scipy's quad.
    """
    if r < 0:
        raise DomainError(f"radius must be nonnegative, got {r}")
    if r == 0 or not len(mu):
        return 0.0
    d = mu.dim
    dist = mu.distances(x)
    if d >= 2 and np.any(dist[dist <= r] == 0.0):
        return math.inf

    breaks = [0.0] + sorted(set(float(a) for a in dist if 0.0 < a <= r)) + [r]
    total = 0.0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi <= lo:
            continue
        mass = radial_counting(mu, x, lo)
        if mass == 0.0:
            continue
        value, _ = quad(lambda t: t ** (1.0 - d), lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)
        total += dhat(d) * mass * value
    return total


def prop32_identity_residual(mu: AtomicMeasure, x, r: float) -> float:
    """
    |closed-form N_x^μ(r) - quadrature of the counting integral|.

    Both sides are +inf when an atom sits at x in d >= 2; the residual is then 0.
    """
    if r <= 0:
        raise DomainError(f"radius must be positive, got {r}")
    closed = integrated_counting(mu, x, r)
    numeric = integrated_counting_quadrature(mu, x, r)
    if math.isinf(closed) and math.isinf(numeric):
        return 0.0
    return abs(closed - numeric)


def restrict(mu: AtomicMeasure, D: Domain) -> AtomicMeasure:
    """Restriction of μ to closure(D): atoms with signed distance <= eps_geo."""
    if not len(mu):
        return mu
    keep = np.atleast_1d(D.signed_distance(mu.locations)) <= D.eps_geo
    return AtomicMeasure(mu.locations[keep], mu.masses[keep], mu.dim)
