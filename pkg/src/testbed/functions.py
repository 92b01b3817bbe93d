"""
Test Functions
Subharmonic test functions with exact pointwise values and exactly known
atomic Riesz measures, normalized by a shift so that u(o) = 0.

Kinds:
- log_poly_abs (d = 2): Σ m_a ln|z - a| + Re Σ c_k z^k
- newton_potential (d >= 2): Σ m_j k(|x - p_j|) + <a, x> + b
- convex_pl (d = 1): convex piecewise-linear, given by breakpoints and slopes
- poisson_sum (d >= 2): c + Σ w_i P(x, ζ_i), harmonic inside its ball
"""

import math
import numpy as np
from dataclasses import dataclass
from typing import Any, Dict, Optional

from src.geometry.kernel import as_point, check_dimension, kernel_k
from src.geometry.domains import Ball, Domain, Interval, boundary_sample
from src.geometry.sphere import sphere_cover_grid, sphere_quadrature
from src.potential.riesz import AtomicMeasure
from src.utils.errors import DomainError
from src.utils.logger import get_logger

logger = get_logger(__name__)

KINDS = ('log_poly_abs', 'newton_potential', 'convex_pl', 'poisson_sum')


@dataclass(frozen=True, eq=False)
class TestFunction:
    """A subharmonic function u = raw - shift with its Riesz measure."""
    __test__ = False

    kind: str
    dim: int
    params: Dict[str, Any]
    base_point: Any
    shift: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown test function kind '{self.kind}'")
        d = check_dimension(self.dim)
        if self.kind == 'log_poly_abs' and d != 2:
            raise DomainError("log_poly_abs is defined for d = 2")
        if self.kind == 'convex_pl' and d != 1:
            raise DomainError("convex_pl is defined for d = 1")
        if self.kind in ('newton_potential', 'poisson_sum') and d < 2:
            raise DomainError(f"{self.kind} needs d >= 2")
        object.__setattr__(self, 'base_point', as_point(self.base_point, d))

    # -- evaluation --------------------------------------------------------

    def _points(self, x):
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 2:
            return arr, False
        return as_point(arr, self.dim)[None, :], True

    def raw(self, x):
        """Unshifted value."""
        pts, single = self._points(x)
        with np.errstate(divide='ignore', invalid='ignore'):
            values = getattr(self, f'_raw_{self.kind}')(pts)
        return float(values[0]) if single else values

    def evaluate(self, x):
        """u(x) = raw(x) - shift; -inf exactly at the atoms for d >= 2."""
        return self.raw(x) - self.shift

    def __call__(self, x):
        return self.evaluate(x)

    def _raw_log_poly_abs(self, pts: np.ndarray) -> np.ndarray:
        z = pts[:, 0] + 1j * pts[:, 1]
        out = np.zeros(len(pts))
        for zero in self.params.get('zeros', []):
            a = complex(*zero['loc'])
            out += zero.get('multiplicity', 1) * np.log(np.abs(z - a))
        coeffs = [complex(*c) for c in self.params.get('harmonic', [])]
        if coeffs:
            out += np.real(np.polyval(coeffs[::-1], z))
        return out

    def _raw_newton_potential(self, pts: np.ndarray) -> np.ndarray:
        out = np.zeros(len(pts))
        for atom in self.params.get('atoms', []):
            p = as_point(atom['loc'], self.dim)
            out += atom['mass'] * kernel_k(self.dim, np.linalg.norm(pts - p, axis=1))
        linear = self.params.get('linear')
        if linear is not None:
            out += pts @ as_point(linear, self.dim)
        return out + float(self.params.get('constant', 0.0))

    def _raw_convex_pl(self, pts: np.ndarray) -> np.ndarray:
        t = pts[:, 0]
        breaks = self.params.get('breakpoints', [])
        slopes = self.params['slopes']
        out = float(self.params.get('intercept', 0.0)) + slopes[0] * t
        for b, left, right in zip(breaks, slopes[:-1], slopes[1:]):
            out = out + (right - left) * np.maximum(t - b, 0.0)
        return out

    def _raw_poisson_sum(self, pts: np.ndarray) -> np.ndarray:
        c = as_point(self.params['center'], self.dim)
        rho = float(self.params['radius'])
        out = np.full(len(pts), float(self.params.get('constant', 0.0)))
        inner = rho ** 2 - np.sum((pts - c) ** 2, axis=1)
        for pole in self.params.get('poles', []):
            zeta = as_point(pole['loc'], self.dim)
            out += pole['weight'] * rho ** (self.dim - 2) * inner / np.linalg.norm(pts - zeta, axis=1) ** self.dim
        return out

    # -- Riesz data --------------------------------------------------------

    def riesz(self) -> AtomicMeasure:
        """Exact Riesz measure (empty for poisson_sum inside its ball)."""
        d = self.dim
        if self.kind == 'log_poly_abs':
            atoms = [(z['loc'], float(z.get('multiplicity', 1))) for z in self.params.get('zeros', [])]
        elif self.kind == 'newton_potential':
            atoms = [(a['loc'], float(a['mass'])) for a in self.params.get('atoms', [])]
        elif self.kind == 'convex_pl':
            slopes = self.params['slopes']
            atoms = [(b, (right - left) / 2.0)
                     for b, left, right in zip(self.params.get('breakpoints', []), slopes[:-1], slopes[1:])
                     if right > left]
        else:
            atoms = []
        return AtomicMeasure.from_atoms(atoms, d)

    def subharmonic_on(self, center, r: float) -> bool:
        """True when u is subharmonic on a neighborhood of the closed ball B_center(r)."""
        if self.kind != 'poisson_sum':
            return True
        c = as_point(center, self.dim)
        return all(np.linalg.norm(as_point(p['loc'], self.dim) - c) > r
                   for p in self.params.get('poles', []))

    def lipschitz_on_sphere(self, center, r: float) -> float:
        """Upper bound on |∇u| over the sphere ∂B_center(r); +inf if a singularity lies on it."""
        c = as_point(center, self.dim)
        d = self.dim
        if self.kind == 'convex_pl':
            return float(max(abs(s) for s in self.params['slopes']))
        if self.kind == 'log_poly_abs':
            total = 0.0
            for zero in self.params.get('zeros', []):
                gap = abs(r - float(np.linalg.norm(as_point(zero['loc'], 2) - c)))
                if gap == 0.0:
                    return math.inf
                total += zero.get('multiplicity', 1) / gap
            reach = float(np.linalg.norm(c)) + r
            for k, coeff in enumerate(self.params.get('harmonic', [])):
                if k:
                    total += k * abs(complex(*coeff)) * reach ** (k - 1)
            return total
        if self.kind == 'newton_potential':
            total = 0.0
            for atom in self.params.get('atoms', []):
                gap = abs(r - float(np.linalg.norm(as_point(atom['loc'], d) - c)))
                if gap == 0.0:
                    return math.inf
                total += atom['mass'] * max(1, d - 2) * gap ** (1 - d)
            linear = self.params.get('linear')
            if linear is not None:
                total += float(np.linalg.norm(as_point(linear, d)))
            return total
        # poisson_sum
        pc = as_point(self.params['center'], d)
        rho = float(self.params['radius'])
        reach = float(np.linalg.norm(c - pc)) + r
        spread = rho ** 2 + reach ** 2
        total = 0.0
        for pole in self.params.get('poles', []):
            gap = abs(r - float(np.linalg.norm(as_point(pole['loc'], d) - c)))
            if gap == 0.0:
                return math.inf
            total += pole['weight'] * rho ** (d - 2) * (2 * reach / gap ** d + d * spread / gap ** (d + 1))
        return total

    def to_json(self) -> Dict[str, Any]:
        return {"kind": self.kind, **self.params}

    def __repr__(self):
        return f"TestFunction({self.kind}, d={self.dim}, shift={self.shift:.6g})"


def make_test_function(kind: str, params: Dict[str, Any], d: int, base_point) -> TestFunction:
    """
    Build a test function normalized to u(o) = 0.

    Raises:
        DomainError: If o is a singular point of the raw function
    """
    unshifted = TestFunction(kind, d, dict(params), base_point, 0.0)
    shift = unshifted.raw(unshifted.base_point)
    if not math.isfinite(shift):
        raise DomainError(f"base point {unshifted.base_point.tolist()} is a singular point of {kind}")
    if kind == 'convex_pl':
        slopes = params['slopes']
        if any(b < a for a, b in zip(slopes[:-1], slopes[1:])):
            raise DomainError("convex_pl slopes must be nondecreasing")
        if len(slopes) != len(params.get('breakpoints', [])) + 1:
            raise DomainError("convex_pl needs one more slope than breakpoints")
    if kind == 'poisson_sum' and any(p['weight'] < 0 for p in params.get('poles', [])):
        raise DomainError("poisson_sum weights must be nonnegative")
    if shift != 0.0:
        logger.debug(f"{kind}: shifting by u(o) = {shift:.6g}")
    return TestFunction(kind, d, dict(params), base_point, shift)


def riesz_of(u: TestFunction) -> AtomicMeasure:
    return u.riesz()


# ---------------------------------------------------------------------------
# Boundary suprema and mean values
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundarySup:
    """Sampled supremum of u on a boundary with a certified range [lower, upper]."""
    value: float
    lower: float
    upper: float
    kind: str
    n: int = 0
    notes: Optional[str] = None


def _sphere_sup(u: TestFunction, center: np.ndarray, r: float, n: int):
    pts, delta = sphere_cover_grid(center, r, n, u.dim)
    values = u.evaluate(pts)
    value = float(np.max(values))
    if delta == 0.0:
        return value, value
    L = u.lipschitz_on_sphere(center, r)
    upper = value + L * delta if math.isfinite(value) and math.isfinite(L) else math.inf
    return value, upper


def sup_on_boundary(u: TestFunction, Dm: Domain, n: int, seed: int = 0) -> BoundarySup:
    """
    sup of u over ∂Dm.

    The sampled maximum is a lower estimate, raised to 0 when the base point
    lies in Dm (maximum principle with u(o) = 0). On intervals the value is
    exact. On balls the upper end adds Lipschitz bound times the covering
    radius of the grid; on signed-distance domains it is the supremum over the
    sphere enclosing the bounding box.
    """
    inside = bool(Dm.signed_distance(u.base_point) < 0)
    floor = 0.0 if inside else -math.inf

    if isinstance(Dm, Interval) or (isinstance(Dm, Ball) and Dm.dim == 1):
        lo, hi = (float(v[0]) for v in Dm.bounding_box())
        value = float(max(u.evaluate(lo), u.evaluate(hi)))
        return BoundarySup(value, value, value, 'exact', 2)

    if isinstance(Dm, Ball):
        value, upper = _sphere_sup(u, Dm.center, Dm.radius, n)
        note = None if math.isfinite(upper) else "no Lipschitz bound on the sphere"
        return BoundarySup(value, max(value, floor), max(upper, value, floor), 'lower_estimate', n, note)

    values = u.evaluate(boundary_sample(Dm, n, seed))
    value = float(np.max(values))
    lo, hi = Dm.bounding_box()
    c = (lo + hi) / 2.0
    R = float(np.linalg.norm(hi - lo)) / 2.0
    upper = math.inf
    note = "upper end from the sphere enclosing the bounding box"
    if u.subharmonic_on(c, R):
        _, upper = _sphere_sup(u, c, R, max(n, 64))
    else:
        note = "function is not subharmonic on the enclosing ball"
    return BoundarySup(value, max(value, floor), max(upper, value, floor), 'lower_estimate', n, note)


def sphere_mean(u: TestFunction, center, rho: float, n: int) -> float:
    nodes, weights = sphere_quadrature(center, rho, n, u.dim)
    values = u.evaluate(nodes)
    if np.any(np.isneginf(values)):
        return -math.inf
    return float(np.dot(weights, values))


def submeanvalue_check(u: TestFunction, x, rho: float, n: int, tol: float = 1e-9) -> bool:
    """u(x) <= mean of u over ∂B_x(rho), up to quadrature tolerance."""
    if rho <= 0:
        raise DomainError(f"sphere radius must be positive, got {rho}")
    x = as_point(x, u.dim)
    center_value = float(u.evaluate(x))
    if center_value == -math.inf:
        return True
    mean = sphere_mean(u, x, rho, n)
    if mean == -math.inf:
        return False
    finer = sphere_mean(u, x, rho, 2 * n)
    slack = tol * (1.0 + abs(finer)) + abs(finer - mean)
    return center_value <= max(mean, finer) + slack


def jensen_circle_mean(u: TestFunction, r: float, n: int, center=(0.0, 0.0)) -> float:
    """Mean of u over the circle |z - center| = r (d = 2)."""
    if u.dim != 2:
        raise DomainError("circle means are defined for d = 2")
    return sphere_mean(u, center, r, n)


def function_from_json(data: Dict[str, Any], d: int, base_point) -> TestFunction:
    """Build a test function from its scenario JSON fragment."""
    params = {k: v for k, v in data.items() if k != 'kind'}
    if 'kind' not in data:
        raise DomainError("function needs a 'kind'")
    return make_test_function(data['kind'], params, d, base_point)
