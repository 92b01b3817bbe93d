"""
Hausdorff Contents
Gauge functions, upper bounds on h-contents of finite point sets by explicit
covers, the integral N_0^h and the Besicovitch bounded-multiplicity cover.

Contents are only ever bounded from above: every value returned here is
Σ h(r_j) of an admissible cover by closed balls of radii <= r.
"""

import math
import numpy as np
from dataclasses import dataclass, field
from scipy.integrate import quad
from scipy.special import gamma
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.geometry.kernel import check_dimension, dhat
from src.utils.errors import CoverError, DomainError
from src.utils.logger import get_logger

logger = get_logger(__name__)

R_MIN = 1e-12
FINEST_LEVEL = 40


def power_gauge_constant(p: float) -> float:
    """c_p = π^{p/2} / Γ(p/2 + 1), the volume of the unit ball of dimension p."""
    if p < 0:
        raise DomainError(f"gauge exponent must be nonnegative, got {p}")
    if p == 0:
        return 1.0
    return float(math.pi ** (p / 2.0) / gamma(p / 2.0 + 1.0))


@dataclass(frozen=True)
class Gauge:
    """
    Nondecreasing gauge h with h(0) = 0.

    kind 'power': h(t) = B * c_p * t^p for t > 0.
    kind 'tabulated': piecewise-linear through (t_k, h_k), constant past the table.
    """
    kind: str
    p: float = 0.0
    B: float = 1.0
    ts: Tuple[float, ...] = ()
    hs: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == 'power':
            if self.p < 0 or self.B < 0:
                raise DomainError(f"power gauge needs p >= 0 and B >= 0, got p={self.p}, B={self.B}")
        elif self.kind == 'tabulated':
            ts = np.asarray(self.ts, dtype=float)
            hs = np.asarray(self.hs, dtype=float)
            if len(ts) < 2 or len(ts) != len(hs):
                raise DomainError("tabulated gauge needs at least two (t, h) pairs of equal length")
            if ts[0] != 0.0 or hs[0] != 0.0:
                raise DomainError("tabulated gauge must start at (0, 0)")
            if np.any(np.diff(ts) <= 0):
                raise DomainError("tabulated gauge radii must be strictly increasing")
            if np.any(np.diff(hs) < 0) or np.any(hs < 0):
                raise DomainError("tabulated gauge values must be nonnegative and nondecreasing")
            object.__setattr__(self, 'ts', tuple(ts.tolist()))
            object.__setattr__(self, 'hs', tuple(hs.tolist()))
        else:
            raise DomainError(f"unknown gauge kind '{self.kind}'")

    @classmethod
    def power(cls, p: float, B: float = 1.0) -> 'Gauge':
        return cls('power', p=float(p), B=float(B))

    @classmethod
    def tabulated(cls, ts: Sequence[float], hs: Sequence[float]) -> 'Gauge':
        return cls('tabulated', ts=tuple(ts), hs=tuple(hs))

    def scaled(self, factor: float) -> 'Gauge':
        if self.kind == 'power':
            return Gauge.power(self.p, self.B * factor)
        return Gauge.tabulated(self.ts, [h * factor for h in self.hs])

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0):
            raise DomainError(f"gauge argument must be nonnegative, got {t!r}")
        if self.kind == 'power':
            out = np.where(arr > 0, self.B * power_gauge_constant(self.p) * np.power(arr, self.p), 0.0)
        else:
            out = np.interp(arr, self.ts, self.hs)
        return float(out) if out.ndim == 0 else out

    def to_json(self) -> Dict[str, Any]:
        if self.kind == 'power':
            return {"type": "power", "p": self.p, "B": self.B}
        return {"type": "tabulated", "t": list(self.ts), "h": list(self.hs)}


@dataclass
class CoverEstimate:
    """Cover by closed balls: (center, radius) pairs, gauge total and overlap multiplicity."""
    balls: List[Tuple[Tuple[float, ...], float]] = field(default_factory=list)
    total_gauge: Optional[float] = 0.0
    multiplicity: int = 0

    def covers(self, points: np.ndarray, rel_tol: float = 1e-12) -> bool:
        points = np.asarray(points, dtype=float)
        if len(points) == 0:
            return True
        if not self.balls:
            return False
        centers = np.array([c for c, _ in self.balls])
        radii = np.array([r for _, r in self.balls])
        dist = np.linalg.norm(points[:, None, :] - centers[None, :, :], axis=2)
        return bool(np.all(np.any(dist <= radii * (1 + rel_tol) + 1e-15, axis=1)))


# ---------------------------------------------------------------------------
# Minimum enclosing ball
# ---------------------------------------------------------------------------

def _circumball(support: List[np.ndarray]) -> Tuple[np.ndarray, float]:
    """Smallest ball with all support points on its boundary."""
    s0 = support[0]
    if len(support) == 1:
        return s0.copy(), 0.0
    V = np.array([s - s0 for s in support[1:]])
    rhs = 0.5 * np.einsum('ij,ij->i', V, V)
    lam, *_ = np.linalg.lstsq(V @ V.T, rhs, rcond=None)
    center = s0 + V.T @ lam
    return center, float(max(np.linalg.norm(s - center) for s in support))


def _inside(center: np.ndarray, radius: float, p: np.ndarray) -> bool:
    return float(np.linalg.norm(p - center)) <= radius * (1 + 1e-12) + 1e-15


def _welzl(points: np.ndarray, count: int, support: List[np.ndarray], d: int):
    """Smallest ball enclosing points[:count] with the support set on its boundary."""
    if support:
        center, radius = _circumball(support)
    else:
        center, radius = None, -1.0
    if len(support) == d + 1:
        return center, radius
    for i in range(count):
        p = points[i]
        if center is None or not _inside(center, radius, p):
            center, radius = _welzl(points, i, support + [p], d)
    return center, radius


def minimum_enclosing_ball(points: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Minimum enclosing ball of a finite point set (Welzl, support-set recursion).

    Points are shuffled with a fixed generator; the returned radius is the
    largest distance from the center to any input point.
    """
    points = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(points) == 0:
        raise DomainError("minimum enclosing ball of an empty set")
    d = points.shape[1]
    shuffled = points[np.random.default_rng(0).permutation(len(points))]
    center, _ = _welzl(shuffled, len(shuffled), [], d)
    radius = float(np.max(np.linalg.norm(points - center, axis=1)))
    return center, radius


# ---------------------------------------------------------------------------
# Content upper bounds
# ---------------------------------------------------------------------------

def _coarsest_level(r: float, d: int) -> int:
    """Smallest k with circumradius sqrt(d)/2 * 2^-k <= r."""
    k = math.ceil(math.log2(math.sqrt(d) / (2.0 * r)))
    while math.sqrt(d) / 2.0 * 2.0 ** (-k) > r:
        k += 1
    return k


def _dyadic_cell(points: np.ndarray, k: int, h: Gauge, r_min: float, finest: int,
                 balls: Optional[List]) -> float:
    d = points.shape[1]
    side = 2.0 ** (-k)
    rho = math.sqrt(d) / 2.0 * side
    whole = h(rho)
    center = (np.floor(points[0] * 2.0 ** k) + 0.5) * side

    if len(points) == 1 or k >= finest:
        singles = len(points) * h(r_min)
        if singles <= whole:
            if balls is not None:
                balls.extend((tuple(p.tolist()), r_min) for p in points)
            return singles
        if balls is not None:
            balls.append((tuple(center.tolist()), rho))
        return whole

    child_balls = [] if balls is not None else None
    split = 0.0
    for child in _partition(points, k + 1):
        split += _dyadic_cell(child, k + 1, h, r_min, finest, child_balls)
        if split > whole and balls is None:
            break
    if split < whole:
        if balls is not None:
            balls.extend(child_balls)
        return split
    if balls is not None:
        balls.append((tuple(center.tolist()), rho))
    return whole


def _partition(points: np.ndarray, k: int) -> List[np.ndarray]:
    keys = np.floor(points * 2.0 ** k).astype(np.int64)
    _, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    return [points[inverse == g] for g in range(int(inverse.max()) + 1)]


def dyadic_cover(S: np.ndarray, h: Gauge, r: float, r_min: float = R_MIN,
                 finest_level: int = FINEST_LEVEL, keep_balls: bool = False) -> CoverEstimate:
    """
    Optimal cover from the dyadic cell hierarchy anchored at the origin.

    Each occupied cell of side 2^-k is covered either by its circumscribed
    ball or by the best covers of its occupied children; a cell holding one
    point is covered by a ball of radius r_min. Only levels whose circumradius
    is <= r are used.
    """
    S = np.unique(np.asarray(S, dtype=float), axis=0) if len(S) else np.zeros((0, 1))
    if r <= 0:
        raise DomainError(f"content radius must be positive, got {r}")
    if len(S) == 0:
        return CoverEstimate([], 0.0, 0)
    d = S.shape[1]
    k0 = _coarsest_level(r, d)
    finest = max(finest_level, k0)
    r_min = min(r_min, r)
    balls = [] if keep_balls else None
    total = sum(_dyadic_cell(cell, k0, h, r_min, finest, balls) for cell in _partition(S, k0))
    return CoverEstimate(balls or [], float(total), 0)


def content_upper_bound(S: np.ndarray, h: Gauge, r: float, r_min: float = R_MIN,
                        finest_level: int = FINEST_LEVEL) -> float:
    """
    Upper bound for the h-content of radius r of a finite set S.

    The smaller of the dyadic cover value and h(MEB radius) when the minimum
    enclosing ball is admissible. Monotone in S and nonincreasing in r.
    """
    S = np.asarray(S, dtype=float)
    if S.size == 0:
        return 0.0
    S = S.reshape(len(S), -1)
    value = dyadic_cover(S, h, r, r_min, finest_level).total_gauge
    _, radius = minimum_enclosing_ball(S)
    radius = max(radius, min(r_min, r))
    if radius <= r:
        value = min(value, h(radius))
    return float(value)


def content_cover(S: np.ndarray, h: Gauge, r: float, r_min: float = R_MIN,
                  finest_level: int = FINEST_LEVEL) -> CoverEstimate:
    """The cover realizing content_upper_bound, with its balls."""
    S = np.asarray(S, dtype=float)
    if S.size == 0:
        return CoverEstimate([], 0.0, 0)
    S = S.reshape(len(S), -1)
    cover = dyadic_cover(S, h, r, r_min, finest_level, keep_balls=True)
    center, radius = minimum_enclosing_ball(S)
    radius = max(radius, min(r_min, r))
    if radius <= r and h(radius) < cover.total_gauge:
        cover = CoverEstimate([(tuple(center.tolist()), radius)], float(h(radius)), 1)
    return cover


# ---------------------------------------------------------------------------
# N_0^h
# ---------------------------------------------------------------------------

def n0h_integral(h: Gauge, r: float, d: int, method: str = 'auto') -> float:
    """
    N_0^h(r) = dhat ∫_0^r h(s) / s^{d-1} ds.

    Power gauges use the closed form B c_p dhat r^q / q with q = p - (d - 2),
    +inf when q <= 0. Tabulated gauges integrate the first segment in closed
    form and the rest with quad; method='quad' forces quadrature for power
    gauges (algebraic-singularity weight at 0).
    """
    d = check_dimension(d)
    if r <= 0:
        raise DomainError(f"radius must be positive, got {r}")
    scale = dhat(d)

    if h.kind == 'power':
        if h.B == 0:
            return 0.0
        q = h.p - (d - 2)
        if q <= 0:
            return math.inf
        coef = h.B * power_gauge_constant(h.p) * scale
        if method == 'quad':
            alpha = h.p - (d - 1)
            value, _ = quad(lambda s: 1.0, 0.0, r, weight='alg', wvar=(alpha, 0.0),
                            epsabs=0.0, epsrel=1e-12)
            return coef * value
        return coef * r ** q / q

    ts = np.asarray(h.ts)
    hs = np.asarray(h.hs)
    t1, h1 = ts[1], hs[1]
    slope = h1 / t1
    # first segment: h(s) = slope * s
    upper = min(r, t1)
    if slope == 0.0:
        first = 0.0
    elif d >= 3:
        return math.inf
    elif d == 2:
        first = slope * upper
    else:
        first = slope * upper ** 2 / 2.0
    if r <= t1:
        return scale * first

    breaks = [t for t in ts[1:] if t < r]
    rest, _ = quad(lambda s: h(s) * s ** (1.0 - d), t1, r, points=breaks[1:] or None,
                   epsabs=0.0, epsrel=1e-12, limit=200)
    return scale * (first + rest)


# ---------------------------------------------------------------------------
# Besicovitch cover
# ---------------------------------------------------------------------------

def _multiplicity(centers: np.ndarray, radii: np.ndarray, probes: np.ndarray) -> int:
    if len(centers) == 0 or len(probes) == 0:
        return 0
    dist = np.linalg.norm(probes[:, None, :] - centers[None, :, :], axis=2)
    return int(np.max(np.sum(dist <= radii * (1 + 1e-9) + 1e-15, axis=1)))


def _pair_circles(centers: np.ndarray, radii: np.ndarray) -> List[Tuple[np.ndarray, np.ndarray, float, int]]:
    """(foot, unit axis, radius, j) of every circle where two bounding spheres meet."""
    out = []
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            v = centers[j] - centers[i]
            s = float(np.linalg.norm(v))
            ri, rj = float(radii[i]), float(radii[j])
            if s == 0.0 or s > (ri + rj) * (1 + 1e-12) or s < abs(ri - rj) * (1 - 1e-12):
                continue
            a = (s * s + ri * ri - rj * rj) / (2.0 * s)
            out.append((centers[i] + v / s * a, v / s, math.sqrt(max(ri * ri - a * a, 0.0)), j))
    return out


def _orthonormal(e: np.ndarray) -> np.ndarray:
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(e)))] = 1.0
    u = np.cross(e, helper)
    return u / np.linalg.norm(u)


def _triple_points(foot: np.ndarray, e: np.ndarray, h: float,
                   centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """Points of the circle (foot, e, h) lying on the spheres ∂B(centers, radii)."""
    t = (centers - foot) @ e
    q = centers - t[:, None] * e
    rho2 = radii ** 2 - t ** 2
    w = q - foot
    s = np.linalg.norm(w, axis=1)
    rho = np.sqrt(np.maximum(rho2, 0.0))
    ok = (rho2 >= 0) & (s > 0) & (s <= (h + rho) * (1 + 1e-12)) & (s >= np.abs(h - rho) * (1 - 1e-12))
    if not np.any(ok):
        return np.zeros((0, 3))
    w, s, rho = w[ok] / s[ok, None], s[ok], rho[ok]
    a = (s ** 2 + h * h - rho ** 2) / (2.0 * s)
    k = np.sqrt(np.maximum(h * h - a ** 2, 0.0))
    perp = np.cross(e, w)
    base = foot + a[:, None] * w
    return np.vstack([base + k[:, None] * perp, base - k[:, None] * perp])


def _arrangement_vertices(centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """
    Points among which a deepest point of a family of closed balls lies.

    The points of maximal depth form an intersection of balls. That convex set
    either contains a center or has a corner where bounding spheres meet:
    interval endpoints in d = 1, crossings of two circles in d = 2, and in
    d = 3 a point of a full intersection circle or a meeting of three spheres.
    """
    d = centers.shape[1]
    pts = [centers]
    if d == 1:
        pts += [centers - radii[:, None], centers + radii[:, None]]
        return np.vstack(pts)
    for foot, e, h, j in _pair_circles(centers, radii):
        if d == 2:
            perp = np.array([-e[1], e[0]])
            pts.append(np.vstack([foot + h * perp, foot - h * perp]))
            continue
        pts.append((foot + h * _orthonormal(e))[None, :])
        if j + 1 < len(centers):
            pts.append(_triple_points(foot, e, h, centers[j + 1:], radii[j + 1:]))
    return np.vstack(pts)


def besicovitch_cover(points: np.ndarray, radii: Sequence[float], d: int,
                      gauge: Optional[Gauge] = None) -> CoverEstimate:
    """
    Largest-radius-first selection of closed balls B(x, t_x) covering the points.

    The next selected ball is the uncovered point of largest radius, ties
    broken by lexicographic point order. Multiplicity is the largest number of
    selected balls containing an input point or a vertex of their arrangement.

    Raises:
        CoverError: If a point stays uncovered or the multiplicity exceeds 5^d
    """
    d = check_dimension(d)
    points = np.asarray(points, dtype=float).reshape(-1, d)
    radii = np.asarray(radii, dtype=float).reshape(-1)
    if len(points) != len(radii):
        raise DomainError(f"{len(points)} points but {len(radii)} radii")
    if len(points) == 0:
        return CoverEstimate([], 0.0 if gauge is not None else None, 0)
    if np.any(radii <= 0):
        raise DomainError("Besicovitch radii must be positive")

    order = np.lexsort(tuple(points.T[::-1]) + (-radii,))
    covered = np.zeros(len(points), dtype=bool)
    selected = []
    for i in order:
        if covered[i]:
            continue
        selected.append(i)
        dist = np.linalg.norm(points - points[i], axis=1)
        covered |= dist <= radii[i]

    if not np.all(covered):
        raise CoverError(f"{int(np.sum(~covered))} points left uncovered")
    centers = points[selected]
    sel_radii = radii[selected]
    probes = np.vstack([points, _arrangement_vertices(centers, sel_radii)])
    mult = _multiplicity(centers, sel_radii, probes)
    if mult > 5 ** d:
        raise CoverError(f"cover multiplicity {mult} exceeds 5^{d}")

    total = float(np.sum(gauge(sel_radii))) if gauge is not None else None
    logger.debug(f"Besicovitch cover: {len(selected)} of {len(points)} balls, multiplicity {mult}")
    return CoverEstimate([(tuple(c.tolist()), float(t)) for c, t in zip(centers, sel_radii)],
                         total, mult)
