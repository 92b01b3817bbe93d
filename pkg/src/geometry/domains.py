"""
Domains Module
Bounded domains D ⊂ closure(D) ⊂ G of R^d: intervals, balls and
signed-distance domains, with the quantities used throughout the bounds:
R = dist(o, ∂D), đ = dist(D, ∁G) and diam D.

Signed distances are negative inside, zero on the boundary and positive
outside. Catalog shapes return either the exact distance or a function whose
absolute value never exceeds it, so the ball B_p(|sdf(p)|) always lies in the
domain.
"""

import itertools
import networkx as nx
import numpy as np
from dataclasses import dataclass, field
from scipy.spatial.distance import pdist
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

from src.geometry.kernel import check_dimension, as_point
from src.geometry.sphere import sphere_points
from src.utils.errors import DomainError, NestingError
from src.utils.logger import get_logger

logger = get_logger(__name__)

EPS_GEO_ANALYTIC = 1e-9
EPS_GEO_SDF = 1e-6
COVER_CELLS = 20000
COVER_LEVELS = 16
GAP_SLACK = 0.05

SdfFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GeoValue:
    """A geometric quantity together with a certified range [lower, upper]."""
    value: float
    lower: float
    upper: float
    kind: str  # 'exact' | 'lower_estimate' | 'upper_estimate'

    @classmethod
    def exact(cls, value: float) -> 'GeoValue':
        return cls(value, value, value, 'exact')

    @property
    def is_exact(self) -> bool:
        return self.kind == 'exact'


class Domain:
    """Common interface of intervals, balls and signed-distance domains."""

    dim: int = 1
    eps_geo: float = EPS_GEO_ANALYTIC
    analytic: bool = True

    def signed_distance(self, p) -> Any:
        raise NotImplementedError

    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def contains(self, p, closed: bool = False) -> Any:
        """Membership test for one point or an (n, d) array of points."""
        s = self.signed_distance(p)
        if closed:
            return s <= self.eps_geo
        return s < 0

    def _points(self, p) -> Tuple[np.ndarray, bool]:
        arr = np.asarray(p, dtype=float)
        single = arr.ndim <= 1 and not (self.dim == 1 and arr.ndim == 1 and arr.size > 1)
        if single:
            arr = as_point(arr, self.dim)[None, :]
        elif arr.ndim == 1:
            arr = arr[:, None]
        return arr, single


@dataclass(frozen=True, eq=False)
class Ball(Domain):
    """Open ball B_center(radius)."""
    center: Any
    radius: float

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        if self.radius <= 0:
            raise DomainError(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, 'center', center)
        object.__setattr__(self, 'dim', check_dimension(center.size))

    def signed_distance(self, p):
        pts, single = self._points(p)
        s = np.linalg.norm(pts - self.center, axis=1) - self.radius
        return float(s[0]) if single else s

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius})"


@dataclass(frozen=True, eq=False)
class Interval(Domain):
    """Open interval (a, b) of the real line."""
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError(f"interval needs a < b, got ({self.a}, {self.b})")
        object.__setattr__(self, 'dim', 1)

    def signed_distance(self, p):
        pts, single = self._points(p)
        t = pts[:, 0]
        s = np.maximum(self.a - t, t - self.b)
        return float(s[0]) if single else s

    def bounding_box(self):
        return np.array([self.a]), np.array([self.b])

    @property
    def center(self) -> np.ndarray:
        return np.array([(self.a + self.b) / 2.0])

    @property
    def radius(self) -> float:
        return (self.b - self.a) / 2.0

    def __repr__(self):
        return f"Interval({self.a}, {self.b})"


@dataclass(frozen=True, eq=False)
class SdfDomain(Domain):
    """Domain given by a signed-distance function and a bounding box."""
    sdf: SdfFunction
    lo: Any
    hi: Any
    name: str = "sdf"
    params: Dict[str, Any] = field(default_factory=dict)
    exact_distance: bool = True

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape:
            raise DomainError("bounding box corners have different dimensions")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise DomainError(f"bounding box of '{self.name}' is unbounded")
        if np.any(hi <= lo):
            raise DomainError(f"bounding box of '{self.name}' is empty: {lo} .. {hi}")
        object.__setattr__(self, 'lo', lo)
        object.__setattr__(self, 'hi', hi)
        object.__setattr__(self, 'dim', check_dimension(lo.size))
        object.__setattr__(self, 'eps_geo', EPS_GEO_SDF)
        object.__setattr__(self, 'analytic', False)

    def signed_distance(self, p):
        pts, single = self._points(p)
        s = np.asarray(self.sdf(pts), dtype=float)
        return float(s[0]) if single else s

    def bounding_box(self):
        return self.lo.copy(), self.hi.copy()

    def __repr__(self):
        return f"SdfDomain({self.name}, {self.params})"


@dataclass(frozen=True, eq=False)
class PuncturedDomain(Domain):
    """G minus the point o; inside distance min(dist(·, ∂G), |· - o|)."""
    base: Domain
    puncture: Any

    def __post_init__(self):
        o = as_point(self.puncture, self.base.dim)
        object.__setattr__(self, 'puncture', o)
        object.__setattr__(self, 'dim', self.base.dim)
        object.__setattr__(self, 'eps_geo', self.base.eps_geo)
        object.__setattr__(self, 'analytic', self.base.analytic)

    def signed_distance(self, p):
        pts, single = self._points(p)
        s = np.maximum(np.atleast_1d(self.base.signed_distance(pts)),
                       -np.linalg.norm(pts - self.puncture, axis=1))
        return float(s[0]) if single else s

    def bounding_box(self):
        return self.base.bounding_box()

    def __repr__(self):
        return f"PuncturedDomain({self.base!r} minus {self.puncture.tolist()})"


@dataclass(frozen=True, eq=False)
class NestedPair:
    """o ∈ D ⊂ closure(D) ⊂ G."""
    inner: Domain
    outer: Domain
    base_point: Any

    def __post_init__(self):
        if self.inner.dim != self.outer.dim:
            raise NestingError(
                f"inner domain has dimension {self.inner.dim}, outer {self.outer.dim}"
            )
        o = as_point(self.base_point, self.inner.dim)
        object.__setattr__(self, 'base_point', o)
        if not self.inner.contains(o):
            raise NestingError(f"base point {o.tolist()} is not inside {self.inner!r}")

    @property
    def dim(self) -> int:
        return self.inner.dim


# ---------------------------------------------------------------------------
# Signed-distance catalog
# ---------------------------------------------------------------------------

def box_sdf(lo: Sequence[float], hi: Sequence[float]) -> SdfFunction:
    """Exact signed distance of the axis-aligned box [lo, hi]."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    center = (lo + hi) / 2.0
    half = (hi - lo) / 2.0

    def sdf(p):
        q = np.abs(p - center) - half
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=1)
        inside = np.minimum(np.max(q, axis=1), 0.0)
        return outside + inside

    return sdf


def sphere_sdf(center: Sequence[float], radius: float) -> SdfFunction:
    center = np.asarray(center, dtype=float)

    def sdf(p):
        return np.linalg.norm(p - center, axis=1) - radius

    return sdf


def ellipsoid_sdf(center: Sequence[float], axes: Sequence[float]) -> SdfFunction:
    """
    Distance bound for an axis-aligned ellipsoid.

    (|(p - c)/a| - 1) * min(a) never exceeds the true distance in absolute
    value because p -> (p - c)/a is 1/min(a)-Lipschitz.
    """
    center = np.asarray(center, dtype=float)
    axes = np.asarray(axes, dtype=float)
    scale = float(np.min(axes))

    def sdf(p):
        return (np.linalg.norm((p - center) / axes, axis=1) - 1.0) * scale

    return sdf


def union_sdf(*sdfs: SdfFunction) -> SdfFunction:
    """Union of shapes; inside, |min| is a lower bound on the distance."""
    def sdf(p):
        return np.min(np.stack([f(p) for f in sdfs]), axis=0)

    return sdf


def polygon_sdf(vertices: Sequence[Sequence[float]]) -> SdfFunction:
    """Exact signed distance of a simple polygon in the plane."""
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
        raise DomainError("polygon needs at least three planar vertices")

    def sdf(p):
        dist2 = np.full(len(p), np.inf)
        sign = np.ones(len(p))
        for i in range(len(v)):
            vi, vj = v[i], v[i - 1]
            e = vj - vi
            w = p - vi
            t = np.clip((w @ e) / (e @ e), 0.0, 1.0)
            b = w - t[:, None] * e
            dist2 = np.minimum(dist2, np.einsum('ij,ij->i', b, b))
            c1 = p[:, 1] >= vi[1]
            c2 = p[:, 1] < vj[1]
            c3 = e[0] * w[:, 1] > e[1] * w[:, 0]
            flip = (c1 & c2 & c3) | (~c1 & ~c2 & ~c3)
            sign = np.where(flip, -sign, sign)
        return sign * np.sqrt(dist2)

    return sdf


def make_sdf_domain(shape: str, params: Dict[str, Any], d: int) -> SdfDomain:
    """
    Build a catalog signed-distance domain.

    Args:
        shape: 'box' | 'ball' | 'ellipse' (alias 'ellipsoid') | 'union_of_balls' | 'polygon'
        params: Shape parameters (see docs/SCENARIO_SCHEMA.md)
        d: Dimension (2 or 3)

    Returns:
        SdfDomain with a tight bounding box

    Raises:
        DomainError: For unknown shapes or invalid parameters
    """
    d = check_dimension(d)
    if d not in (2, 3):
        raise DomainError(f"signed-distance domains are supported for d in (2, 3), got {d}")

    if shape == 'box':
        lo = as_point(params['lo'], d)
        hi = as_point(params['hi'], d)
        return SdfDomain(box_sdf(lo, hi), lo, hi, name=shape, params=params)
    if shape == 'ball':
        c = as_point(params['center'], d)
        r = float(params['radius'])
        if r <= 0:
            raise DomainError(f"ball radius must be positive, got {r}")
        return SdfDomain(sphere_sdf(c, r), c - r, c + r, name=shape, params=params)
    if shape in ('ellipse', 'ellipsoid'):
        c = as_point(params['center'], d)
        axes = as_point(params['axes'], d)
        if np.any(axes <= 0):
            raise DomainError(f"ellipse axes must be positive, got {axes.tolist()}")
        return SdfDomain(ellipsoid_sdf(c, axes), c - axes, c + axes, name=shape,
                         params=params, exact_distance=False)
    if shape == 'union_of_balls':
        centers = [as_point(c, d) for c in params['centers']]
        radii = [float(r) for r in params['radii']]
        if not centers or len(centers) != len(radii) or min(radii) <= 0:
            raise DomainError("union_of_balls needs matching centers and positive radii")
        lo = np.min([c - r for c, r in zip(centers, radii)], axis=0)
        hi = np.max([c + r for c, r in zip(centers, radii)], axis=0)
        sdf = union_sdf(*[sphere_sdf(c, r) for c, r in zip(centers, radii)])
        return SdfDomain(sdf, lo, hi, name=shape, params=params,
                         exact_distance=len(centers) == 1)
    if shape == 'polygon':
        if d != 2:
            raise DomainError("polygons are planar (d=2)")
        v = np.asarray(params['vertices'], dtype=float)
        return SdfDomain(polygon_sdf(v), v.min(axis=0), v.max(axis=0), name=shape,
                         params=params)
    raise DomainError(
        f"unknown SDF shape '{shape}'; "
        f"choose from box, ball, ellipse, union_of_balls, polygon"
    )


# ---------------------------------------------------------------------------
# Boundary sampling
# ---------------------------------------------------------------------------

def _numeric_gradient(D: Domain, pts: np.ndarray, h: float) -> np.ndarray:
    grad = np.empty_like(pts)
    for k in range(D.dim):
        step = np.zeros(D.dim)
        step[k] = h
        grad[:, k] = (D.signed_distance(pts + step) - D.signed_distance(pts - step)) / (2 * h)
    return grad


def project_to_boundary(D: Domain, points: np.ndarray, eps: Optional[float] = None,
                        max_iter: int = 100, seed: int = 0) -> np.ndarray:
    """
    Newton projection of points onto the zero set of D's signed distance.

    Args:
        D: Domain
        points: (n, d) starting points
        eps: Target |signed_distance| (default: D.eps_geo)
        max_iter: Iteration cap
        seed: Seed for perturbing points where the gradient vanishes

    Returns:
        (n, d) array of points with |signed_distance| <= eps

    Raises:
        DomainError: If some point fails to converge (names its start)
    """
    eps = D.eps_geo if eps is None else eps
    start = np.array(points, dtype=float, copy=True)
    pts = start.copy()
    lo, hi = D.bounding_box()
    h = 1e-7 * max(1.0, float(np.max(hi - lo)))
    rng = np.random.default_rng(seed)

    for _ in range(max_iter):
        f = D.signed_distance(pts)
        active = np.abs(f) > eps
        if not np.any(active):
            return pts
        p = pts[active]
        g = _numeric_gradient(D, p, h)
        g2 = np.einsum('ij,ij->i', g, g)
        flat = g2 < 1e-20
        if np.any(flat):
            p[flat] += 10 * h * rng.standard_normal(p[flat].shape)
        ok = ~flat
        p[ok] -= (f[active][ok] / g2[ok])[:, None] * g[ok]
        pts[active] = p

    f = D.signed_distance(pts)
    bad = np.flatnonzero(np.abs(f) > eps)
    if bad.size:
        i = int(bad[0])
        raise DomainError(
            f"boundary projection did not converge for the point starting at "
            f"{start[i].tolist()} (|sdf| = {abs(f[i]):.3e} after {max_iter} steps)"
        )
    return pts


def boundary_sample(D: Domain, n: int, seed: int = 0, max_iter: int = 100) -> np.ndarray:
    """
    Sample n points on ∂D.

    Intervals return their endpoints (alternating), balls quasi-uniform sphere
    points, signed-distance domains uniform box points projected onto the zero
    set. Deterministic for fixed seed.

    Returns:
        (n, d) array
    """
    if n < 1:
        raise DomainError(f"need at least one boundary sample, got n={n}")
    if isinstance(D, Interval):
        return np.array([[D.a] if k % 2 == 0 else [D.b] for k in range(n)])
    if isinstance(D, Ball):
        return sphere_points(D.center, D.radius, n, D.dim)
    lo, hi = D.bounding_box()
    rng = np.random.default_rng(seed)
    start = lo + (hi - lo) * rng.random((n, D.dim))
    return project_to_boundary(D, start, max_iter=max_iter, seed=seed)


def _box_landmarks(D: Domain) -> np.ndarray:
    """Corners and face centers of the bounding box."""
    lo, hi = D.bounding_box()
    mid = (lo + hi) / 2.0
    pts = [np.array(c) for c in itertools.product(*zip(lo, hi))]
    for k in range(D.dim):
        for end in (lo[k], hi[k]):
            q = mid.copy()
            q[k] = end
            pts.append(q)
    return np.array(pts)


# ---------------------------------------------------------------------------
# Diameter, inradius, gap
# ---------------------------------------------------------------------------

def diameter_upper(D: Domain) -> float:
    """diam D for balls and intervals, the bounding-box diagonal otherwise."""
    if isinstance(D, Interval):
        return D.b - D.a
    if isinstance(D, Ball):
        return 2.0 * D.radius
    lo, hi = D.bounding_box()
    return float(np.linalg.norm(hi - lo))


def diameter(D: Domain, n: int = 2000, seed: int = 0) -> GeoValue:
    """
    Euclidean diameter of D.

    Exact for balls (2r) and intervals (b - a). For signed-distance domains
    the value is the diameter of a boundary sample (a lower estimate) and the
    upper end is the bounding-box diagonal.
    """
    cap = diameter_upper(D)
    if isinstance(D, (Ball, Interval)):
        return GeoValue.exact(cap)
    sample = boundary_sample(D, n, seed)
    try:
        landmarks = project_to_boundary(D, _box_landmarks(D), seed=seed)
        sample = np.vstack([sample, landmarks])
    except DomainError:
        logger.debug(f"bounding-box landmarks of {D!r} did not project; using samples only")
    estimate = float(np.max(pdist(sample))) if len(sample) > 1 else 0.0
    estimate = min(estimate, cap)
    return GeoValue(estimate, estimate, cap, 'lower_estimate')


def inradius_at(D: Domain, o) -> float:
    """
    dist(o, ∂D).

    Exact for balls and intervals; |signed_distance(o)| for signed-distance
    domains (a lower bound when the catalog shape is a distance bound).

    Raises:
        DomainError: If o is not inside D
    """
    o = as_point(o, D.dim)
    s = D.signed_distance(o)
    if not s < 0:
        raise DomainError(f"point {o.tolist()} is not inside {D!r}")
    return float(-s)


def _as_ball(D: Domain) -> Optional[Ball]:
    if isinstance(D, Ball):
        return D
    if isinstance(D, Interval):
        return Ball(D.center, D.radius)
    return None


def boundary_cell_cover(D: Domain, urgency: Callable[[np.ndarray, np.ndarray], np.ndarray],
                        max_cells: int = COVER_CELLS, max_level: int = COVER_LEVELS
                        ) -> Tuple[np.ndarray, np.ndarray]:
    """
    Closed cubes whose union contains ∂D, as (centers, circumradii).

    The bounding box of D is split dyadically. A cube is dropped only when
    |signed_distance(center)| exceeds its circumradius, so no boundary point
    is lost whatever the catalog shape. Cubes with positive urgency are split,
    most urgent first, while the cell budget lasts; the cover is valid at any
    budget and only its resolution depends on it.

    Raises:
        DomainError: If no cube of the bounding box meets ∂D
    """
    lo, hi = D.bounding_box()
    d = D.dim
    root = 0.5 * float(np.max(hi - lo))
    offsets = np.array(list(itertools.product((-0.5, 0.5), repeat=d)))
    centers = (0.5 * (lo + hi))[None, :]
    half = np.array([root])
    while True:
        radii = half * np.sqrt(d)
        keep = np.abs(np.atleast_1d(D.signed_distance(centers))) <= radii + D.eps_geo
        centers, half, radii = centers[keep], half[keep], radii[keep]
        if not len(centers):
            raise DomainError(f"no cell of the bounding box of {D!r} meets its boundary")
        score = np.array(urgency(centers, radii), dtype=float)
        score[half <= root / 2 ** max_level] = -np.inf
        todo = np.flatnonzero(score > 0)
        room = (max_cells - len(centers)) // (2 ** d - 1)
        if not len(todo) or room <= 0:
            return centers, radii
        todo = todo[np.argsort(-score[todo], kind='stable')][:room]
        rest = np.ones(len(centers), dtype=bool)
        rest[todo] = False
        children = centers[todo][:, None, :] + offsets[None, :, :] * half[todo][:, None, None]
        centers = np.vstack([centers[rest], children.reshape(-1, d)])
        half = np.concatenate([half[rest], np.repeat(half[todo] / 2.0, 2 ** d)])


def gap(pair: NestedPair, n: int = 2000, seed: int = 0,
        tol: float = EPS_GEO_ANALYTIC, max_cells: int = COVER_CELLS) -> GeoValue:
    """
    đ = dist(D, ∁G).

    Exact for nested balls and intervals. Otherwise the value is the minimum
    over a boundary sample of D of the distance to ∁G, an upper estimate. The
    lower end comes from a cell cover of ∂D: dist(·, ∁G) is 1-Lipschitz and
    -signed_distance_G never exceeds it inside G, so each cell contributes
    -signed_distance_G(center) - circumradius. Cells whose contribution falls
    short of the sampled value are refined first.

    Raises:
        NestingError: If đ <= tol
    """
    D, G = pair.inner, pair.outer
    bd, bg = _as_ball(D), _as_ball(G)
    if bd is not None and bg is not None:
        value = bg.radius - (float(np.linalg.norm(bd.center - bg.center)) + bd.radius)
        if value <= tol:
            raise NestingError(
                f"closure of {D!r} is not inside {G!r} (dist(D, complement G) = {value:.3g})"
            )
        return GeoValue.exact(value)

    value = float(np.min(-G.signed_distance(boundary_sample(D, n, seed))))
    tol = max(tol, D.eps_geo, G.eps_geo)
    if value <= tol:
        raise NestingError(
            f"closure of {D!r} is not inside {G!r} (sampled dist(D, complement G) = {value:.3g})"
        )

    target = (1.0 - GAP_SLACK) * value

    def cell_bound(centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
        return -np.atleast_1d(G.signed_distance(centers)) - radii

    centers, radii = boundary_cell_cover(D, lambda c, r: target - cell_bound(c, r), max_cells)
    lower = max(float(np.min(cell_bound(centers, radii))) - G.eps_geo, 0.0)
    if lower < target:
        logger.debug(f"gap cover stopped at {len(centers)} cells: lower end {lower:.3g} "
                     f"against sampled {value:.6g}")
    return GeoValue(max(value, lower), lower, max(value, lower), 'upper_estimate')


def check_connected(D: Domain, spacing: float) -> bool:
    """
    Flood-sampling spot check that the inside grid points of D form one component.

    Grid neighbors are joined when both are inside and the segment between
    them stays inside (checked at the midpoint).
    """
    lo, hi = D.bounding_box()
    counts = np.maximum(np.ceil((hi - lo) / spacing).astype(int), 1) + 1
    axes = [np.linspace(l, h, c) for l, h, c in zip(lo, hi, counts)]
    mesh = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1)
    inside = D.contains(mesh.reshape(-1, D.dim)).reshape(mesh.shape[:-1])

    graph = nx.Graph()
    for idx in zip(*np.nonzero(inside)):
        graph.add_node(idx)
        for k in range(D.dim):
            nb = list(idx)
            nb[k] += 1
            nb = tuple(nb)
            if nb[k] < inside.shape[k] and inside[nb]:
                mid = (mesh[idx] + mesh[nb]) / 2.0
                if D.contains(mid):
                    graph.add_edge(idx, nb)
    if graph.number_of_nodes() == 0:
        return False
    return nx.number_connected_components(graph) == 1


def grid_points(D: Domain, per_axis: int, margin: float = 0.0) -> np.ndarray:
    """
    Regular grid over D's bounding box, keeping the points strictly inside D.

    Args:
        D: Domain
        per_axis: Points per axis
        margin: Keep only points at signed distance below -margin

    Returns:
        (m, d) array in lexicographic order
    """
    lo, hi = D.bounding_box()
    axes = [np.linspace(l, h, per_axis) for l, h in zip(lo, hi)]
    mesh = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, D.dim)
    s = D.signed_distance(mesh)
    keep = s < -max(margin, D.eps_geo)
    return mesh[keep]


def lexicographic(points: np.ndarray) -> np.ndarray:
    """Sort rows lexicographically (first coordinate most significant)."""
    if len(points) == 0:
        return points
    order = np.lexsort(points.T[::-1])
    return points[order]


def describe(D: Domain) -> str:
    if isinstance(D, Ball):
        return f"ball(c={np.round(D.center, 6).tolist()}, r={D.radius:g})"
    if isinstance(D, Interval):
        return f"interval({D.a:g}, {D.b:g})"
    return f"sdf:{D.name}"
