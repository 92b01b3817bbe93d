"""
Harnack Distance
Exact Harnack distances on balls (center pole) and intervals, the
Poisson-kernel oracle on balls, and certified upper bounds on general and
punctured domains built from chains of inscribed balls.

A chain x = a_0, a_1, ..., a_k = y whose consecutive nodes share an inscribed
ball B ⊂ Dm bounds dist^Dm(x, y) by the product of the ball distances
(triangle inequality plus subordination dist^Dm <= dist^B). Edge weights are
logs of the exact center-pole ball value, over-rounded by (1 + eps_chain);
the bound is exp of the shortest path length.
"""

import math
import networkx as nx
import numpy as np
from dataclasses import dataclass
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree
from typing import Any, Dict, List, Optional, Sequence

from src.geometry.kernel import as_point
from src.geometry.domains import (
    Ball, Domain, Interval, NestedPair, PuncturedDomain,
    boundary_cell_cover, lexicographic
)
from src.geometry.sphere import sphere_points, sphere_cover_grid
from src.utils.errors import DomainError
from src.utils.logger import get_logger

logger = get_logger(__name__)

EXACT = 'exact'
UPPER_BOUND = 'upper_bound'
ORACLE_ESTIMATE = 'oracle_estimate'
PUNCTURED_CELLS = 4096
CELL_ROOM = 0.25


@dataclass(frozen=True)
class HarnackValue:
    """Harnack distance value (>= 1) with the side it is certified from."""
    value: float
    kind: str
    diagnostic: Optional[str] = None

    def __post_init__(self):
        if self.kind not in (EXACT, UPPER_BOUND, ORACLE_ESTIMATE):
            raise ValueError(f"unknown Harnack value kind '{self.kind}'")
        if math.isnan(self.value) or self.value < 1.0 - 1e-12:
            raise DomainError(f"Harnack distances are >= 1, got {self.value}")
        object.__setattr__(self, 'value', max(1.0, float(self.value)))

    @property
    def lower(self) -> float:
        """Certified lower end: the value itself unless only an upper bound is known."""
        return 1.0 if self.kind == UPPER_BOUND else self.value

    @property
    def upper(self) -> float:
        """Certified upper end: +inf for oracle estimates."""
        return math.inf if self.kind == ORACLE_ESTIMATE else self.value


@dataclass(frozen=True)
class ChainSettings:
    """Numerical settings of chain graphs and the ball oracle."""
    mesh: float = 0.1
    max_edge_length: float = 0.35
    eps_chain: float = 1e-6
    oracle_samples: int = 4096
    n_boundary: int = 48
    n_sphere: int = 48

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> 'ChainSettings':
        h = config.get('harnack', {})
        return cls(
            mesh=float(h.get('mesh', cls.mesh)),
            max_edge_length=float(h.get('max_edge_length', cls.max_edge_length)),
            eps_chain=float(h.get('eps_chain', cls.eps_chain)),
            oracle_samples=int(h.get('oracle_samples', cls.oracle_samples)),
            n_boundary=int(h.get('n_boundary', cls.n_boundary)),
            n_sphere=int(h.get('n_sphere', cls.n_sphere)),
        )


def _center_form(r, s, d: int):
    """
    Harnack distance between the center of B(r) and a point at distance s < r.

    Maximum of the two directional Poisson-ratio suprema; the first term
    dominates for d >= 2, the second for d = 1.
    """
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    toward = (r + s) * r ** (d - 2.0) / (r - s) ** (d - 1.0)
    away = (r + s) ** (d - 1.0) / (r ** (d - 2.0) * (r - s))
    return np.maximum(toward, away)


def ball_center_distance(B: Ball, x) -> HarnackValue:
    """
    Exact Harnack distance between the center of B and x.

    Returns:
        (r + s) r^{d-2} / (r - s)^{d-1} with s = |x - center| for d >= 2;
        r / (r - s) for d = 1

    Raises:
        DomainError: If x is not inside B
    """
    x = as_point(x, B.dim)
    s = float(np.linalg.norm(x - B.center))
    if s >= B.radius:
        raise DomainError(f"point {x.tolist()} is not inside {B!r}")
    return HarnackValue(float(_center_form(B.radius, s, B.dim)), EXACT)


def _log_poisson_ratio(B: Ball, x: np.ndarray, y: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """log P(x, ζ) - log P(y, ζ) for the Poisson kernel of B."""
    d = B.dim
    r2 = B.radius ** 2
    sx = r2 - float(np.sum((x - B.center) ** 2))
    sy = r2 - float(np.sum((y - B.center) ** 2))
    return (math.log(sx) - math.log(sy)
            + d * (np.log(np.linalg.norm(y - zeta, axis=-1))
                   - np.log(np.linalg.norm(x - zeta, axis=-1))))


def _plane_basis(B: Ball, x: np.ndarray, y: np.ndarray):
    """Orthonormal pair spanning a plane through the center containing x and y."""
    vectors = [v for v in (x - B.center, y - B.center) if np.linalg.norm(v) > 1e-14]
    basis: List[np.ndarray] = []
    for v in vectors + list(np.eye(B.dim)):
        w = v - sum((v @ e) * e for e in basis)
        norm = np.linalg.norm(w)
        if norm > 1e-10:
            basis.append(w / norm)
        if len(basis) == 2:
            break
    return basis


def _great_circle_max(B: Ball, x, y, sign: float, n_grid: int = 2048) -> float:
    """Maximum of sign * log P(x,·)/P(y,·) over the great circle through x and y."""
    e1, e2 = _plane_basis(B, x, y)

    def f(theta):
        zeta = B.center + B.radius * (np.cos(theta)[..., None] * e1 + np.sin(theta)[..., None] * e2)
        return sign * _log_poisson_ratio(B, x, y, zeta)

    theta = 2.0 * math.pi * np.arange(n_grid) / n_grid
    values = f(theta)
    k = int(np.argmax(values))
    step = 2.0 * math.pi / n_grid
    res = minimize_scalar(lambda t: -float(f(np.array(t))), bounds=(theta[k] - step, theta[k] + step),
                          method='bounded', options={'xatol': 1e-12})
    return max(float(values[k]), -float(res.fun))


def ball_pair_oracle(B: Ball, x, y, n_boundary: int = 4096, refine: bool = False) -> HarnackValue:
    """
    Harnack distance on a ball by extremizing Poisson-kernel ratios.

    max(sup P(x,ζ)/P(y,ζ), sup P(y,ζ)/P(x,ζ)) over n_boundary sphere samples.
    With refine=True the maximum along the great circle through x and y (where
    the supremum lives) is added. Either way the value is attained at boundary
    points, so it is a lower estimate of the true distance.
    """
    x = as_point(x, B.dim)
    y = as_point(y, B.dim)
    for p in (x, y):
        if np.linalg.norm(p - B.center) >= B.radius:
            raise DomainError(f"point {p.tolist()} is not inside {B!r}")
    if np.array_equal(x, y):
        return HarnackValue(1.0, ORACLE_ESTIMATE)

    zeta = sphere_points(B.center, B.radius, max(int(n_boundary), 2), B.dim)
    ratio = _log_poisson_ratio(B, x, y, zeta)
    best = max(float(np.max(ratio)), float(np.max(-ratio)))
    if refine and B.dim >= 2:
        best = max(best, _great_circle_max(B, x, y, 1.0), _great_circle_max(B, x, y, -1.0))
    return HarnackValue(math.exp(best), ORACLE_ESTIMATE)


def interval_distance(I: Interval, x: float, y: float) -> HarnackValue:
    """
    Exact Harnack distance on (a, b).

    Positive harmonic functions on an interval are positive affine functions;
    the extremal ratios come from h(t) = t - a and h(t) = b - t.

    Raises:
        DomainError: If x or y is not strictly inside (a, b)
    """
    x = float(as_point(x, 1)[0])
    y = float(as_point(y, 1)[0])
    for t in (x, y):
        if not I.a < t < I.b:
            raise DomainError(f"point {t} is not inside {I!r}")
    a, b = I.a, I.b
    value = max((x - a) / (y - a), (y - a) / (x - a), (b - x) / (b - y), (b - y) / (b - x))
    return HarnackValue(value, EXACT)


# ---------------------------------------------------------------------------
# Chain graphs
# ---------------------------------------------------------------------------

@dataclass
class ChainGraph:
    """Inscribed-ball chain graph over grid nodes plus extra points."""
    nodes: np.ndarray
    radii: np.ndarray
    graph: nx.Graph
    mesh: float
    extra_index: List[int]


def _grid_nodes(Dm: Domain, mesh: float) -> np.ndarray:
    lo, hi = Dm.bounding_box()
    counts = np.floor((hi - lo) / mesh + 1e-9).astype(int) + 1
    axes = [lo[k] + mesh * np.arange(counts[k]) for k in range(Dm.dim)]
    grid = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, Dm.dim)
    return grid


def build_chain_graph(Dm: Domain, mesh: float, extra_points: Sequence = (),
                      max_edge_length: float = 0.35, eps_chain: float = 1e-6) -> ChainGraph:
    """
    Build the chain graph of Dm.

    Nodes are the grid points lo + k * mesh strictly inside Dm, then the extra
    points. Two nodes a, b are joined when |a - b| <= max_edge_length and one
    lies in the other's inscribed ball; the weight is the log of the smaller
    center-pole ball distance times (1 + eps_chain). The edge rule depends only
    on the two endpoints, so adding nodes never removes a path.

    Raises:
        DomainError: If an extra point is not inside Dm
    """
    if mesh <= 0:
        raise DomainError(f"mesh must be positive, got {mesh}")
    grid = _grid_nodes(Dm, mesh)
    rho_grid = -np.atleast_1d(Dm.signed_distance(grid))
    grid = lexicographic(grid[rho_grid > 0])

    extras = np.asarray(extra_points, dtype=float).reshape(-1, Dm.dim)
    rho_extra = -np.atleast_1d(Dm.signed_distance(extras)) if len(extras) else np.zeros(0)
    bad = np.flatnonzero(rho_extra <= 0)
    if bad.size:
        raise DomainError(f"point {extras[bad[0]].tolist()} is not inside {Dm!r}")

    nodes = np.vstack([grid, extras]) if len(extras) else grid
    radii = -np.atleast_1d(Dm.signed_distance(nodes))
    extra_index = list(range(len(grid), len(nodes)))

    graph = nx.Graph()
    graph.add_nodes_from(range(len(nodes)))
    if len(nodes) > 1:
        pairs = cKDTree(nodes).query_pairs(r=max_edge_length, output_type='ndarray')
        if len(pairs):
            pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
            i, j = pairs[:, 0], pairs[:, 1]
            s = np.linalg.norm(nodes[i] - nodes[j], axis=1)
            ri, rj = radii[i], radii[j]
            with np.errstate(divide='ignore', invalid='ignore'):
                vi = np.where(s < ri, _center_form(ri, np.minimum(s, ri), Dm.dim), np.inf)
                vj = np.where(s < rj, _center_form(rj, np.minimum(s, rj), Dm.dim), np.inf)
            v = np.minimum(vi, vj)
            ok = np.isfinite(v)
            weights = np.log(v[ok]) + math.log1p(eps_chain)
            graph.add_weighted_edges_from(zip(i[ok].tolist(), j[ok].tolist(), weights.tolist()))

    logger.debug(f"chain graph: {len(nodes)} nodes, {graph.number_of_edges()} edges, mesh {mesh}")
    return ChainGraph(nodes, radii, graph, mesh, extra_index)


def chain_upper_bound(Dm: Domain, x, y, mesh: float, max_edge_length: float = 0.35,
                      eps_chain: float = 1e-6) -> HarnackValue:
    """
    Certified upper bound on dist^Dm(x, y) by a shortest inscribed-ball chain.

    Returns:
        HarnackValue of kind upper_bound; +inf with a diagnostic when no chain
        connects x and y
    """
    x = as_point(x, Dm.dim)
    y = as_point(y, Dm.dim)
    if np.array_equal(x, y):
        return HarnackValue(1.0, UPPER_BOUND)
    chain = build_chain_graph(Dm, mesh, [x, y], max_edge_length, eps_chain)
    ix, iy = chain.extra_index
    try:
        length = nx.dijkstra_path_length(chain.graph, ix, iy, weight='weight')
    except nx.NetworkXNoPath:
        return HarnackValue(math.inf, UPPER_BOUND,
                            f"no chain joins {x.tolist()} and {y.tolist()} at mesh {mesh}")
    return HarnackValue(math.exp(length), UPPER_BOUND)


def chain_distances(Dm: Domain, source, points: np.ndarray, mesh: float,
                    max_edge_length: float = 0.35, eps_chain: float = 1e-6) -> List[HarnackValue]:
    """Chain upper bounds from one source to many points (one shortest-path run)."""
    source = as_point(source, Dm.dim)
    points = np.asarray(points, dtype=float).reshape(-1, Dm.dim)
    chain = build_chain_graph(Dm, mesh, np.vstack([source[None, :], points]),
                              max_edge_length, eps_chain)
    src = chain.extra_index[0]
    lengths = nx.single_source_dijkstra_path_length(chain.graph, src, weight='weight')
    out = []
    for k, idx in enumerate(chain.extra_index[1:]):
        if np.array_equal(points[k], source):
            out.append(HarnackValue(1.0, UPPER_BOUND))
        elif idx in lengths:
            out.append(HarnackValue(math.exp(lengths[idx]), UPPER_BOUND))
        else:
            out.append(HarnackValue(math.inf, UPPER_BOUND,
                                    f"no chain reaches {points[k].tolist()} at mesh {mesh}"))
    return out


def distance_to_set(Dm: Domain, x, targets: np.ndarray, mesh: float,
                    max_edge_length: float = 0.35, eps_chain: float = 1e-6) -> HarnackValue:
    """Upper bound on inf over targets y of dist^Dm(x, y) (multi-source shortest path)."""
    values = _set_distances(Dm, np.atleast_2d(as_point(x, Dm.dim)), targets, mesh,
                            max_edge_length, eps_chain)
    return values[0]


def _set_distances(Dm: Domain, xs: np.ndarray, targets: np.ndarray, mesh: float,
                   max_edge_length: float, eps_chain: float) -> List[HarnackValue]:
    targets = np.asarray(targets, dtype=float).reshape(-1, Dm.dim)
    chain = build_chain_graph(Dm, mesh, np.vstack([xs, targets]), max_edge_length, eps_chain)
    x_idx = chain.extra_index[:len(xs)]
    y_idx = chain.extra_index[len(xs):]
    lengths = nx.multi_source_dijkstra_path_length(chain.graph, set(y_idx), weight='weight')
    out = []
    for k, idx in enumerate(x_idx):
        if any(np.array_equal(xs[k], t) for t in targets):
            out.append(HarnackValue(1.0, UPPER_BOUND))
        elif idx in lengths:
            out.append(HarnackValue(math.exp(lengths[idx]), UPPER_BOUND))
        else:
            out.append(HarnackValue(math.inf, UPPER_BOUND,
                                    f"no chain avoiding the puncture reaches {xs[k].tolist()}"))
    return out


def _is_inscribed_ball(D: Domain, o: np.ndarray, R: float, tol: float = 1e-12) -> bool:
    """True when D = B_o(R), i.e. ∂D is the sphere ∂B_o(R)."""
    if isinstance(D, (Ball, Interval)):
        return (float(np.linalg.norm(D.center - o)) <= tol
                and abs(D.radius - R) <= tol * max(1.0, R))
    return False


def punctured_sup_distance(pair: NestedPair, R: float, mesh: float, n_boundary: int = 48,
                           n_sphere: int = 48, max_edge_length: float = 0.35,
                           eps_chain: float = 1e-6, seed: int = 0,
                           max_cells: int = PUNCTURED_CELLS) -> HarnackValue:
    """
    Upper bound on sup over x ∈ ∂D of inf over y ∈ ∂B_o(R) of dist^{G minus o}(x, y).

    Exact (= 1) when D is the ball B_o(R) itself. In d = 1 the components of
    G minus o are intervals and the value is exact. Otherwise a chain graph on
    the punctured domain is searched once from all sphere samples; each
    node's value is multiplied by the ball distance across its covering
    radius, so the bound covers all of ∂D. Ball boundaries use a sphere grid;
    signed-distance boundaries use the centers of a cell cover, refined until
    each cell is small against the room around its center.
    """
    D, G, o = pair.inner, pair.outer, pair.base_point
    if R <= 0:
        raise DomainError(f"R must be positive, got {R}")
    if _is_inscribed_ball(D, o, R):
        return HarnackValue(1.0, EXACT)

    if pair.dim == 1:
        return _punctured_sup_1d(pair, R)

    PD = PuncturedDomain(G, o)
    if isinstance(D, Ball):
        xs, delta = sphere_cover_grid(D.center, D.radius, n_boundary, D.dim)
        spacing = np.full(len(xs), delta)
    else:
        def too_coarse(centers, radii):
            return radii - CELL_ROOM * -np.atleast_1d(PD.signed_distance(centers))

        xs, spacing = boundary_cell_cover(D, too_coarse, max_cells)
    ys = sphere_points(o, R, n_sphere, pair.dim)

    rho = -np.atleast_1d(PD.signed_distance(xs))
    crowded_nodes = np.flatnonzero(spacing >= rho)
    if crowded_nodes.size:
        k = crowded_nodes[0]
        return HarnackValue(math.inf, UPPER_BOUND,
                            f"boundary node {xs[k].tolist()} is closer to the puncture or ∂G "
                            f"than its covering radius {spacing[k]:.3g}")

    values = _set_distances(PD, xs, ys, mesh, max_edge_length, eps_chain)
    best = 1.0
    for v, r_i, delta in zip(values, rho, spacing):
        if math.isinf(v.value):
            return HarnackValue(math.inf, UPPER_BOUND, v.diagnostic)
        factor = float(_center_form(r_i, delta, pair.dim)) * (1.0 + eps_chain)
        best = max(best, v.value * factor)
    return HarnackValue(best, UPPER_BOUND)


def _punctured_sup_1d(pair: NestedPair, R: float) -> HarnackValue:
    D, G = pair.inner, pair.outer
    o = float(pair.base_point[0])
    lo_g, hi_g = (float(v[0]) for v in G.bounding_box())
    lo_d, hi_d = (float(v[0]) for v in D.bounding_box())
    left = Interval(lo_g, o)
    right = Interval(o, hi_g)
    d_left = 1.0 if lo_d == o - R else interval_distance(left, lo_d, o - R).value
    d_right = 1.0 if hi_d == o + R else interval_distance(right, hi_d, o + R).value
    return HarnackValue(max(d_left, d_right), EXACT)


# ---------------------------------------------------------------------------
# Dispatch used by the inequality engine
# ---------------------------------------------------------------------------

def certified_distances(D: Domain, o, points: np.ndarray,
                        settings: Optional[ChainSettings] = None) -> List[HarnackValue]:
    """
    Harnack distances dist^D(o, x) for every x in points, exact or certified upper.

    Intervals and balls with o at the center are exact; balls with o off
    center use the refined two-point oracle times (1 + eps_chain); other
    domains use one chain graph.
    """
    settings = settings or ChainSettings()
    o = as_point(o, D.dim)
    points = np.asarray(points, dtype=float).reshape(-1, D.dim)

    if isinstance(D, Ball) and D.dim == 1:
        D = Interval(D.center[0] - D.radius, D.center[0] + D.radius)
    if isinstance(D, Interval):
        return [HarnackValue(1.0, EXACT) if p[0] == o[0] else interval_distance(D, o[0], p[0])
                for p in points]
    if isinstance(D, Ball):
        out = []
        center_pole = bool(np.array_equal(o, D.center))
        for p in points:
            if np.array_equal(p, o):
                out.append(HarnackValue(1.0, EXACT))
            elif center_pole:
                out.append(ball_center_distance(D, p))
            elif np.array_equal(p, D.center):
                out.append(ball_center_distance(D, o))
            else:
                oracle = ball_pair_oracle(D, o, p, settings.oracle_samples, refine=True)
                out.append(HarnackValue(oracle.value * (1.0 + settings.eps_chain), UPPER_BOUND,
                                        "refined Poisson oracle, over-rounded"))
        return out
    return chain_distances(D, o, points, settings.mesh, settings.max_edge_length,
                           settings.eps_chain)


def certified_distance(D: Domain, o, x, settings: Optional[ChainSettings] = None) -> HarnackValue:
    """Single-point form of certified_distances."""
    return certified_distances(D, o, np.atleast_2d(as_point(x, D.dim)), settings)[0]
