"""
Walk-on-Spheres
Monte Carlo sampling of harmonic measure on signed-distance domains.

Each walker jumps to a uniform point on the largest sphere inscribed around its
position until it enters the eps_shell layer of ∂D; the exit point is the
Newton projection of the last position onto ∂D. Batches draw from their own
generator default_rng([seed, batch]) and are reassembled in batch order, so
results do not depend on the worker count.
"""

import numpy as np
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Optional

from src.geometry.kernel import as_point
from src.geometry.domains import Domain, diameter_upper, project_to_boundary
from src.utils.errors import DomainError, WalkError
from src.utils.logger import get_logger

logger = get_logger(__name__)

SHELL_FACTOR = 1e-4
TRACE_LENGTH = 10


def random_directions(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    """Uniform unit vectors in R^d (±1 in d = 1)."""
    if d == 1:
        return rng.choice([-1.0, 1.0], size=(n, 1))
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _walk_batch(D: Domain, x: np.ndarray, n: int, rng: np.random.Generator,
                eps_shell: float, max_steps: int) -> np.ndarray:
    pos = np.tile(x, (n, 1))
    active = np.ones(n, dtype=bool)
    history = deque(maxlen=TRACE_LENGTH)

    for _ in range(max_steps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return pos
        rho = -np.atleast_1d(D.signed_distance(pos[idx]))
        stopped = rho <= eps_shell
        active[idx[stopped]] = False
        moving = idx[~stopped]
        if moving.size:
            pos[moving] += rho[~stopped, None] * random_directions(rng, moving.size, D.dim)
        history.append(pos.copy())

    stuck = np.flatnonzero(active)
    if stuck.size:
        k = int(stuck[0])
        trace = [h[k].tolist() for h in history]
        raise WalkError(
            f"walk from {x.tolist()} did not reach the boundary shell within "
            f"{max_steps} steps ({stuck.size} of {n} walkers in this batch)",
            start=x.tolist(), trace=trace
        )
    return pos


def walk_on_spheres(D: Domain, x, n: int, seed: int = 0, eps_shell: Optional[float] = None,
                    max_steps: int = 10000, batch_size: int = 4096,
                    workers: int = 1) -> np.ndarray:
    """
    Exit points of n walk-on-spheres paths started at x.

    Args:
        D: Domain with a signed distance
        x: Start point inside D
        n: Number of walks
        seed: Base seed
        eps_shell: Shell thickness (default 1e-4 times diam D)
        max_steps: Step cap per walk
        batch_size: Walks per batch
        workers: Threads used for batches

    Returns:
        (n, d) array of points on ∂D

    Raises:
        DomainError: If x is not inside D
        WalkError: If a walk exceeds max_steps (carries the walk trace)
    """
    x = as_point(x, D.dim)
    if not D.signed_distance(x) < 0:
        raise DomainError(f"walk start {x.tolist()} is not inside {D!r}")
    if n < 1:
        raise DomainError(f"need at least one walk, got n={n}")
    if eps_shell is None:
        eps_shell = SHELL_FACTOR * diameter_upper(D)

    sizes = [min(batch_size, n - start) for start in range(0, n, batch_size)]

    def run(b: int) -> np.ndarray:
        rng = np.random.default_rng([seed, b])
        return _walk_batch(D, x, sizes[b], rng, eps_shell, max_steps)

    logger.debug(f"walk-on-spheres: {n} walks from {x.tolist()} in {len(sizes)} batches, "
                 f"shell {eps_shell:.2e}")
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(run, range(len(sizes))))
    else:
        batches = [run(b) for b in range(len(sizes))]

    shell_points = np.vstack(batches)
    # the projection must reach ∂D from inside the shell
    eps = min(D.eps_geo, eps_shell)
    return project_to_boundary(D, shell_points, eps=eps, seed=seed)


def walk_settings(config: Dict[str, Any], D: Domain) -> Dict[str, Any]:
    """
    Walk parameters from the green config section.

    The shell is eps_shell_factor times diam D, exact for balls and intervals
    and bounded by the bounding-box diagonal for signed-distance domains.
    """
    green = config.get('green', {})
    return {
        'eps_shell': float(green.get('eps_shell_factor', SHELL_FACTOR)) * diameter_upper(D),
        'max_steps': int(green.get('max_steps', 10000)),
        'batch_size': int(green.get('batch_size', 4096)),
        'workers': int(green.get('workers', 1)),
    }
