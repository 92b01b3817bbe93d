"""
Margin Sweeps
Both pointwise lower bounds evaluated along a segment in D, as plot data.
"""

import math
import numpy as np
from dataclasses import dataclass, field
from typing import Any, List, Optional

from src.engine.checks import ScenarioContext, thm1_report
from src.geometry.kernel import as_point
from src.potential.harnack import certified_distances
from src.utils.errors import DomainError
from src.utils.logger import get_logger

logger = get_logger(__name__)

SWEEP_COLUMNS = ('radius', 'dist', 'dist_side', 'lhs', 'rhs_13', 'margin_13', 'rhs_14', 'margin_14',
                 'verdict_13', 'verdict_14')
COLUMN_SIDES = (
    "radius: exact |x - o|",
    "dist: Harnack distance dist^D(o, x), side in dist_side",
    "lhs: exact u(x)",
    "rhs_13, rhs_14: bounds assembled from upper-sided inputs",
    "margin_13, margin_14: lhs - rhs",
)


@dataclass
class SweepResult:
    rows: List[List[Any]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    r_x: Optional[float] = None


def sweep_segment(ctx: ScenarioContext, a, b, steps: int = 50,
                  r_x_fraction: float = 0.5) -> SweepResult:
    """
    Margins of the pointwise and refined bounds at evenly spaced points of [a, b].

    Points that are atoms of the Riesz measure are omitted and listed in the
    notes. A degenerate segment (a = b) gives a single row.

    Raises:
        DomainError: If the segment leaves D
    """
    sc = ctx.scenario
    a = as_point(a, ctx.d)
    b = as_point(b, ctx.d)
    if np.array_equal(a, b):
        pts = a[None, :]
    else:
        s = np.linspace(0.0, 1.0, max(int(steps), 2))
        pts = a[None, :] + s[:, None] * (b - a)[None, :]
    outside = np.atleast_1d(sc.inner.signed_distance(pts)) >= 0
    if np.any(outside):
        raise DomainError(f"segment leaves the domain at {pts[outside][0].tolist()}")

    mu = sc.function.riesz()
    keep = np.array([not (ctx.d >= 2 and mu.has_atom_at(p)) for p in pts])
    result = SweepResult()
    for p in pts[~keep]:
        result.notes.append(f"skipped atom at {p.tolist()}")
    pts = pts[keep]
    if not len(pts):
        return result

    distances = certified_distances(sc.inner, sc.base_point, pts, ctx.settings)
    r_x = r_x_fraction * ctx.diam.lower if sc.outer is not None else None
    result.r_x = r_x
    for p, hv in zip(pts, distances):
        plain = thm1_report(ctx, p, hv)
        refined = thm1_report(ctx, p, hv, r_x) if r_x is not None else None
        result.rows.append([
            float(np.linalg.norm(p - sc.base_point)), hv.value, hv.kind, plain.lhs,
            plain.rhs, plain.margin,
            refined.rhs if refined else math.nan, refined.margin if refined else math.nan,
            plain.verdict, refined.verdict if refined else '',
        ])
    logger.debug(f"sweep of {sc.name}: {len(result.rows)} rows, {len(result.notes)} atoms skipped")
    return result
