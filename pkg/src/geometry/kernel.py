"""
Kernel Module
The dimension-dependent kernel k_{d-2}, unit-sphere areas, and the
fundamental solution of the Laplace equation.

Extended reals are plain Python floats with ±inf; the helpers at the bottom
of this module make the few places where ∞ - ∞ could appear raise instead of
producing NaN.
"""

import math
import numpy as np
from scipy.special import gamma
from typing import Union

from src.utils.errors import DomainError, ExtendedArithmeticError

ArrayLike = Union[float, np.ndarray]

# Exact values for the dimensions the estimators are validated on
_SPHERE_AREAS = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}


def check_dimension(d: int) -> int:
    """Return d as an int, raising DomainError unless it is a positive integer."""
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise DomainError(f"dimension must be an integer >= 1, got {d!r}")
    return int(d)


def as_point(x, d: int) -> np.ndarray:
    """
    Coerce a scalar or sequence to a float point of dimension d.

    A scalar in d > 1 is read as the first coordinate (x, 0, ..., 0).
    """
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise DomainError(f"point must be one-dimensional, got shape {arr.shape}")
    if arr.size == 1 and d > 1:
        arr = np.concatenate([arr, np.zeros(d - 1)])
    if arr.size != d:
        raise DomainError(f"point {arr.tolist()} does not have dimension {d}")
    return arr


def kernel_k(d: int, t: ArrayLike) -> ArrayLike:
    """
    Evaluate the kernel k_{d-2}.

    Args:
        d: Dimension
        t: Nonnegative radius (scalar or array)

    Returns:
        t for d=1, ln t for d=2, -t^{-(d-2)} for d>2; at t=0 the limit
        (0 for d=1, -inf otherwise). Scalar in, float out.

    Raises:
        DomainError: If t is negative or NaN
    """
    d = check_dimension(d)
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError(f"kernel argument must be nonnegative, got {t!r}")

    with np.errstate(divide='ignore'):
        if d == 1:
            out = arr.copy()
        elif d == 2:
            out = np.log(arr)
        else:
            out = -np.power(arr, -(d - 2.0))

    if out.ndim == 0:
        return float(out)
    return out


def sphere_area(d: int) -> float:
    """Area s_{d-1} = 2π^{d/2}/Γ(d/2) of the unit sphere in R^d."""
    d = check_dimension(d)
    if d in _SPHERE_AREAS:
        return _SPHERE_AREAS[d]
    return float(2.0 * math.pi ** (d / 2.0) / gamma(d / 2.0))


def dhat(d: int) -> int:
    """max(1, d - 2)."""
    d = check_dimension(d)
    return max(1, d - 2)


def fundamental_solution(d: int, x, y) -> ArrayLike:
    """
    Fundamental solution k(|y - x|) / (s_{d-1} * dhat(d)).

    Args:
        d: Dimension
        x: Pole
        y: Evaluation point, or an (n, d) array of points

    Returns:
        Value (float) or array of values; -inf at y = x for d >= 2
    """
    d = check_dimension(d)
    x = as_point(x, d)
    y = np.asarray(y, dtype=float)
    if y.ndim <= 1:
        y = as_point(y, d)
    dist = np.linalg.norm(y - x, axis=-1)
    return kernel_k(d, dist) / (sphere_area(d) * dhat(d))


def kernel_difference(d: int, r: float, t: ArrayLike) -> ArrayLike:
    """k(r) - k(t) for r > 0, t >= 0; +inf where t = 0 and d >= 2."""
    if r <= 0:
        raise DomainError(f"kernel_difference needs r > 0, got {r}")
    return kernel_k(d, r) - kernel_k(d, t)


# ---------------------------------------------------------------------------
# Extended-real helpers
# ---------------------------------------------------------------------------

def ext_add(a: float, b: float) -> float:
    """a + b, raising on (+inf) + (-inf)."""
    if math.isinf(a) and math.isinf(b) and (a > 0) != (b > 0):
        raise ExtendedArithmeticError(f"undefined sum {a} + {b}")
    return a + b


def ext_sub(a: float, b: float) -> float:
    """a - b, raising when both are infinite with the same sign."""
    if math.isinf(a) and math.isinf(b) and (a > 0) == (b > 0):
        raise ExtendedArithmeticError(f"undefined difference {a} - {b}")
    return a - b


def ext_mul(a: float, b: float) -> float:
    """a * b with the measure-theoretic convention 0 * inf = 0."""
    if a == 0.0 or b == 0.0:
        return 0.0
    return a * b


def ext_div(a: float, b: float) -> float:
    """a / b for b > 0 (b = +inf gives 0 for finite a)."""
    if b <= 0:
        raise ExtendedArithmeticError(f"division by nonpositive {b}")
    if math.isinf(b):
        if math.isinf(a):
            raise ExtendedArithmeticError(f"undefined quotient {a} / {b}")
        return 0.0
    return a / b
