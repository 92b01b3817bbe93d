"""
Scenario Loading
Scenario type and the JSON schema (version 1) it is read from.

A scenario fixes a nested pair o ∈ D ⊂ G, a normalized test function, the
evaluation set S ⊂ D, an optional gauge and content radius r, estimator
overrides and optional injected inputs used by negative fixtures.
"""

import copy
import json
import numpy as np
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from src.geometry.domains import (
    Ball, Domain, Interval, NestedPair, gap, grid_points, make_sdf_domain
)
from src.geometry.kernel import as_point, check_dimension
from src.potential.hausdorff import Gauge
from src.testbed.functions import TestFunction, function_from_json
from src.utils.errors import DomainError, ScenarioError

SCHEMA_VERSION = 1
NESTING_SAMPLES = 512

ALL_CHECKS = ('prop21', 'thm1_pointwise', 'thm1_refined', 'cor1', 'prop41', 'prop51',
              'prop33', 'prop34', 'poisson_jensen')
INJECT_SLOTS = ('sup_boundary_D', 'sup_boundary_G', 'harnack_distance', 'punctured_sup')
INJECT_SIDES = ('upper', 'lower', 'exact')
ESTIMATOR_KEYS = {
    'samples': ('green', 'samples'),
    'mesh': ('harnack', 'mesh'),
    'max_edge_length': ('harnack', 'max_edge_length'),
    'n_boundary': ('harnack', 'n_boundary'),
    'n_sphere': ('harnack', 'n_sphere'),
    'oracle_samples': ('harnack', 'oracle_samples'),
    'boundary_samples': ('engine', 'boundary_samples'),
    'shell': ('green', 'eps_shell_factor'),
}


@dataclass
class Scenario:
    """One verification instance."""
    name: str
    dim: int
    inner: Domain
    base_point: np.ndarray
    function: TestFunction
    points: np.ndarray
    outer: Optional[Domain] = None
    harmonic: Optional[TestFunction] = None
    gauge: Optional[Gauge] = None
    r: Optional[float] = None
    checks: List[str] = field(default_factory=lambda: list(ALL_CHECKS))
    estimator: Dict[str, Any] = field(default_factory=dict)
    inject: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    source: Optional[str] = None
    description: str = ""

    @property
    def pair(self) -> Optional[NestedPair]:
        if self.outer is None:
            return None
        return NestedPair(self.inner, self.outer, self.base_point)

    @property
    def closed_form(self) -> bool:
        """True when every geometric input is exact (balls and intervals only)."""
        domains = [self.inner] + ([self.outer] if self.outer is not None else [])
        return all(isinstance(D, (Ball, Interval)) for D in domains)

    def configure(self, config: Dict[str, Any]) -> Dict[str, Any]:
        """Copy of config with this scenario's estimator overrides applied."""
        merged = copy.deepcopy(config)
        for key, value in self.estimator.items():
            section, name = ESTIMATOR_KEYS[key]
            merged.setdefault(section, {})[name] = value
        return merged


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _require(data: Dict[str, Any], key: str, path: Optional[str], prefix: str = "") -> Any:
    if key not in data:
        raise ScenarioError("missing required field", path, prefix + key)
    return data[key]


def parse_domain(data: Dict[str, Any], d: int, path: Optional[str] = None,
                 field_name: str = "domain") -> Domain:
    """Domain from its JSON fragment: ball, interval or sdf (catalog shape)."""
    if not isinstance(data, dict):
        raise ScenarioError("must be an object", path, field_name)
    kind = _require(data, 'type', path, field_name + '.')
    try:
        if kind == 'ball':
            return Ball(_require(data, 'center', path, field_name + '.'),
                        float(_require(data, 'radius', path, field_name + '.')))
        if kind == 'interval':
            if d != 1:
                raise ScenarioError("intervals need dimension 1", path, field_name)
            return Interval(float(_require(data, 'a', path, field_name + '.')),
                            float(_require(data, 'b', path, field_name + '.')))
        if kind == 'sdf':
            return make_sdf_domain(_require(data, 'shape', path, field_name + '.'),
                                   data.get('params', {}), d)
    except (DomainError, TypeError, KeyError) as e:
        raise ScenarioError(str(e), path, field_name) from e
    raise ScenarioError(f"unknown domain type '{kind}' (ball, interval, sdf)", path, field_name + '.type')


def parse_gauge(data: Dict[str, Any], path: Optional[str] = None) -> Gauge:
    try:
        kind = data.get('type', 'power')
        if kind == 'power':
            return Gauge.power(float(data['p']), float(data.get('B', 1.0)))
        if kind == 'tabulated':
            return Gauge.tabulated(data['t'], data['h'])
    except (DomainError, KeyError, TypeError) as e:
        raise ScenarioError(str(e), path, 'gauge') from e
    raise ScenarioError(f"unknown gauge type '{kind}'", path, 'gauge.type')


def _parse_points(data: Any, D: Domain, d: int, path: Optional[str]) -> np.ndarray:
    if isinstance(data, list):
        pts = np.array([as_point(p, d) for p in data]).reshape(-1, d)
    elif isinstance(data, dict) and 'grid' in data:
        grid = data['grid']
        pts = grid_points(D, int(grid.get('per_axis', 21)), float(grid.get('margin', 0.0)))
    else:
        raise ScenarioError("expected a list of points or {'grid': {...}}", path, 'points')
    if len(pts):
        inside = np.atleast_1d(D.signed_distance(pts)) < 0
        if not np.all(inside):
            bad = pts[~inside][0]
            raise ScenarioError(f"point {bad.tolist()} is not inside the domain", path, 'points')
    return pts


def scenario_from_dict(data: Dict[str, Any], path: Optional[str] = None) -> Scenario:
    """
    Build a Scenario from a parsed JSON object.

    Raises:
        ScenarioError: With the path and field of the first violation
    """
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object", path)
    schema = data.get('schema')
    if schema != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema {schema!r}, expected {SCHEMA_VERSION}", path, 'schema')
    try:
        d = check_dimension(_require(data, 'dimension', path))
    except DomainError as e:
        raise ScenarioError(str(e), path, 'dimension') from e

    name = str(data.get('name', Path(path).stem if path else 'scenario'))
    inner = parse_domain(_require(data, 'domain', path), d, path, 'domain')
    outer = parse_domain(data['outer'], d, path, 'outer') if 'outer' in data else None
    for D, label in ((inner, 'domain'), (outer, 'outer')):
        if D is not None and D.dim != d:
            raise ScenarioError(f"domain has dimension {D.dim}, scenario {d}", path, label)

    try:
        o = as_point(_require(data, 'base_point', path), d)
    except DomainError as e:
        raise ScenarioError(str(e), path, 'base_point') from e
    if not inner.contains(o):
        raise ScenarioError(f"base point {o.tolist()} is not inside the domain", path, 'base_point')
    if outer is not None:
        try:
            gap(NestedPair(inner, outer, o), NESTING_SAMPLES)
        except DomainError as e:
            raise ScenarioError(str(e), path, 'outer') from e

    try:
        u = function_from_json(_require(data, 'function', path), d, o)
    except (DomainError, KeyError, TypeError) as e:
        raise ScenarioError(str(e), path, 'function') from e
    if u.kind == 'poisson_sum':
        hull = outer if outer is not None else inner
        for pole in u.params.get('poles', []):
            if not hull.signed_distance(as_point(pole['loc'], d)) > hull.eps_geo:
                raise ScenarioError(f"pole {pole['loc']} lies in the closure of {hull!r}",
                                    path, 'function.poles')
    harmonic = None
    if 'harmonic' in data:
        try:
            harmonic = function_from_json(data['harmonic'], d, o)
        except (DomainError, KeyError, TypeError) as e:
            raise ScenarioError(str(e), path, 'harmonic') from e

    points = _parse_points(data.get('points', [o.tolist()]), inner, d, path)
    gauge = parse_gauge(data['gauge'], path) if 'gauge' in data else None
    r = data.get('r')
    if r is not None:
        r = float(r)
        if r <= 0:
            raise ScenarioError(f"r must be positive, got {r}", path, 'r')

    checks = list(data.get('checks', ALL_CHECKS))
    unknown = [c for c in checks if c not in ALL_CHECKS]
    if unknown:
        raise ScenarioError(f"unknown checks {unknown}", path, 'checks')

    estimator = dict(data.get('estimator', {}))
    unknown = [k for k in estimator if k not in ESTIMATOR_KEYS]
    if unknown:
        raise ScenarioError(f"unknown estimator keys {unknown}", path, 'estimator')

    inject = dict(data.get('inject', {}))
    for slot, spec in inject.items():
        if slot not in INJECT_SLOTS:
            raise ScenarioError(f"unknown slot '{slot}'", path, 'inject')
        if not isinstance(spec, dict) or 'value' not in spec or spec.get('side') not in INJECT_SIDES:
            raise ScenarioError("needs {value, side: upper|lower|exact}", path, f'inject.{slot}')

    return Scenario(
        name=name, dim=d, inner=inner, base_point=o, function=u, points=points,
        outer=outer, harmonic=harmonic, gauge=gauge, r=r, checks=checks,
        estimator=estimator, inject=inject, source=path,
        description=str(data.get('description', '')),
    )


def load_scenario(path: Union[str, Path]) -> Scenario:
    """
    Read a scenario file.

    Raises:
        FileNotFoundError: If the file does not exist
        ScenarioError: On JSON or schema errors
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Scenario file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"invalid JSON: {e}", str(path)) from e
    return scenario_from_dict(data, str(path))


def load_scenarios(paths: List[Union[str, Path]]) -> List[Scenario]:
    """Scenario files, expanding directories to their *.json files in name order."""
    scenarios = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            scenarios.extend(load_scenario(f) for f in sorted(p.glob('*.json')))
        else:
            scenarios.append(load_scenario(p))
    return scenarios
