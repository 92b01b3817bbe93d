"""
Default Corpus
The shipped verification corpus: 24 scenarios across d = 1, 2, 3.

Most scenarios use balls and intervals so every geometric input is closed
form; a few use signed-distance domains or off-center base points to
exercise the chain, oracle and walk-on-spheres estimators.
"""

from typing import Any, Dict, List

from src.engine.scenario import SCHEMA_VERSION, Scenario, scenario_from_dict


def _ball(center, radius) -> Dict[str, Any]:
    return {"type": "ball", "center": list(center), "radius": radius}


def _interval(a, b) -> Dict[str, Any]:
    return {"type": "interval", "a": a, "b": b}


def _sdf(shape, **params) -> Dict[str, Any]:
    return {"type": "sdf", "shape": shape, "params": params}


def _scenario(name, d, domain, outer, o, function, points, gauge=None, r=None,
              **extra) -> Dict[str, Any]:
    data = {
        "schema": SCHEMA_VERSION, "name": name, "dimension": d,
        "domain": domain, "base_point": list(o), "function": function, "points": points,
    }
    if outer is not None:
        data["outer"] = outer
    if gauge is not None:
        data["gauge"] = gauge
        data["r"] = r
    data.update(extra)
    return data


def _grid(per_axis, margin=0.02):
    return {"grid": {"per_axis": per_axis, "margin": margin}}


def _interval_scenarios() -> List[Dict[str, Any]]:
    pts = _grid(41)
    return [
        _scenario("interval_abs", 1, _interval(-1.0, 1.0), _interval(-2.0, 2.0), [0.0],
                  {"kind": "convex_pl", "breakpoints": [0.3], "slopes": [-1.0, 1.0], "intercept": 0.0},
                  pts, {"type": "power", "p": 0.5}, 1.0),
        _scenario("interval_two_breaks", 1, _interval(-1.0, 1.5), _interval(-1.5, 2.0), [0.2],
                  {"kind": "convex_pl", "breakpoints": [-0.5, 0.7], "slopes": [-1.0, 0.5, 2.0],
                   "intercept": 0.1},
                  pts, {"type": "power", "p": 1.0}, 0.5),
        _scenario("interval_affine", 1, _interval(0.0, 2.0), _interval(-1.0, 3.0), [0.5],
                  {"kind": "convex_pl", "breakpoints": [], "slopes": [2.0], "intercept": 1.0}, pts),
        _scenario("interval_off_center", 1, _interval(-1.0, 1.0), _interval(-1.5, 3.0), [0.4],
                  {"kind": "convex_pl", "breakpoints": [-0.5, 0.5], "slopes": [-2.0, 0.0, 2.0],
                   "intercept": 0.0},
                  pts, {"type": "power", "p": 1.0, "B": 0.5}, 0.5),
        _scenario("interval_as_ball", 1, _ball([0.0], 1.0), _ball([0.2], 1.8), [-0.3],
                  {"kind": "convex_pl", "breakpoints": [0.1], "slopes": [-0.5, 1.5], "intercept": 0.0},
                  pts, {"type": "power", "p": 0.5}, 0.8),
        _scenario("interval_break_on_boundary", 1, _interval(-1.0, 1.0), _interval(-2.0, 2.0), [0.0],
                  {"kind": "convex_pl", "breakpoints": [1.0], "slopes": [-1.0, 1.0], "intercept": 0.0},
                  pts),
    ]


def _disk_scenarios() -> List[Dict[str, Any]]:
    pts = _grid(21)
    unit, outer2 = _ball([0.0, 0.0], 1.0), _ball([0.0, 0.0], 2.0)
    return [
        _scenario("disk_one_zero", 2, unit, outer2, [0.0, 0.0],
                  {"kind": "log_poly_abs", "zeros": [{"loc": [0.5, 0.0]}]},
                  pts, {"type": "power", "p": 1.0}, 0.5),
        _scenario("disk_two_zeros_harmonic", 2, unit, _ball([0.0, 0.0], 1.5), [0.0, 0.0],
                  {"kind": "log_poly_abs",
                   "zeros": [{"loc": [0.3, 0.4]}, {"loc": [-0.6, 0.1], "multiplicity": 2}],
                   "harmonic": [[0.0, 0.0], [0.5, 0.0]]},
                  pts, {"type": "power", "p": 1.0, "B": 0.5}, 0.3),
        _scenario("disk_zero_outside", 2, unit, outer2, [0.0, 0.0],
                  {"kind": "log_poly_abs", "zeros": [{"loc": [1.7, 0.0]}]},
                  pts, {"type": "power", "p": 1.0}, 0.5),
        _scenario("disk_harmonic_only", 2, unit, outer2, [0.0, 0.0],
                  {"kind": "log_poly_abs", "zeros": [], "harmonic": [[0.0, 0.0], [1.0, 0.0], [0.3, 0.0]]},
                  pts),
        _scenario("disk_off_center", 2, _ball([0.2, 0.0], 1.0), outer2, [0.0, 0.0],
                  {"kind": "log_poly_abs", "zeros": [{"loc": [-0.4, 0.3]}]},
                  _grid(11), {"type": "power", "p": 1.0}, 0.5),
        _scenario("disk_poisson_sum", 2, unit, outer2, [0.0, 0.0],
                  {"kind": "poisson_sum", "center": [0.0, 0.0], "radius": 2.5,
                   "poles": [{"loc": [2.5, 0.0], "weight": 1.0}, {"loc": [0.0, -2.5], "weight": 0.5}],
                   "constant": 0.0},
                  pts),
        _scenario("square_sdf", 2, _sdf("box", lo=[-1.0, -1.0], hi=[1.0, 1.0]), _ball([0.0, 0.0], 2.5),
                  [0.0, 0.0],
                  {"kind": "log_poly_abs", "zeros": [{"loc": [0.4, 0.2]}]},
                  _grid(11, 0.05), {"type": "power", "p": 1.0}, 0.5),
        _scenario("ellipse_sdf", 2, _sdf("ellipse", center=[0.0, 0.0], axes=[1.2, 0.8]),
                  _ball([0.0, 0.0], 2.0), [0.0, 0.0],
                  {"kind": "log_poly_abs", "zeros": [{"loc": [-0.3, 0.3]}]},
                  _grid(11, 0.05), {"type": "power", "p": 1.0}, 0.4),
        _scenario("pentagon_sdf", 2,
                  _sdf("polygon", vertices=[[1.0, 0.0], [0.309, 0.951], [-0.809, 0.588],
                                            [-0.809, -0.588], [0.309, -0.951]]),
                  _ball([0.0, 0.0], 2.5), [0.0, 0.0],
                  {"kind": "log_poly_abs", "zeros": [{"loc": [0.2, -0.3]}], "harmonic": [[0.0, 0.0], [0.2, 0.1]]},
                  _grid(11, 0.05)),
        _scenario("disk_in_box_sdf", 2, _ball([0.0, 0.0], 0.8), _sdf("box", lo=[-1.5, -1.5], hi=[1.5, 1.5]),
                  [0.0, 0.0],
                  {"kind": "log_poly_abs", "zeros": [{"loc": [0.3, -0.2]}]},
                  _grid(15), {"type": "power", "p": 1.0}, 0.4),
        _scenario("disk_zero_cluster", 2, unit, outer2, [0.0, 0.0],
                  {"kind": "log_poly_abs",
                   "zeros": [{"loc": [0.2, 0.1]}, {"loc": [0.25, 0.1]}, {"loc": [0.2, 0.15]}]},
                  pts, {"type": "power", "p": 1.0, "B": 0.5}, 0.3),
        _scenario("disk_zero_on_grid", 2, unit, outer2, [0.0, 0.0],
                  {"kind": "log_poly_abs", "zeros": [{"loc": [0.5, 0.5]}]},
                  [[0.5, 0.5], [0.2, 0.1], [-0.3, 0.4], [0.0, -0.6], [0.45, 0.5]],
                  {"type": "power", "p": 1.0}, 0.5),
    ]


def _ball3_scenarios() -> List[Dict[str, Any]]:
    pts = _grid(9, 0.05)
    unit, outer2 = _ball([0.0, 0.0, 0.0], 1.0), _ball([0.0, 0.0, 0.0], 2.0)
    gauge = {"type": "power", "p": 1.5}
    return [
        _scenario("ball3_one_atom", 3, unit, outer2, [0.0, 0.0, 0.0],
                  {"kind": "newton_potential", "atoms": [{"loc": [0.5, 0.0, 0.0], "mass": 1.0}],
                   "linear": [0.3, 0.0, 0.0], "constant": 0.0},
                  pts, gauge, 0.5),
        _scenario("ball3_two_atoms", 3, unit, outer2, [0.0, 0.0, 0.0],
                  {"kind": "newton_potential",
                   "atoms": [{"loc": [0.0, 0.4, 0.0], "mass": 0.5},
                             {"loc": [-0.3, -0.3, 0.2], "mass": 1.0}],
                   "constant": 0.0},
                  pts, gauge, 0.4),
        _scenario("ball3_atom_outside", 3, unit, outer2, [0.0, 0.0, 0.0],
                  {"kind": "newton_potential", "atoms": [{"loc": [1.5, 0.0, 0.0], "mass": 2.0}],
                   "linear": [0.0, 0.2, 0.0], "constant": 0.0},
                  pts, gauge, 0.5),
        _scenario("ball3_harmonic", 3, unit, outer2, [0.0, 0.0, 0.0],
                  {"kind": "newton_potential", "atoms": [], "linear": [1.0, -0.5, 0.2], "constant": 0.0},
                  pts),
        _scenario("ball3_poisson_sum", 3, unit, outer2, [0.0, 0.0, 0.0],
                  {"kind": "poisson_sum", "center": [0.0, 0.0, 0.0], "radius": 3.0,
                   "poles": [{"loc": [3.0, 0.0, 0.0], "weight": 1.0}], "constant": 0.0},
                  pts),
        _scenario("ball3_off_center", 3, _ball([0.2, 0.0, 0.0], 0.8), _ball([0.0, 0.0, 0.0], 1.6),
                  [0.0, 0.0, 0.0],
                  {"kind": "newton_potential", "atoms": [{"loc": [0.4, 0.3, 0.0], "mass": 0.5}],
                   "constant": 0.0},
                  _grid(5, 0.05), gauge, 0.4,
                  estimator={"mesh": 0.25, "max_edge_length": 0.45, "n_boundary": 400, "n_sphere": 96}),
    ]


def default_corpus_data() -> List[Dict[str, Any]]:
    """The corpus as schema-1 JSON objects."""
    return _interval_scenarios() + _disk_scenarios() + _ball3_scenarios()


def default_corpus() -> List[Scenario]:
    """The corpus parsed into Scenarios."""
    return [scenario_from_dict(data, f"<corpus:{data['name']}>") for data in default_corpus_data()]
