"""
Tests for the inequality engine
Verdict and slot logic, the pointwise and refined bounds, the exceptional
set, scenario parsing, negative fixtures, suite determinism, report writers
and sweeps.
"""

import sys
import copy
import json
import math
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.engine.checks import (
    FAIL, INCONCLUSIVE, PASS, PASS_WITH_MC, REJECTED, ScenarioContext, SlotValue,
    applicable_checks, check_cor1, check_poisson_jensen, check_prop21, check_prop33,
    check_prop34, check_prop41, check_prop51, check_thm1_pointwise, check_thm1_refined,
    decide_verdict, exceptional_set, make_report, membership_radius, run_checks,
    thm1_grid, upper_slot, worst_report
)
from src.engine.corpus import default_corpus, default_corpus_data
from src.engine.report import CSV_COLUMNS, run_header, write_reports
from src.engine.scenario import load_scenario, load_scenarios, scenario_from_dict
from src.engine.suite import run_suite, scenario_seed
from src.engine.sweep import sweep_segment
from src.geometry.domains import Ball, GeoValue, grid_points
from src.potential.hausdorff import Gauge
from src.potential.riesz import AtomicMeasure, radial_counting
from src.testbed.functions import make_test_function
from src.utils.config_loader import get_default_config
from src.utils.errors import DomainError, ScenarioError

SCENARIOS = project_root / "config" / "scenarios"
NEGATIVE = SCENARIOS / "negative"


def disk_data(**overrides):
    data = {
        "schema": 1, "name": "disk_test", "dimension": 2,
        "domain": {"type": "ball", "center": [0.0, 0.0], "radius": 1.0},
        "outer": {"type": "ball", "center": [0.0, 0.0], "radius": 2.0},
        "base_point": [0.0, 0.0],
        "function": {"kind": "log_poly_abs", "zeros": [{"loc": [0.5, 0.0]}]},
        "points": {"grid": {"per_axis": 11, "margin": 0.02}},
        "gauge": {"type": "power", "p": 1.0}, "r": 0.5,
    }
    data.update(overrides)
    return data


@pytest.fixture
def config():
    return get_default_config()


@pytest.fixture
def interval_ctx(config):
    return ScenarioContext(load_scenario(SCENARIOS / "interval_d1.json"), config)


@pytest.fixture
def disk_ctx(config):
    return ScenarioContext(scenario_from_dict(disk_data()), config)


# ---------------------------------------------------------------------------
# Verdicts and slots
# ---------------------------------------------------------------------------

def test_decide_verdict():
    assert decide_verdict(0.0, 0.0, 1e-9, 3.0) == PASS
    assert decide_verdict(-1e-12, 0.0, 1e-9, 3.0) == PASS
    assert decide_verdict(-1e-6, 0.0, 1e-9, 3.0) == FAIL
    assert decide_verdict(-0.5, 0.2, 0.0, 3.0) == PASS_WITH_MC
    assert decide_verdict(-1.0, 0.2, 0.0, 3.0) == FAIL
    assert decide_verdict(math.nan, 0.0, 1e-9, 3.0) == INCONCLUSIVE


def test_upper_slot_sides():
    plain = upper_slot('sup_boundary_D', 2.0, True, 2.0)
    assert plain.side == 'exact' and not plain.refused and not plain.violation
    assert upper_slot('sup_boundary_D', 2.5, False, 2.0).side == 'upper'
    assert upper_slot('harnack_distance', math.inf, False, 1.0).refused

    inject = {'sup_boundary_D': {'value': 1.0, 'side': 'lower'}}
    assert upper_slot('sup_boundary_D', 2.0, True, 2.0, inject).refused

    inject = {'sup_boundary_D': {'value': 1.0, 'side': 'upper'}}
    slot = upper_slot('sup_boundary_D', 2.0, True, 2.0, inject)
    assert slot.violation
    assert slot.side == 'injected_upper'

    inject = {'sup_boundary_D': {'value': 3.0, 'side': 'exact'}}
    assert not upper_slot('sup_boundary_D', 2.0, True, 2.0, inject).violation


def test_make_report_precedence():
    bad = SlotValue('sup_boundary_D', 1.0, 'injected_upper', violation="too small")
    refused = SlotValue('harnack_distance', math.inf, 'upper', refused="no upper end")
    assert make_report('c', 's', 1.0, 0.0, '>=', 1e-9, 3.0, slots=[bad, refused]).verdict == FAIL
    assert make_report('c', 's', 1.0, 0.0, '>=', 1e-9, 3.0, slots=[refused]).verdict == INCONCLUSIVE
    vac = make_report('c', 's', -math.inf, math.nan, '>=', 1e-9, 3.0, vacuous="atom")
    assert vac.verdict == PASS
    assert "atom" in vac.notes


def test_make_report_margins():
    assert make_report('c', 's', 2.0, 1.0, '>=', 1e-9, 3.0).margin == 1.0
    assert make_report('c', 's', 2.0, 1.0, '<=', 1e-9, 3.0).margin == -1.0
    eq = make_report('c', 's', 0.3, 0.0, '==', 1e-9, 3.0)
    assert eq.margin == pytest.approx(-0.3)
    assert eq.verdict == FAIL
    # tolerance is relative to the size of the sides
    assert make_report('c', 's', 1e6, 1e6 + 1e-4, '>=', 1e-9, 3.0).verdict == PASS
    assert make_report('c', 's', 0.0, 1e-4, '>=', 1e-3, 3.0, absolute_tol=True).verdict == PASS


def test_worst_report():
    reports = [make_report('c', 's', v, 0.0, '>=', 1e-9, 3.0) for v in (1.0, 0.1, 0.5)]
    worst = worst_report(reports)
    assert worst.margin == pytest.approx(0.1)
    assert worst.extra['points'] == 3
    reports = [make_report('c', 's', v, 0.0, '>=', 1e-9, 3.0) for v in (1.0, -1.0)]
    assert worst_report(reports).verdict == FAIL
    with pytest.raises(ValueError):
        worst_report([])


# ---------------------------------------------------------------------------
# Pointwise bounds
# ---------------------------------------------------------------------------

def test_thm1_pointwise_passes_on_disk(disk_ctx):
    rep = thm1_grid(disk_ctx)
    assert rep.verdict == PASS
    assert rep.slots['harnack_distance'] == 'exact'
    single = check_thm1_pointwise(disk_ctx, [0.3, -0.4])
    assert single.verdict == PASS
    assert single.lhs >= single.rhs


def test_thm1_pointwise_at_atom_is_vacuous(disk_ctx):
    rep = check_thm1_pointwise(disk_ctx, [0.5, 0.0])
    assert rep.lhs == -math.inf
    assert rep.verdict == PASS
    assert any("atom" in n for n in rep.notes)


def test_thm1_interval_all_exact(interval_ctx):
    rep = thm1_grid(interval_ctx)
    assert rep.verdict == PASS
    assert rep.slots['sup_boundary_D'] == 'exact'


def test_refined_at_full_diameter_reproduces_pointwise(interval_ctx):
    x = [0.9]
    plain = check_thm1_pointwise(interval_ctx, x)
    refined = check_thm1_refined(interval_ctx, x, interval_ctx.diam.value)
    assert refined.rhs == pytest.approx(plain.rhs, rel=1e-12, abs=1e-12)
    assert refined.verdict == PASS


def test_refined_rejects_bad_radius(interval_ctx):
    with pytest.raises(DomainError):
        check_thm1_refined(interval_ctx, [0.9], 0.0)
    with pytest.raises(DomainError):
        check_thm1_refined(interval_ctx, [0.9], 10.0)


def test_refined_needs_outer_domain(config):
    data = disk_data()
    del data['outer'], data['gauge'], data['r']
    sc = scenario_from_dict(data)
    with pytest.raises(DomainError):
        check_thm1_refined(sc, [0.2, 0.0], 1.0, config)
    assert 'thm1_refined' not in applicable_checks(sc)
    assert 'cor1' not in applicable_checks(sc)


def test_substituted_sup_is_noted(config):
    config['engine']['substitute_sup'] = True
    ctx = ScenarioContext(scenario_from_dict(disk_data()), config)
    rep = check_thm1_refined(ctx, [0.2, 0.3], 1.0)
    assert any("substituted" in n for n in rep.notes)
    assert rep.verdict == PASS


# ---------------------------------------------------------------------------
# Exceptional set
# ---------------------------------------------------------------------------

def test_membership_radius():
    h = Gauge.power(1.0)   # h(t) = 2t
    mu = AtomicMeasure.from_atoms([([0.2, 0.0], 1.0)], 2)
    assert membership_radius(mu, [0.0, 0.0], h, 0.4, 1.0) == pytest.approx(0.4)
    assert membership_radius(mu, [0.0, 0.0], h, 1.0, 1.0) == pytest.approx(0.5, abs=1e-12)
    far = AtomicMeasure.from_atoms([([0.6, 0.0], 1.0)], 2)
    assert membership_radius(far, [0.0, 0.0], h, 1.0, 1.0) is None


def test_exceptional_set_stable_under_finer_radius_grid():
    rng = np.random.default_rng(12)
    mu = AtomicMeasure(rng.uniform(-0.8, 0.8, size=(4, 2)), rng.uniform(0.2, 1.0, size=4), 2)
    S = grid_points(Ball([0.0, 0.0], 1.0), 21, 0.02)
    h, r, M = Gauge.power(1.0), 0.5, 1.5
    E = exceptional_set(mu, S, h, r, M, guard=64)
    finer = exceptional_set(mu, S, h, r, M, guard=640)
    np.testing.assert_array_equal(E.mask, finer.mask)

    ts = r * np.arange(1, 641) / 640
    brute = np.array([any(radial_counting(mu, x, t) >= h(t) * M for t in ts) for x in S])
    assert np.all(E.mask[brute])
    assert len(E) == int(E.mask.sum())
    assert np.all((E.radii > 0) & (E.radii <= r))


def test_cor1_on_disk(disk_ctx):
    bound, content, E = check_cor1(disk_ctx)
    assert bound.check == 'cor1_bound'
    assert content.check == 'cor1_content'
    assert bound.verdict in (PASS, PASS_WITH_MC)
    assert content.verdict != FAIL
    assert content.extra['E_size'] == len(E)


def test_cor1_rejected_when_outer_sup_not_positive(config):
    data = disk_data(function={"kind": "newton_potential", "atoms": []})
    bound, content, E = check_cor1(scenario_from_dict(data), config)
    assert bound.verdict == REJECTED
    assert content.verdict == REJECTED
    assert len(E) == 0


# ---------------------------------------------------------------------------
# Riesz mass, Green bounds, Poisson-Jensen
# ---------------------------------------------------------------------------

def test_prop21_on_harmonic_function(config):
    h = make_test_function('newton_potential', {'atoms': [], 'linear': [1.0, 0.5]}, 2, [0.0, 0.0])
    S = grid_points(Ball([0.0, 0.0], 1.0), 9, 0.05)
    rep = check_prop21(h, Ball([0.0, 0.0], 1.0), [0.0, 0.0], S, config)
    assert rep.verdict == PASS


def test_prop21_requires_harmonic(config):
    u = make_test_function('log_poly_abs', {'zeros': [{'loc': [0.5, 0.0]}]}, 2, [0.0, 0.0])
    with pytest.raises(DomainError):
        check_prop21(u, Ball([0.0, 0.0], 1.0), [0.0, 0.0], np.array([[0.1, 0.1]]), config)


@pytest.mark.parametrize("check", [check_prop51, check_prop41, check_prop33, check_prop34])
def test_green_and_mass_bounds_hold_on_disk(disk_ctx, check):
    rep = check(disk_ctx)
    assert rep.verdict in (PASS, PASS_WITH_MC)


@pytest.mark.parametrize("check", [check_prop51, check_prop41, check_prop33, check_prop34])
def test_green_and_mass_bounds_exact_on_interval(interval_ctx, check):
    rep = check(interval_ctx)
    assert rep.verdict == PASS


def test_zero_gap_lower_end_makes_bounds_inconclusive(disk_ctx):
    disk_ctx.gap = GeoValue(0.5, 0.0, 0.5, 'upper_estimate')
    assert disk_ctx.slot_nesting().refused
    reports = [check_prop51(disk_ctx), check_prop41(disk_ctx),
               check_thm1_refined(disk_ctx, [0.2, 0.3], 1.0), *check_cor1(disk_ctx)[:2]]
    for rep in reports:
        assert rep.verdict == INCONCLUSIVE
        assert any("lower end of the gap" in n for n in rep.notes)


def test_poisson_jensen_checks(disk_ctx, interval_ctx):
    disk = check_poisson_jensen(disk_ctx)
    assert disk.verdict in (PASS, PASS_WITH_MC)
    assert abs(disk.lhs) <= 1e-3
    exact = check_poisson_jensen(interval_ctx)
    assert exact.verdict == PASS
    assert exact.extra['estimate'] == 'exact'


def test_run_checks_interval_has_no_failure(interval_ctx):
    reports = run_checks(interval_ctx)
    names = {rep.check for rep in reports}
    assert {'thm1_pointwise', 'thm1_refined', 'cor1_bound', 'cor1_content', 'prop51'} <= names
    assert not any(rep.verdict == FAIL for rep in reports)


# ---------------------------------------------------------------------------
# Scenarios and fixtures
# ---------------------------------------------------------------------------

def test_load_scenarios_reads_top_level_only():
    scenarios = load_scenarios([SCENARIOS])
    assert sorted(sc.name for sc in scenarios) == ['ball_d3', 'disk_d2', 'interval_d1']


@pytest.mark.parametrize("change,field", [
    ({'schema': 2}, 'schema'),
    ({'dimension': 0}, 'dimension'),
    ({'base_point': [1.5, 0.0]}, 'base_point'),
    ({'points': [[0.2, 0.0], [1.2, 0.0]]}, 'points'),
    ({'checks': ['thm9']}, 'checks'),
    ({'estimator': {'walkers': 10}}, 'estimator'),
    ({'inject': {'sup_boundary_D': {'value': 1.0, 'side': 'sideways'}}}, 'inject.sup_boundary_D'),
    ({'inject': {'diameter': {'value': 1.0, 'side': 'upper'}}}, 'inject'),
    ({'r': -0.5}, 'r'),
    ({'domain': {'type': 'interval', 'a': 0.0, 'b': 1.0}}, 'domain'),
    ({'domain': {'type': 'torus'}}, 'domain.type'),
    ({'function': {'kind': 'poisson_sum', 'center': [0.0, 0.0], 'radius': 1.5,
                   'poles': [{'loc': [1.5, 0.0], 'weight': 1.0}]}}, 'function.poles'),
    ({'gauge': {'type': 'power', 'p': -1.0}}, 'gauge'),
])
def test_scenario_schema_errors(change, field):
    data = disk_data()
    data.update(copy.deepcopy(change))
    with pytest.raises(ScenarioError) as info:
        scenario_from_dict(data, "case.json")
    assert info.value.field == field
    assert str(info.value).startswith("case.json: ")


def test_scenario_missing_field():
    data = disk_data()
    del data['function']
    with pytest.raises(ScenarioError) as info:
        scenario_from_dict(data)
    assert info.value.field == 'function'


def test_load_scenario_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_scenario(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ScenarioError):
        load_scenario(broken)


def test_nesting_violation_fixture():
    with pytest.raises(ScenarioError) as info:
        load_scenario(NEGATIVE / "nesting_violation.json")
    assert info.value.field == 'outer'


@pytest.mark.parametrize("name", ["wrong_sided_sup.json", "underestimated_harnack.json"])
def test_negative_fixtures_fail(config, name):
    result = run_suite([load_scenario(NEGATIVE / name)], config, verbose=False)
    assert result.failed
    failed = [rep for rep in result.reports if rep.verdict == FAIL]
    assert any("below the certified lower value" in n for rep in failed for n in rep.notes)


def test_estimator_overrides_apply(config):
    sc = scenario_from_dict(disk_data(estimator={'samples': 512, 'mesh': 0.2}))
    merged = sc.configure(config)
    assert merged['green']['samples'] == 512
    assert merged['harnack']['mesh'] == 0.2
    assert config['green']['samples'] == 4096


def test_default_corpus_parses():
    data = default_corpus_data()
    assert len(data) == 24
    assert len({d['name'] for d in data}) == 24
    assert {sc.dim for sc in default_corpus()} == {1, 2, 3}


@pytest.mark.slow
def test_default_corpus_has_no_failure(config):
    result = run_suite(default_corpus(), config, verbose=False)
    assert not result.failed
    assert result.summary()['scenarios'] == 24


# ---------------------------------------------------------------------------
# Suite, reports, sweeps
# ---------------------------------------------------------------------------

def test_scenario_seed_is_stable():
    assert scenario_seed(7, 0) == scenario_seed(7, 0)
    assert scenario_seed(7, 0) != scenario_seed(7, 1)


def test_suite_independent_of_workers(config):
    corpus = [sc for sc in default_corpus() if sc.dim == 1][:3]
    serial = run_suite(corpus, config, workers=1, verbose=False)
    threaded = run_suite(corpus, config, workers=3, verbose=False)
    # json text compares NaN entries as equal
    assert json.dumps([r.to_dict() for r in serial.reports], default=str) == \
        json.dumps([r.to_dict() for r in threaded.reports], default=str)


def test_summary_and_report_files(config, tmp_path):
    result = run_suite([load_scenario(SCENARIOS / "interval_d1.json")], config, verbose=False)
    summary = result.summary()
    assert summary['scenarios'] == 1
    assert summary['reports'] == len(result.reports)
    assert sum(summary['verdicts'].values()) == len(result.reports)

    header = run_header(config, {'scenarios': 1})
    path = write_reports(result, tmp_path, header, 'json')
    payload = json.loads(path.read_text(encoding='utf-8'))
    assert payload['header']['seed'] == config['engine']['seed']
    assert len(payload['reports']) == len(result.reports)

    path = write_reports(result, tmp_path, header, 'csv')
    lines = path.read_text(encoding='utf-8').splitlines()
    body = [line for line in lines if not line.startswith('#')]
    assert any(line.startswith('# seed: ') for line in lines)
    assert body[0] == ",".join(CSV_COLUMNS)
    assert len(body) == len(result.reports) + 1

    with pytest.raises(ValueError):
        write_reports(result, tmp_path, header, 'xml')


def test_sweep_segment(disk_ctx):
    sweep = sweep_segment(disk_ctx, [0.0, 0.0], [0.8, 0.0], steps=9)
    # 0.5 is an atom and is skipped
    assert len(sweep.rows) == 8
    assert any("skipped atom" in n for n in sweep.notes)
    assert sweep.r_x == pytest.approx(0.5 * disk_ctx.diam.lower)
    assert all(row[8] == PASS for row in sweep.rows)


def test_sweep_degenerate_segment(disk_ctx):
    sweep = sweep_segment(disk_ctx, [0.2, 0.1], [0.2, 0.1])
    assert len(sweep.rows) == 1
    assert sweep.rows[0][0] == pytest.approx(math.hypot(0.2, 0.1))


def test_sweep_rejects_segment_leaving_domain(disk_ctx):
    with pytest.raises(DomainError):
        sweep_segment(disk_ctx, [0.0, 0.0], [1.0, 0.0])
