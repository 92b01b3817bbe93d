"""
Inequality Checks
Evaluates both sides of every lower bound on a scenario and emits
MarginReports.

Each uncertain input fills a slot and is consumed from one fixed side, the
side under which the assembled bound is still implied by the stated result:
Harnack distances, punctured suprema, boundary suprema and diameters enter
as upper ends; R and đ as certified lower ends. A slot whose required side
is unavailable makes the check inconclusive instead of approximating it.

margin >= 0 means the inequality holds: lhs - rhs for lower bounds
(relation '>='), rhs - lhs for upper bounds (relation '<=').
"""

import math
import numpy as np
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from src.engine.scenario import Scenario
from src.geometry.domains import (
    COVER_CELLS, Ball, Domain, GeoValue, Interval, boundary_sample, diameter, gap, inradius_at
)
from src.geometry.kernel import as_point, ext_sub, kernel_k
from src.geometry.sphere import sphere_points
from src.potential.green import (
    EXACT as EXACT_ESTIMATE, QUADRATURE,
    best_harmonic_majorant, green_potential, green_profile, green_upper_bound,
    poisson_jensen_residual
)
from src.potential.harnack import (
    EXACT, ChainSettings, HarnackValue, certified_distance, certified_distances,
    punctured_sup_distance
)
from src.potential.hausdorff import (
    FINEST_LEVEL, R_MIN, Gauge, besicovitch_cover, content_upper_bound, n0h_integral
)
from src.potential.riesz import AtomicMeasure, integrated_counting, radial_counting, radial_profile, restrict
from src.testbed.functions import BoundarySup, TestFunction, sup_on_boundary
from src.utils.config_loader import get_default_config
from src.utils.errors import DomainError
from src.utils.logger import get_logger

logger = get_logger(__name__)

PASS = 'pass'
PASS_WITH_MC = 'pass_with_mc'
INCONCLUSIVE = 'inconclusive'
FAIL = 'fail'
REJECTED = 'rejected'
VERDICTS = (PASS, PASS_WITH_MC, INCONCLUSIVE, FAIL, REJECTED)

_SEVERITY = {PASS: 0, PASS_WITH_MC: 1, REJECTED: 2, INCONCLUSIVE: 3, FAIL: 4}


@dataclass(frozen=True)
class SlotValue:
    """An input as consumed by a check, with the side it was taken from."""
    name: str
    value: float
    side: str
    refused: Optional[str] = None
    violation: Optional[str] = None


@dataclass
class MarginReport:
    """Both sides of one inequality, the margin and the verdict."""
    check: str
    scenario: str
    lhs: float
    rhs: float
    relation: str
    margin: float
    verdict: str
    half_width: float = 0.0
    slots: Dict[str, str] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    point: Optional[List[float]] = None
    shift: float = 0.0
    seed: Optional[int] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.verdict == FAIL

    def to_dict(self) -> Dict[str, Any]:
        def num(v):
            if v is None or (isinstance(v, float) and math.isnan(v)):
                return None
            return float(v)
        return {
            "check": self.check,
            "scenario": self.scenario,
            "lhs": num(self.lhs),
            "relation": self.relation,
            "rhs": num(self.rhs),
            "margin": num(self.margin),
            "half_width": num(self.half_width),
            "verdict": self.verdict,
            "slots": dict(self.slots),
            "notes": list(self.notes),
            "point": self.point,
            "shift": self.shift,
            "seed": self.seed,
            "extra": dict(self.extra),
        }


# ---------------------------------------------------------------------------
# Verdicts and slots
# ---------------------------------------------------------------------------

def decide_verdict(margin: float, half_width: float, tol: float, sigma: float) -> str:
    """
    pass when margin >= -tol and no input is stochastic; pass_with_mc when the
    margin is within tol + sigma * half_width; fail otherwise.
    """
    if math.isnan(margin):
        return INCONCLUSIVE
    if half_width > 0:
        return PASS_WITH_MC if margin >= -tol - sigma * half_width else FAIL
    return PASS if margin >= -tol else FAIL


def upper_slot(name: str, value: float, exact: bool, certified_lower: float,
               inject: Optional[Dict[str, Dict[str, Any]]] = None, tol: float = 1e-9) -> SlotValue:
    """
    Fill a slot that needs an upper end.

    An injected value replaces the engine's own; a declared upper (or exact)
    value below the engine's certified lower value is recorded as a violation.
    """
    inject = inject or {}
    if name in inject:
        spec = inject[name]
        side = spec['side']
        v = float(spec['value'])
        if side == 'lower':
            return SlotValue(name, v, 'injected_lower',
                             refused=f"injected {name} is a lower value; the slot needs an upper end")
        violation = None
        if v < certified_lower - tol * max(1.0, abs(certified_lower)):
            violation = (f"declared {side} value {v:.6g} for {name} is below the certified "
                         f"lower value {certified_lower:.6g}")
        return SlotValue(name, v, f"injected_{side}", violation=violation)
    if not math.isfinite(value):
        return SlotValue(name, value, 'upper', refused=f"{name} has no certified upper end")
    return SlotValue(name, float(value), 'exact' if exact else 'upper')


def make_report(check: str, scenario: str, lhs: float, rhs: float, relation: str,
                tol: float, sigma: float, half_width: float = 0.0,
                slots: Sequence[SlotValue] = (), notes: Sequence[str] = (),
                point=None, shift: float = 0.0, seed: Optional[int] = None,
                extra: Optional[Dict[str, Any]] = None, vacuous: Optional[str] = None,
                absolute_tol: bool = False) -> MarginReport:
    """
    Assemble a MarginReport.

    Violated slots force fail, refused slots force inconclusive, a vacuous
    inequality (e.g. lhs = -inf at an atom of a lower bound) passes.
    tol is relative to max(1, |lhs|, |rhs|) unless absolute_tol is set.
    """
    notes = list(notes)
    slot_sides = {s.name: s.side for s in slots}
    violations = [s.violation for s in slots if s.violation]
    refusals = [s.refused for s in slots if s.refused]
    notes.extend(violations)
    notes.extend(refusals)

    margin = math.nan
    if not math.isnan(lhs) and not math.isnan(rhs):
        try:
            margin = ext_sub(lhs, rhs) if relation == '>=' else ext_sub(rhs, lhs)
        except ArithmeticError:
            margin = math.nan
        if relation == '==':
            margin = -abs(ext_sub(lhs, rhs))

    if violations:
        verdict = FAIL
    elif refusals:
        verdict = INCONCLUSIVE
    elif vacuous:
        notes.append(vacuous)
        verdict = PASS
    else:
        scale = max([1.0] + [abs(v) for v in (lhs, rhs) if math.isfinite(v)])
        verdict = decide_verdict(margin, half_width, tol if absolute_tol else tol * scale, sigma)

    return MarginReport(
        check=check, scenario=scenario, lhs=lhs, rhs=rhs, relation=relation,
        margin=margin, verdict=verdict, half_width=float(half_width), slots=slot_sides,
        notes=notes, point=None if point is None else np.asarray(point, dtype=float).tolist(),
        shift=shift, seed=seed, extra=dict(extra or {}),
    )


def worst_report(reports: List[MarginReport], extra: Optional[Dict[str, Any]] = None) -> MarginReport:
    """The report with the most severe verdict, then the smallest margin."""
    if not reports:
        raise ValueError("no reports to aggregate")

    def key(rep):
        m = rep.margin if not math.isnan(rep.margin) else -math.inf
        return (-_SEVERITY[rep.verdict], m)
    worst = min(reports, key=key)
    worst.extra.update(extra or {})
    worst.extra['points'] = len(reports)
    counts = {}
    for rep in reports:
        counts[rep.verdict] = counts.get(rep.verdict, 0) + 1
    worst.extra['verdicts'] = counts
    return worst


def is_harmonic_on(h: TestFunction, D: Domain) -> bool:
    """True when h has no Riesz mass (and no pole) in closure(D)."""
    if len(restrict(h.riesz(), D)):
        return False
    if h.kind == 'poisson_sum':
        return all(D.signed_distance(as_point(p['loc'], h.dim)) > D.eps_geo
                   for p in h.params.get('poles', []))
    return True


# ---------------------------------------------------------------------------
# Scenario context
# ---------------------------------------------------------------------------

class ScenarioContext:
    """
    Lazily computed inputs shared by the checks of one scenario.

    Every estimator draws its seed from the scenario seed, so a context is
    deterministic for a fixed (scenario, config, seed).
    """

    def __init__(self, scenario: Scenario, config: Optional[Dict[str, Any]] = None,
                 seed: Optional[int] = None):
        self.scenario = scenario
        self.config = scenario.configure(config or get_default_config())
        engine = self.config['engine']
        self.seed = int(seed if seed is not None else engine['seed'])
        self.tol = float(engine['tol_closed_form'])
        self.pj_tol = float(engine.get('pj_tolerance', 1e-3))
        self.sigma = float(self.config['green']['confidence_sigma'])
        self.samples = int(self.config['green']['samples'])
        self.boundary_samples = int(engine.get('boundary_samples', 256))
        self.substitute_sup = bool(engine.get('substitute_sup', False))
        self.settings = ChainSettings.from_config(self.config)
        self.d = scenario.dim

    # -- geometry ----------------------------------------------------------

    @cached_property
    def measure(self) -> AtomicMeasure:
        """Riesz measure of u restricted to closure(D)."""
        return restrict(self.scenario.function.riesz(), self.scenario.inner)

    @cached_property
    def diam(self) -> GeoValue:
        n = int(self.config['geometry'].get('diameter_samples', 2000))
        return diameter(self.scenario.inner, n, self.seed)

    @cached_property
    def inradius(self) -> float:
        return inradius_at(self.scenario.inner, self.scenario.base_point)

    @cached_property
    def gap(self) -> GeoValue:
        geometry = self.config['geometry']
        n = int(geometry.get('gap_samples', 2000))
        cells = int(geometry.get('cover_cells', COVER_CELLS))
        return gap(self.scenario.pair, n, self.seed + 1, max_cells=cells)

    @cached_property
    def annulus(self) -> float:
        """k(R + đ) - k(R) with the certified lower ends of R and đ."""
        R = self.inradius
        return float(kernel_k(self.d, R + self.gap.lower) - kernel_k(self.d, R))

    # -- suprema and Harnack inputs ----------------------------------------

    @cached_property
    def sup_inner(self) -> BoundarySup:
        return sup_on_boundary(self.scenario.function, self.scenario.inner,
                               self.boundary_samples, self.seed + 2)

    @cached_property
    def sup_outer(self) -> BoundarySup:
        return sup_on_boundary(self.scenario.function, self.scenario.outer,
                               self.boundary_samples, self.seed + 3)

    @cached_property
    def distances(self) -> List[HarnackValue]:
        return certified_distances(self.scenario.inner, self.scenario.base_point,
                                   self.scenario.points, self.settings)

    @cached_property
    def punctured(self) -> HarnackValue:
        s = self.settings
        return punctured_sup_distance(self.scenario.pair, self.inradius, s.mesh, s.n_boundary,
                                      s.n_sphere, s.max_edge_length, s.eps_chain, self.seed + 4)

    def distance_at(self, x) -> HarnackValue:
        """Certified dist^D(o, x), reusing the evaluation-set values."""
        sc = self.scenario
        x = as_point(x, self.d)
        if not sc.inner.contains(x):
            raise DomainError(f"point {x.tolist()} is not inside {sc.inner!r}")
        hits = np.nonzero(np.all(sc.points == x, axis=1))[0] if len(sc.points) else []
        if len(hits):
            return self.distances[int(hits[0])]
        return certified_distance(sc.inner, sc.base_point, x, self.settings)

    # -- slots -------------------------------------------------------------

    def _inject(self) -> Dict[str, Dict[str, Any]]:
        return self.scenario.inject

    def slot_sup_inner(self) -> SlotValue:
        bs = self.sup_inner
        return upper_slot('sup_boundary_D', bs.upper, bs.kind == 'exact', bs.lower,
                          self._inject(), self.tol)

    def slot_sup_outer(self) -> SlotValue:
        bs = self.sup_outer
        return upper_slot('sup_boundary_G', bs.upper, bs.kind == 'exact', bs.lower,
                          self._inject(), self.tol)

    def slot_distance(self, hv: HarnackValue) -> SlotValue:
        slot = upper_slot('harnack_distance', hv.upper, hv.kind == EXACT, hv.lower,
                          self._inject(), self.tol)
        if slot.refused and hv.diagnostic and 'harnack_distance' not in self._inject():
            return SlotValue(slot.name, slot.value, slot.side, f"{slot.refused} ({hv.diagnostic})")
        return slot

    def slot_punctured(self) -> SlotValue:
        hv = self.punctured
        slot = upper_slot('punctured_sup', hv.upper, hv.kind == EXACT, hv.lower,
                          self._inject(), self.tol)
        if slot.refused and hv.diagnostic and 'punctured_sup' not in self._inject():
            return SlotValue(slot.name, slot.value, slot.side, f"{slot.refused} ({hv.diagnostic})")
        return slot

    def slot_diameter(self) -> SlotValue:
        return SlotValue('diameter', self.diam.upper, 'exact' if self.diam.is_exact else 'upper')

    def slot_nesting(self) -> SlotValue:
        exact = isinstance(self.scenario.inner, (Ball, Interval)) and self.gap.is_exact
        side = 'exact' if exact else 'lower'
        if not self.annulus > 0:
            return SlotValue('R_and_gap', self.annulus, side,
                             refused=f"certified lower end of the gap is {self.gap.lower:g}")
        return SlotValue('R_and_gap', self.annulus, side)

    # -- reports -----------------------------------------------------------

    def report(self, check: str, lhs: float, rhs: float, relation: str,
               tol: Optional[float] = None, **kwargs) -> MarginReport:
        return make_report(check, self.scenario.name, lhs, rhs, relation,
                           self.tol if tol is None else tol, self.sigma,
                           shift=self.scenario.function.shift, seed=self.seed, **kwargs)

    def sample_indices(self, count: int, skip_atoms: bool = True) -> List[int]:
        """Up to count evenly spread evaluation points other than o (and atoms)."""
        sc = self.scenario
        mu = sc.function.riesz()
        keep = [i for i, p in enumerate(sc.points)
                if not np.array_equal(p, sc.base_point)
                and not (skip_atoms and mu.has_atom_at(p))]
        if len(keep) <= count:
            return keep
        picks = np.linspace(0, len(keep) - 1, count).round().astype(int)
        return [keep[i] for i in sorted(set(picks.tolist()))]


def as_context(sc: Union[Scenario, ScenarioContext], config: Optional[Dict[str, Any]] = None,
               seed: Optional[int] = None) -> ScenarioContext:
    if isinstance(sc, ScenarioContext):
        return sc
    return ScenarioContext(sc, config, seed)


# ---------------------------------------------------------------------------
# Harnack inequality for harmonic functions
# ---------------------------------------------------------------------------

def check_prop21(h: TestFunction, Dm: Domain, o, S: np.ndarray,
                 config: Optional[Dict[str, Any]] = None, scenario: str = 'adhoc',
                 seed: int = 0) -> MarginReport:
    """
    inf_S h - h(o) >= -(sup_S dist^Dm(o, ·) - 1)(sup_Dm h - h(o)).

    Raises:
        DomainError: If h is not harmonic on closure(Dm)
    """
    config = config or get_default_config()
    o = as_point(o, Dm.dim)
    S = np.asarray(S, dtype=float).reshape(-1, Dm.dim)
    if not is_harmonic_on(h, Dm):
        raise DomainError(f"{h!r} is not harmonic on {Dm!r}")
    tol = float(config['engine']['tol_closed_form'])
    sigma = float(config['green']['confidence_sigma'])
    n = int(config['engine'].get('boundary_samples', 256))

    h0 = float(h.evaluate(o))
    lhs = float(np.min(h.evaluate(S))) - h0
    dists = certified_distances(Dm, o, S, ChainSettings.from_config(config))
    worst = max(dists, key=lambda v: v.upper)
    dist = upper_slot('harnack_distance', worst.upper, all(v.kind == EXACT for v in dists),
                      max(v.lower for v in dists), tol=tol)
    bs = sup_on_boundary(h, Dm, n, seed)
    sup = upper_slot('sup_boundary_D', bs.upper, bs.kind == 'exact', bs.lower, tol=tol)
    rhs = math.nan
    if not (dist.refused or sup.refused):
        rhs = -(dist.value - 1.0) * (sup.value - h0)
    return make_report('prop21', scenario, lhs, rhs, '>=', tol, sigma, slots=[dist, sup],
                       shift=h.shift, seed=seed, extra={'points': len(S)})


# ---------------------------------------------------------------------------
# Pointwise lower bounds
# ---------------------------------------------------------------------------

def thm1_report(ctx: ScenarioContext, x: np.ndarray, hv: HarnackValue,
                r_x: Optional[float] = None) -> MarginReport:
    u = ctx.scenario.function
    check = 'thm1_pointwise' if r_x is None else 'thm1_refined'
    lhs = float(u.evaluate(x))
    vacuous = "x is an atom of the Riesz measure, u(x) = -inf" if lhs == -math.inf else None

    dist = ctx.slot_distance(hv)
    sup_d = ctx.slot_sup_inner()
    diam = ctx.slot_diameter()
    slots = [dist, sup_d, diam]
    notes = []
    extra = {}

    if r_x is None:
        if not any(s.refused for s in slots) and not vacuous:
            N = integrated_counting(ctx.measure, x, diam.value)
            rhs = -(dist.value - 1.0) * sup_d.value - N
        else:
            rhs = math.nan
        return ctx.report(check, lhs, rhs, '>=', slots=slots, point=x, vacuous=vacuous)

    if not 0 < r_x <= diam.value:
        raise DomainError(f"r_x must lie in (0, diam D], got {r_x}")
    sup_g = ctx.slot_sup_outer()
    P = ctx.slot_punctured()
    slots += [sup_g, P, ctx.slot_nesting()]
    extra['r_x'] = r_x
    if ctx.substitute_sup:
        sup_d = SlotValue('sup_boundary_D', sup_g.value, sup_g.side, sup_g.refused, sup_g.violation)
        notes.append("sup over ∂G substituted for sup over ∂D")
    rhs = math.nan
    if not any(s.refused for s in slots) and not vacuous:
        coef = (kernel_k(ctx.d, diam.value) - kernel_k(ctx.d, r_x)) / ctx.annulus
        N = integrated_counting(ctx.measure, x, r_x)
        rhs = -(dist.value - 1.0) * sup_d.value - coef * P.value * sup_g.value - N
    return ctx.report(check, lhs, rhs, '>=', slots=slots, notes=notes, point=x,
                      extra=extra, vacuous=vacuous)


def check_thm1_pointwise(sc: Union[Scenario, ScenarioContext], x,
                         config: Optional[Dict[str, Any]] = None) -> MarginReport:
    """u(x) >= -(dist^D(o, x) - 1) sup_∂D u - N_x^Δ(diam D) at one point x ∈ D."""
    ctx = as_context(sc, config)
    x = as_point(x, ctx.d)
    return thm1_report(ctx, x, ctx.distance_at(x))


def check_thm1_refined(sc: Union[Scenario, ScenarioContext], x, r_x: float,
                       config: Optional[Dict[str, Any]] = None) -> MarginReport:
    """
    The refined bound at x with counting radius r_x ∈ (0, diam D].

    Adds the punctured Harnack term weighted by (k(diam D) - k(r_x)) /
    (k(R + đ) - k(R)) and sup_∂G u, and counts Riesz mass only up to r_x.
    """
    ctx = as_context(sc, config)
    if ctx.scenario.outer is None:
        raise DomainError("the refined bound needs an outer domain G")
    x = as_point(x, ctx.d)
    return thm1_report(ctx, x, ctx.distance_at(x), float(r_x))


def thm1_grid(ctx: ScenarioContext, r_x: Optional[float] = None) -> MarginReport:
    """Worst report of the pointwise (r_x None) or refined bound over the evaluation set."""
    sc = ctx.scenario
    reports = [thm1_report(ctx, x, hv, r_x) for x, hv in zip(sc.points, ctx.distances)]
    vacuous = sum(1 for rep in reports if rep.lhs == -math.inf)
    return worst_report(reports, {'atoms_skipped': vacuous})


def thm1_refined_grid(ctx: ScenarioContext) -> List[MarginReport]:
    """One worst-point report per r_x = fraction * (lower) diam D."""
    fractions = ctx.config['engine']['r_x_fractions']
    out = []
    for f in fractions:
        rep = thm1_grid(ctx, float(f) * ctx.diam.lower)
        rep.extra['r_x_fraction'] = float(f)
        out.append(rep)
    return out


# ---------------------------------------------------------------------------
# Exceptional set
# ---------------------------------------------------------------------------

@dataclass
class ExceptionalSet:
    """Points of S where Riesz mass beats the gauge at some radius t_x ∈ (0, r]."""
    points: np.ndarray
    radii: np.ndarray
    mask: np.ndarray
    threshold: float

    def __len__(self) -> int:
        return len(self.points)


def membership_radius(mu: AtomicMeasure, x, h: Gauge, r: float, M: float,
                      iterations: int = 80) -> Optional[float]:
    """
    Largest t ∈ (0, r] with μ_x^rad(t) >= h(t) M, or None.

    μ_x^rad is a right-continuous step function and h is nondecreasing, so
    each constant piece [a_j, a_{j+1}) is searched by bisection.
    """
    profile = radial_profile(mu, x)
    starts = [0.0] + list(profile.jump_radii)
    counts = [0.0] + list(profile.cumulative_masses)
    ends = starts[1:] + [math.inf]

    def holds(t, c):
        return t > 0 and c >= h(t) * M

    for a, b, c in reversed(list(zip(starts, ends, counts))):
        if a > r:
            continue
        b = min(b, r)
        if b <= 0:
            continue
        if holds(b, c):
            return b
        lo, hi = a, b
        if a > 0 and not holds(a, c):
            continue
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            if holds(mid, c):
                lo = mid
            else:
                hi = mid
        if lo > 0:
            return lo
    return None


def exceptional_set(mu: AtomicMeasure, S: np.ndarray, h: Gauge, r: float, M: float,
                    guard: int = 64) -> ExceptionalSet:
    """
    E = {x ∈ S : μ_x^rad(t) >= h(t) M for some t ∈ (0, r]}.

    The jump radii decide membership; a guard grid of extra radii is also
    tested and any point it adds is logged.
    """
    S = np.asarray(S, dtype=float).reshape(-1, mu.dim)
    guard_t = r * np.arange(1, guard + 1) / guard
    mask = np.zeros(len(S), dtype=bool)
    radii = np.zeros(len(S))
    for i, x in enumerate(S):
        t = membership_radius(mu, x, h, r, M)
        if t is None:
            hits = [g for g in guard_t if radial_counting(mu, x, g) >= h(g) * M]
            if hits:
                logger.warning(f"guard radius adds {x.tolist()} to the exceptional set")
                t = max(hits)
        if t is not None:
            mask[i] = True
            radii[i] = t
    return ExceptionalSet(S[mask], radii[mask], mask, M)


# ---------------------------------------------------------------------------
# Bounds outside an exceptional set
# ---------------------------------------------------------------------------

def _rejected(ctx: ScenarioContext, check: str, relation: str, reason: str) -> MarginReport:
    return MarginReport(check=check, scenario=ctx.scenario.name, lhs=math.nan, rhs=math.nan,
                        relation=relation, margin=math.nan, verdict=REJECTED, notes=[reason],
                        shift=ctx.scenario.function.shift, seed=ctx.seed)


def check_cor1(sc: Union[Scenario, ScenarioContext], config: Optional[Dict[str, Any]] = None
               ) -> Tuple[MarginReport, MarginReport, ExceptionalSet]:
    """
    Lower bound outside the exceptional set E and the h-content bound on E.

    Returns:
        (report for inf over S minus E, report for the content of E, E)
    """
    ctx = as_context(sc, config)
    sc = ctx.scenario
    d = ctx.d
    empty = ExceptionalSet(np.zeros((0, d)), np.zeros(0), np.zeros(len(sc.points), dtype=bool), math.nan)
    if sc.outer is None or sc.gauge is None or sc.r is None:
        raise DomainError("the exceptional-set bounds need an outer domain, a gauge and r")
    h, r = sc.gauge, sc.r

    reason = None
    if ctx.sup_outer.value <= 0:
        reason = "sup of u over ∂G is not positive; the exceptional set is undefined"
    elif r > ctx.diam.upper:
        reason = f"r = {r:g} exceeds diam D = {ctx.diam.upper:g}"
    n0h = n0h_integral(h, r, d) if reason is None else math.nan
    if reason is None and math.isinf(n0h):
        reason = "N_0^h(r) is infinite for this gauge"
    if reason:
        logger.warning(f"{sc.name}: {reason}")
        return _rejected(ctx, 'cor1_bound', '>=', reason), _rejected(ctx, 'cor1_content', '<=', reason), empty

    sup_g = ctx.slot_sup_outer()
    P = ctx.slot_punctured()
    diam = ctx.slot_diameter()
    slots = [sup_g, P, diam, ctx.slot_nesting()]
    if sup_g.refused:
        return (ctx.report('cor1_bound', math.nan, math.nan, '>=', slots=slots),
                ctx.report('cor1_content', math.nan, math.nan, '<=', slots=slots), empty)

    M = sup_g.value
    guard = int(ctx.config['hausdorff'].get('guard_grid', 64))
    E = exceptional_set(ctx.measure, sc.points, h, r, M, guard)
    reading = "membership uses the radial counting function of the Riesz measure restricted to closure(D)"

    # bound on S minus E
    dist_slots = [ctx.slot_distance(hv) for hv in ctx.distances]
    dist = max(dist_slots, key=lambda s: (bool(s.violation), bool(s.refused), s.value))
    rest = sc.points[~E.mask]
    lhs = float(np.min(sc.function.evaluate(rest))) if len(rest) else math.inf
    vacuous = "every point of S lies in E" if not len(rest) else None
    rhs = math.nan
    if not any(s.refused for s in slots + [dist]):
        coef = (kernel_k(d, diam.value) - kernel_k(d, r)) / ctx.annulus
        rhs = -(dist.value - 1.0 + coef * P.value + n0h) * M
    bound = ctx.report('cor1_bound', lhs, rhs, '>=', slots=slots + [dist], notes=[reading],
                       vacuous=vacuous, extra={'E_size': len(E), 'r': r, 'N0h': n0h})

    # content of E
    r_min = float(ctx.config['hausdorff'].get('r_min', R_MIN))
    finest = int(ctx.config['hausdorff'].get('finest_level', FINEST_LEVEL))
    dyadic = content_upper_bound(E.points, h, r, r_min, finest)
    witness = besicovitch_cover(E.points, E.radii, d, h)
    lhs = min(dyadic, witness.total_gauge) if len(E) else 0.0
    nest = ctx.slot_nesting()
    rhs = 5.0 ** d * P.value / ctx.annulus if not (P.refused or nest.refused) else math.nan
    content = ctx.report('cor1_content', lhs, rhs, '<=', slots=[P, nest], notes=[reading],
                         extra={'E_size': len(E), 'dyadic_cover': dyadic,
                                'besicovitch_cover': witness.total_gauge,
                                'multiplicity': witness.multiplicity})
    if content.verdict == FAIL and not P.violation:
        content.verdict = INCONCLUSIVE
        content.notes.append("cover value exceeds the bound; the content itself may not")
    return bound, content, E


# ---------------------------------------------------------------------------
# Riesz mass, Green function bounds, Poisson-Jensen
# ---------------------------------------------------------------------------

def check_prop51(sc: Union[Scenario, ScenarioContext],
                 config: Optional[Dict[str, Any]] = None) -> MarginReport:
    """Δ_u(closure D) <= P / (k(R + đ) - k(R)) * (H_u^G(o) - u(o))."""
    ctx = as_context(sc, config)
    sc = ctx.scenario
    if sc.outer is None:
        raise DomainError("the Riesz mass bound needs an outer domain G")
    lhs = ctx.measure.total_mass
    P = ctx.slot_punctured()
    slots = [P, ctx.slot_nesting()]
    if any(s.refused for s in slots):
        return ctx.report('prop51', lhs, math.nan, '<=', slots=slots)
    H = best_harmonic_majorant(sc.function, sc.outer, sc.base_point, ctx.samples,
                               ctx.seed + 5, ctx.config)
    factor = P.value / ctx.annulus
    rhs = factor * (H.value - float(sc.function.evaluate(sc.base_point)))
    return ctx.report('prop51', lhs, rhs, '<=', half_width=factor * H.half_width, slots=slots,
                      extra={'harmonic_majorant': H.value, 'estimate': H.kind})


def _boundary_radius_bound(D: Domain, o: np.ndarray) -> Tuple[float, bool]:
    """(ρ, exact) with ρ >= max over ∂D of |y - o|."""
    if isinstance(D, Ball):
        return float(np.linalg.norm(D.center - o)) + D.radius, True
    if isinstance(D, Interval):
        return max(abs(D.a - o[0]), abs(D.b - o[0])), True
    lo, hi = D.bounding_box()
    corners = np.array(np.meshgrid(*zip(lo, hi), indexing='ij')).reshape(D.dim, -1).T
    return float(np.max(np.linalg.norm(corners - o, axis=1))), False


def _boundary_points(D: Domain, n: int, seed: int) -> np.ndarray:
    if isinstance(D, Interval):
        return np.array([[D.a], [D.b]])
    if isinstance(D, Ball):
        return sphere_points(D.center, D.radius, n, D.dim)
    return boundary_sample(D, n, seed)


def check_prop41(sc: Union[Scenario, ScenarioContext],
                 config: Optional[Dict[str, Any]] = None) -> MarginReport:
    """
    inf over ∂D of g_o^G >= (k(R + đ) - k(R)) / P.

    When G is a ball centred at o the left side is k(r_G) - k(ρ) with ρ the
    largest distance from o to ∂D (exact for balls and intervals, a lower
    value from the bounding box otherwise); else it is the sampled minimum of
    the Green profile.
    """
    ctx = as_context(sc, config)
    sc = ctx.scenario
    G, D, o = sc.outer, sc.inner, sc.base_point
    if G is None:
        raise DomainError("the Green lower bound needs an outer domain G")
    P = ctx.slot_punctured()
    slots = [P, ctx.slot_nesting()]
    half_width = 0.0
    notes = []

    center = G.center if isinstance(G, (Ball, Interval)) else None
    rho, exact = _boundary_radius_bound(D, o)
    if center is not None and np.array_equal(center, o) and rho < G.radius:
        lhs = float(kernel_k(ctx.d, G.radius) - kernel_k(ctx.d, rho))
        slots.append(SlotValue('green_inf', lhs, 'exact' if exact else 'lower'))
    else:
        pts = _boundary_points(D, ctx.boundary_samples, ctx.seed + 6)
        profile = green_profile(G, o, pts, ctx.samples, ctx.seed + 7, ctx.config)
        k = int(np.argmin([g.value for g in profile]))
        lhs, half_width = profile[k].value, profile[k].half_width
        slots.append(SlotValue('green_inf', lhs, profile[k].kind))
        notes.append(f"infimum over {len(pts)} boundary points")
    rhs = ctx.annulus / P.value if not any(s.refused for s in slots) else math.nan
    return ctx.report('prop41', lhs, rhs, '>=', half_width=half_width, slots=slots, notes=notes)


def check_prop33(sc: Union[Scenario, ScenarioContext], count: int = 8,
                 config: Optional[Dict[str, Any]] = None) -> MarginReport:
    """g_o^D(y) <= k(diam D) - k(|y - o|) at up to count evaluation points."""
    ctx = as_context(sc, config)
    sc = ctx.scenario
    idx = ctx.sample_indices(count, skip_atoms=False)
    diam = ctx.slot_diameter()
    if not idx:
        return ctx.report('prop33', 0.0, 0.0, '<=', slots=[diam],
                          vacuous="no evaluation point other than o")
    ys = sc.points[idx]
    values = green_profile(sc.inner, sc.base_point, ys, ctx.samples, ctx.seed + 8, ctx.config)
    reports = [
        ctx.report('prop33', g.value, float(green_upper_bound(sc.inner, sc.base_point, y, diam.value)),
                   '<=', half_width=g.half_width, slots=[diam], point=y,
                   extra={'estimate': g.kind, 'clamped': g.clamped})
        for y, g in zip(ys, values)
    ]
    return worst_report(reports)


def check_prop34(sc: Union[Scenario, ScenarioContext], count: int = 3,
                 config: Optional[Dict[str, Any]] = None) -> MarginReport:
    """Green potential of Δ_u at x is at most N_x^Δ(diam D), at o and count more points."""
    ctx = as_context(sc, config)
    sc = ctx.scenario
    diam = ctx.slot_diameter()
    xs = [sc.base_point] + [sc.points[i] for i in ctx.sample_indices(count)]
    reports = []
    for i, x in enumerate(xs):
        g = green_potential(sc.inner, x, ctx.measure, ctx.samples, ctx.seed + 9 + i, ctx.config)
        N = integrated_counting(ctx.measure, x, diam.value)
        reports.append(ctx.report('prop34', g.value, N, '<=', half_width=g.half_width,
                                  slots=[diam], point=x, extra={'estimate': g.kind}))
    return worst_report(reports)


def check_poisson_jensen(sc: Union[Scenario, ScenarioContext],
                         config: Optional[Dict[str, Any]] = None) -> MarginReport:
    """u(o) = H_u^D(o) - ∫ g_o^D dΔ_u up to the estimator's accuracy."""
    ctx = as_context(sc, config)
    sc = ctx.scenario
    res = poisson_jensen_residual(sc.function, sc.inner, sc.base_point, ctx.samples,
                                  ctx.seed + 20, ctx.config)
    extra = {'estimate': res.kind}
    if res.kind == QUADRATURE:
        return ctx.report('poisson_jensen', res.value, 0.0, '==', half_width=res.half_width,
                          tol=ctx.pj_tol, absolute_tol=True, extra=extra)
    if res.kind == EXACT_ESTIMATE:
        return ctx.report('poisson_jensen', res.value, 0.0, '==', extra=extra)
    return ctx.report('poisson_jensen', res.value, 0.0, '==', half_width=res.half_width, extra=extra)


# ---------------------------------------------------------------------------
# All applicable checks of a scenario
# ---------------------------------------------------------------------------

def harmonic_for(sc: Scenario) -> Optional[TestFunction]:
    """The harmonic function used by check_prop21, if the scenario has one."""
    if sc.harmonic is not None:
        return sc.harmonic
    if is_harmonic_on(sc.function, sc.inner):
        return sc.function
    return None


def applicable_checks(sc: Scenario) -> List[str]:
    out = []
    for name in sc.checks:
        if name == 'prop21' and harmonic_for(sc) is None:
            continue
        if name in ('thm1_refined', 'prop41', 'prop51') and sc.outer is None:
            continue
        if name == 'cor1' and (sc.outer is None or sc.gauge is None or sc.r is None):
            continue
        out.append(name)
    return out


def run_checks(ctx: ScenarioContext) -> List[MarginReport]:
    """Every applicable check of the scenario, in a fixed order."""
    sc = ctx.scenario
    reports: List[MarginReport] = []
    for name in applicable_checks(sc):
        logger.debug(f"{sc.name}: {name}")
        if name == 'prop21':
            h = harmonic_for(sc)
            reports.append(check_prop21(h, sc.inner, sc.base_point, sc.points, ctx.config,
                                        sc.name, ctx.seed))
        elif name == 'thm1_pointwise':
            reports.append(thm1_grid(ctx))
        elif name == 'thm1_refined':
            reports.extend(thm1_refined_grid(ctx))
        elif name == 'cor1':
            bound, content, _ = check_cor1(ctx)
            reports.extend([bound, content])
        elif name == 'prop41':
            reports.append(check_prop41(ctx))
        elif name == 'prop51':
            reports.append(check_prop51(ctx))
        elif name == 'prop33':
            reports.append(check_prop33(ctx))
        elif name == 'prop34':
            reports.append(check_prop34(ctx))
        elif name == 'poisson_jensen':
            reports.append(check_poisson_jensen(ctx))
    return reports
