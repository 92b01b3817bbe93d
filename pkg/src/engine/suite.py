"""
Suite Runner
Runs every applicable check on a list of scenarios and summarizes verdicts.
"""

import math
import time
import numpy as np
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from src.engine.checks import (
    FAIL, INCONCLUSIVE, VERDICTS, MarginReport, ScenarioContext, make_report, run_checks
)
from src.engine.scenario import Scenario
from src.utils.config_loader import get_default_config
from src.utils.errors import WalkError
from src.utils.logger import SuiteProgress, get_logger

logger = get_logger(__name__)


def scenario_seed(corpus_seed: int, index: int) -> int:
    """Seed of the index-th scenario, independent of scheduling."""
    return int(np.random.SeedSequence([int(corpus_seed), int(index)]).generate_state(1)[0])


@dataclass
class ScenarioResult:
    name: str
    seed: int
    reports: List[MarginReport]
    seconds: float


@dataclass
class SuiteResult:
    """Reports in scenario order plus the summary table."""
    results: List[ScenarioResult] = field(default_factory=list)
    config: Dict[str, Any] = field(default_factory=dict)

    @property
    def reports(self) -> List[MarginReport]:
        return [rep for res in self.results for rep in res.reports]

    @property
    def failed(self) -> bool:
        return any(rep.verdict == FAIL for rep in self.reports)

    def summary(self) -> Dict[str, Any]:
        """Verdict counts, worst margin per check and the Monte Carlo budget."""
        counts = {v: 0 for v in VERDICTS}
        worst: Dict[str, Dict[str, Any]] = {}
        for rep in self.reports:
            counts[rep.verdict] += 1
            if math.isnan(rep.margin):
                continue
            entry = worst.get(rep.check)
            if entry is None or rep.margin < entry['margin']:
                worst[rep.check] = {'margin': rep.margin, 'scenario': rep.scenario,
                                    'verdict': rep.verdict}
        stochastic = sum(1 for rep in self.reports if rep.half_width > 0)
        return {
            'scenarios': len(self.results),
            'reports': len(self.reports),
            'verdicts': counts,
            'worst_margin': worst,
            'mc_reports': stochastic,
            'samples_per_estimate': self.config.get('green', {}).get('samples'),
            'seconds': {res.name: round(res.seconds, 3) for res in self.results},
        }


def run_scenario(scenario: Scenario, config: Dict[str, Any], seed: int) -> ScenarioResult:
    """All applicable checks of one scenario."""
    start = time.perf_counter()
    ctx = ScenarioContext(scenario, config, seed)
    try:
        reports = run_checks(ctx)
    except WalkError as e:
        logger.warning(f"{scenario.name}: {e}")
        reports = [make_report('walk', scenario.name, math.nan, math.nan, '>=', ctx.tol, ctx.sigma,
                               notes=[str(e)], shift=scenario.function.shift, seed=seed)]
        reports[0].verdict = INCONCLUSIVE
    return ScenarioResult(scenario.name, seed, reports, time.perf_counter() - start)


def run_suite(scenarios: List[Scenario], config: Optional[Dict[str, Any]] = None,
              workers: Optional[int] = None, verbose: bool = True) -> SuiteResult:
    """
    Run the corpus.

    Args:
        scenarios: Scenarios in corpus order
        config: Configuration (defaults to get_default_config())
        workers: Scenarios checked concurrently (default engine.workers)
        verbose: Log one progress line per scenario

    Returns:
        SuiteResult; identical for a fixed config regardless of workers
    """
    config = config or get_default_config()
    corpus_seed = int(config['engine']['seed'])
    workers = int(workers or config['engine'].get('workers', 1))
    progress = SuiteProgress(logger)
    seeds = [scenario_seed(corpus_seed, i) for i in range(len(scenarios))]

    if not scenarios:
        return SuiteResult([], config)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_scenario, sc, config, s) for sc, s in zip(scenarios, seeds)]
            results = [f.result() for f in futures]
    else:
        results = []
        for i, (sc, s) in enumerate(zip(scenarios, seeds), 1):
            if verbose:
                progress.scenario(i, len(scenarios), sc.name)
            results.append(run_scenario(sc, config, s))

    suite = SuiteResult(results, config)
    for res in results:
        for rep in res.reports:
            if rep.verdict == FAIL:
                progress.failure(rep)
    if verbose:
        counts = suite.summary()['verdicts']
        progress.tally(counts)
    return suite
