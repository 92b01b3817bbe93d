"""
Command-Line Interface
Scenario verification, ad-hoc queries and margin sweeps.

Usage:
    python -m src.pipeline.main verify
    python -m src.pipeline.main verify config/scenarios --format csv
    python -m src.pipeline.main query kernel --d 2 --t 1
    python -m src.pipeline.main query harnack --ball r=1 --x 0.5 --d 2
    python -m src.pipeline.main query content --points pts.json --gauge p=2 --r 0.1 --d 2
    python -m src.pipeline.main sweep config/scenarios/disk_d2.json --from 0,0 --to 0.9,0

Exit codes: 0 all checks pass, 1 an inequality failed, 2 usage or schema error.
"""

import sys
import json
import argparse
import numpy as np
from pathlib import Path
from typing import Any, Dict, List, Optional

from src.engine.checks import ScenarioContext
from src.engine.corpus import default_corpus
from src.engine.report import run_header, rows_to_csv, write_reports, write_text
from src.engine.scenario import load_scenario, load_scenarios
from src.engine.suite import run_suite
from src.engine.sweep import COLUMN_SIDES, SWEEP_COLUMNS, sweep_segment
from src.geometry.domains import Ball, Interval, describe
from src.geometry.kernel import as_point, kernel_k
from src.potential.green import green_general
from src.potential.harnack import (
    ChainSettings, ball_center_distance, ball_pair_oracle, interval_distance
)
from src.potential.hausdorff import Gauge, content_upper_bound
from src.utils.config_loader import (
    apply_overrides, ensure_output_dirs, get_default_config, load_config, resolve_output_paths
)
from src.utils.errors import PotentialError
from src.utils.logger import setup_logger

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


# ---------------------------------------------------------------------------
# Argument helpers
# ---------------------------------------------------------------------------

def _floats(text: str) -> List[float]:
    return [float(v) for v in text.replace(';', ',').split(',') if v.strip()]


def _key_values(text: str) -> Dict[str, str]:
    """'r=1,B=0.5' -> {'r': '1', 'B': '0.5'}."""
    out = {}
    for part in text.split(','):
        if not part.strip():
            continue
        if '=' not in part:
            raise ValueError(f"expected key=value, got '{part}'")
        key, value = part.split('=', 1)
        out[key.strip()] = value.strip()
    return out


def _load_points(path: str, d: int) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Points file not found: {path}")
    if path.suffix == '.json':
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
        return np.asarray(data, dtype=float).reshape(-1, d)
    return np.loadtxt(path, ndmin=2).reshape(-1, d)


def _emit(payload: Dict[str, Any], fmt: str):
    if fmt == 'json':
        print(json.dumps(payload))
        return
    line = f"{payload['quantity']} = {payload['value']!r} ({payload['side']})"
    if payload.get('half_width'):
        line += f" ± {payload['half_width']:.3e}"
    print(line)


def _config_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    config = load_config(args.config) if args.config else _default_or_file()
    config = apply_overrides(config, seed=args.seed, samples=args.samples,
                             mesh=args.mesh, shell=args.shell)
    level = 'WARNING' if args.quiet else config['logging'].get('level', 'INFO')
    setup_logger("sbh", level, config['logging'].get('log_file'))
    return config


def _default_or_file() -> Dict[str, Any]:
    try:
        return load_config()
    except FileNotFoundError:
        return get_default_config()


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_verify(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    """Run the suite on scenario files (or the default corpus) and write reports."""
    scenarios = load_scenarios(args.paths) if args.paths else default_corpus()
    result = run_suite(scenarios, config, workers=args.workers, verbose=not args.quiet)

    out_dir = Path(args.out) if args.out else resolve_output_paths(config)['reports_dir']
    if not args.out:
        ensure_output_dirs(config)
    header = run_header(config, {'scenarios': len(scenarios)})
    path = write_reports(result, out_dir, header, args.format)
    summary = result.summary()
    if not args.quiet:
        print(f"Wrote {path}")
        print(", ".join(f"{v}: {n}" for v, n in summary['verdicts'].items() if n) or "no reports")
    return EXIT_FAIL if result.failed else EXIT_OK


def _query_domain(args: argparse.Namespace, d: int):
    if args.ball:
        spec = _key_values(args.ball)
        center = _floats(spec.get('c', ','.join(['0'] * d)))
        return Ball(as_point(center, d), float(spec['r']))
    if args.interval:
        a, b = _floats(args.interval)
        return Interval(a, b)
    raise ValueError("give a domain with --ball r=..[,c=x;y] or --interval a,b")


def cmd_query(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    """Print one quantity with its sidedness flag."""
    d = args.d
    kind = args.kind
    if kind == 'kernel':
        if args.t is None:
            raise ValueError("query kernel needs --t")
        payload = {'quantity': f"k_{d}({args.t:g})", 'value': float(kernel_k(d, args.t)), 'side': 'exact'}

    elif kind == 'harnack':
        D = _query_domain(args, d)
        x = _floats(args.x) if args.x else None
        if x is None:
            raise ValueError("query harnack needs --x")
        if isinstance(D, Interval):
            y = _floats(args.y)[0] if args.y else D.center[0]
            hv = interval_distance(D, x[0], y)
        elif args.y:
            hv = ball_pair_oracle(D, as_point(x, d), as_point(_floats(args.y), d),
                                  ChainSettings.from_config(config).oracle_samples, refine=True)
        else:
            hv = ball_center_distance(D, as_point(x, d))
        payload = {'quantity': 'harnack_distance', 'value': hv.value, 'side': hv.kind}

    elif kind == 'green':
        D = _query_domain(args, d)
        if not (args.x and args.y):
            raise ValueError("query green needs --x (pole) and --y")
        g = green_general(D, as_point(_floats(args.x), d), as_point(_floats(args.y), d),
                          int(config['green']['samples']), int(config['engine']['seed']), config)
        payload = {'quantity': 'green', 'value': g.value, 'side': g.kind, 'half_width': g.half_width}

    else:  # content
        if not (args.points and args.gauge and args.r):
            raise ValueError("query content needs --points, --gauge and --r")
        spec = _key_values(args.gauge)
        h = Gauge.power(float(spec['p']), float(spec.get('B', 1.0)))
        pts = _load_points(args.points, d)
        value = content_upper_bound(pts, h, args.r, float(config['hausdorff']['r_min']),
                                    int(config['hausdorff']['finest_level']))
        payload = {'quantity': 'h_content', 'value': value, 'side': 'upper'}

    _emit(payload, args.format)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    """Write plot data of both pointwise bounds along a segment."""
    scenario = load_scenario(args.scenario)
    ctx = ScenarioContext(scenario, config, int(config['engine']['seed']))
    a = _floats(args.start) if args.start else scenario.base_point.tolist()
    b = _floats(args.end) if args.end else a
    sweep = sweep_segment(ctx, a, b, args.steps, args.rx_fraction)

    header = run_header(config, {'scenario': scenario.name, 'domain': describe(scenario.inner),
                                 'from': a, 'to': b, 'r_x': sweep.r_x})
    text = rows_to_csv(SWEEP_COLUMNS, sweep.rows, header, list(COLUMN_SIDES) + sweep.notes)
    if args.out:
        path = write_text(Path(args.out), text)
        if not args.quiet:
            print(f"Wrote {path} ({len(sweep.rows)} rows)")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default=None,
                        help='Path to config file (default: config/config.yaml)')
    common.add_argument('--seed', type=int, default=None, help='Corpus seed (overrides config)')
    common.add_argument('--samples', type=int, default=None,
                        help='Quadrature nodes / walks per estimate (overrides config)')
    common.add_argument('--mesh', type=float, default=None, help='Chain-graph spacing (overrides config)')
    common.add_argument('--shell', type=float, default=None,
                        help='Walk-on-spheres shell factor (overrides config)')
    common.add_argument('--format', choices=('json', 'csv'), default='json', help='Output format')
    common.add_argument('--out', type=str, default=None, help='Output directory (verify) or file (sweep)')
    common.add_argument('--quiet', action='store_true', help='Suppress progress messages')

    parser = argparse.ArgumentParser(
        description='Subharmonic Bounds Verifier - certify lower bounds for subharmonic functions',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python -m src.pipeline.main verify                           # Default corpus
  python -m src.pipeline.main verify config/scenarios          # Every scenario file in a directory
  python -m src.pipeline.main query harnack --ball r=1 --x 0.5 --d 2
  python -m src.pipeline.main sweep config/scenarios/disk_d2.json --from 0,0 --to 0.9,0
        """
    )
    sub = parser.add_subparsers(dest='command', required=True)

    verify = sub.add_parser('verify', parents=[common], help='Run the inequality checks')
    verify.add_argument('paths', nargs='*', help='Scenario files or directories (default: built-in corpus)')
    verify.add_argument('--workers', type=int, default=None, help='Scenarios checked concurrently')
    verify.set_defaults(handler=cmd_verify)

    query = sub.add_parser('query', parents=[common], help='Print one quantity')
    query.add_argument('kind', choices=('kernel', 'harnack', 'green', 'content'))
    query.add_argument('--d', type=int, default=2, help='Dimension')
    query.add_argument('--t', type=float, default=None, help='Kernel argument')
    query.add_argument('--ball', type=str, default=None, help='Ball as r=R[,c=x;y;z]')
    query.add_argument('--interval', type=str, default=None, help='Interval as a,b')
    query.add_argument('--x', type=str, default=None, help='First point (comma separated)')
    query.add_argument('--y', type=str, default=None, help='Second point (comma separated)')
    query.add_argument('--points', type=str, default=None, help='Point file (.json or whitespace text)')
    query.add_argument('--gauge', type=str, default=None, help='Power gauge as p=P[,B=B]')
    query.add_argument('--r', type=float, default=None, help='Content radius')
    query.set_defaults(handler=cmd_query)

    sweep = sub.add_parser('sweep', parents=[common], help='Margins along a segment (plot data)')
    sweep.add_argument('scenario', help='Scenario file')
    sweep.add_argument('--from', dest='start', type=str, default=None, help='Segment start (default o)')
    sweep.add_argument('--to', dest='end', type=str, default=None, help='Segment end (default start)')
    sweep.add_argument('--steps', type=int, default=50, help='Points along the segment')
    sweep.add_argument('--rx-fraction', type=float, default=0.5,
                       help='r_x as a fraction of diam D for the refined bound')
    sweep.set_defaults(handler=cmd_sweep)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    try:
        config = _config_from_args(args)
        return args.handler(args, config)

    except FileNotFoundError as e:
        print(f"\n[ERROR] File not found: {e}", file=sys.stderr)
        return EXIT_USAGE

    except (PotentialError, ValueError, KeyError, json.JSONDecodeError) as e:
        print(f"\n[ERROR] {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
