"""
Report Writers
JSON and CSV output for suite results and sweeps.

Every file starts with the run header (seed, samples, mesh, shell, version);
CSV files carry it as '#' comment lines.
"""

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from src import __version__
from src.engine.checks import MarginReport
from src.engine.suite import SuiteResult

CSV_COLUMNS = ('scenario', 'check', 'lhs', 'relation', 'rhs', 'margin', 'half_width',
               'verdict', 'slots', 'point', 'shift', 'notes')


def run_header(config: Dict[str, Any], extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Settings that determine the output bit for bit."""
    header = {
        'version': __version__,
        'seed': config['engine']['seed'],
        'samples': config['green']['samples'],
        'mesh': config['harnack']['mesh'],
        'shell': config['green']['eps_shell_factor'],
    }
    header.update(extra or {})
    return header


def _num(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ''
    return repr(float(v))


def _sanitize(obj):
    if isinstance(obj, float) and (math.isnan(obj) or math.isinf(obj)):
        return None if math.isnan(obj) else ('inf' if obj > 0 else '-inf')
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def reports_to_json(result: SuiteResult, header: Dict[str, Any]) -> str:
    payload = {
        'header': header,
        'summary': result.summary(),
        'reports': [rep.to_dict() for rep in result.reports],
    }
    return json.dumps(_sanitize(payload), indent=2, sort_keys=False)


def _header_lines(header: Dict[str, Any], notes: Sequence[str] = ()) -> List[str]:
    lines = [f"# {k}: {v}" for k, v in header.items()]
    lines += [f"# note: {n}" for n in notes]
    return lines


def reports_to_csv(reports: Iterable[MarginReport], header: Dict[str, Any]) -> str:
    """One row per report; slots as name=side pairs."""
    buf = io.StringIO()
    buf.write("\n".join(_header_lines(header)) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rep in reports:
        writer.writerow([
            rep.scenario, rep.check, _num(rep.lhs), rep.relation, _num(rep.rhs), _num(rep.margin),
            _num(rep.half_width), rep.verdict,
            ";".join(f"{k}={v}" for k, v in rep.slots.items()),
            " ".join(repr(c) for c in rep.point) if rep.point else '',
            repr(rep.shift), " | ".join(rep.notes),
        ])
    return buf.getvalue()


def rows_to_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]], header: Dict[str, Any],
                notes: Sequence[str] = ()) -> str:
    """Generic plot-data CSV with header comments."""
    buf = io.StringIO()
    buf.write("\n".join(_header_lines(header, notes)) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_num(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    return path


def write_reports(result: SuiteResult, out_dir: Path, header: Dict[str, Any],
                  fmt: str = 'json', stem: str = 'verify') -> Path:
    """Write the suite result as <stem>.json or <stem>.csv under out_dir."""
    if fmt == 'json':
        return write_text(Path(out_dir) / f"{stem}.json", reports_to_json(result, header))
    if fmt == 'csv':
        return write_text(Path(out_dir) / f"{stem}.csv", reports_to_csv(result.reports, header))
    raise ValueError(f"unknown format '{fmt}' (json, csv)")
