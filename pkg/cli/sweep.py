# QMARGIN v1.0 - sweep command
'''
Grid sweeps over (eta1, margin) at a fixed overlap, written as CSV.
Rows are ordered with eta1 outer and margin inner, whatever the worker count.
'''
import argparse
import csv
import logging
import sys
from dataclasses import dataclass
from multiprocessing import Pool

import numpy as np

from cli.ui import show_success
from core.instance import MarginKind, instance_from_overlap
from core.strong_margin import solve_strong
from core.weak_solver import solve_weak
from utils.run_log import RunEventType, get_run_logger
from utils.validation import (
    parse_probability,
    parse_range,
    validate_columns,
    validate_output_path,
    validate_steps,
)
from utils.workers import resolve_workers

_log = logging.getLogger(__name__)

DEFAULT_COLUMNS = ('eta1', 'm', 'domain', 'p_max', 'trace_e1', 'p_error', 'm_c', 'm_c_prime')

# selectable with --columns
COLUMNS = DEFAULT_COLUMNS + (
    'overlap', 'kind', 'weak_margin', 'p_success', 'p_inconclusive',
    'cond_err_1', 'cond_err_2', 'dual_value',
)


@dataclass(frozen=True)
class SweepSpec:
    eta1_values: tuple
    margin_values: tuple
    overlap: float
    kind: MarginKind = MarginKind.WEAK
    columns: tuple = DEFAULT_COLUMNS

    @property
    def size(self):
        return len(self.eta1_values) * len(self.margin_values)

    def points(self):
        for eta1 in self.eta1_values:
            for m in self.margin_values:
                yield (eta1, self.overlap, m, self.kind.value)


def _axis(fixed, span, steps, name, open_interval):
    if span is not None:
        lo, hi = parse_range(span, f"{name} range", open_interval)
        return tuple(float(v) for v in np.linspace(lo, hi, validate_steps(steps, f"{name} steps")))
    if fixed is None:
        raise ValueError(f"either --{name} or --{name}-range is required")
    return (parse_probability(fixed, name, open_interval),)


def spec_from_args(args) -> SweepSpec:
    return SweepSpec(
        eta1_values=_axis(args.eta1, args.eta1_range, args.eta1_steps, 'eta1', True),
        margin_values=_axis(args.margin, args.margin_range, args.margin_steps, 'margin', False),
        overlap=parse_probability(args.overlap, 'overlap'),
        kind=MarginKind(args.kind),
        columns=tuple(validate_columns(args.columns, COLUMNS, DEFAULT_COLUMNS)),
    )


def sweep_row(point):
    '''One CSV record as a dict of raw values (None for undefined).'''
    eta1, overlap, m, kind = point
    inst = instance_from_overlap(eta1, overlap)
    if kind == MarginKind.STRONG.value:
        sol = solve_strong(inst, m)
    else:
        sol = solve_weak(inst, m)
    return {
        'eta1': eta1,
        'overlap': overlap,
        'kind': kind,
        'm': m,
        'weak_margin': sol.weak_margin,
        'domain': sol.domain.tag.value,
        'm_c': sol.domain.m_c,
        'm_c_prime': sol.domain.m_c_prime,
        'p_max': sol.p_max,
        'p_success': sol.p_success,
        'p_error': sol.p_error,
        'p_inconclusive': sol.diagnostics.p_inconclusive,
        'cond_err_1': sol.cond_err_1,
        'cond_err_2': sol.cond_err_2,
        'trace_e1': sol.trace_e1,
        'dual_value': sol.cert.d,
    }


def format_value(value):
    if value is None:
        return ''
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def cmd_sweep(spec: SweepSpec, out, workers=1):
    '''Write the sweep as CSV to the open text stream ``out``; returns row count.'''
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(spec.columns)

    points = list(spec.points())
    if workers > 1 and len(points) > 1:
        with Pool(workers) as pool:
            rows = pool.imap(sweep_row, points, chunksize=max(1, len(points) // (4 * workers)))
            count = _write_rows(writer, rows, spec.columns)
    else:
        count = _write_rows(writer, map(sweep_row, points), spec.columns)

    _log.debug(f"sweep wrote {count} rows")
    return count


def _write_rows(writer, rows, columns):
    count = 0
    for row in rows:
        writer.writerow([format_value(row[c]) for c in columns])
        count += 1
    return count


def build_parser():
    parser = argparse.ArgumentParser(prog='main.py sweep', description='Parameter sweep to CSV.')
    parser.add_argument('--overlap', required=True, help='|<phi1|phi2>| in [0, 1]')
    parser.add_argument('--eta1', help='fixed eta1 in (0, 1)')
    parser.add_argument('--eta1-range', help='LO:HI, both in (0, 1)')
    parser.add_argument('--eta1-steps', default=50)
    parser.add_argument('--margin', help='fixed margin in [0, 1]')
    parser.add_argument('--margin-range', help='LO:HI within [0, 1]')
    parser.add_argument('--margin-steps', default=500)
    parser.add_argument('--kind', choices=[k.value for k in MarginKind], default='weak')
    parser.add_argument('--columns', help=f"comma list out of: {','.join(COLUMNS)}")
    parser.add_argument('--output', '-o', default='-', help='CSV path, "-" for stdout')
    parser.add_argument('--workers', type=int, help='worker processes (default: CPU count)')
    return parser


def run(argv):
    args = build_parser().parse_args(argv)
    spec = spec_from_args(args)
    workers = resolve_workers(args.workers)

    if args.output == '-':
        count = cmd_sweep(spec, sys.stdout, workers)
    else:
        path = validate_output_path(args.output, allowed_extensions=['csv'])
        try:
            with open(path, 'w', encoding='utf-8', newline='') as f:
                count = cmd_sweep(spec, f, workers)
        except OSError as e:
            raise OSError(f"cannot write {path}: {e.strerror}") from e
        show_success(f"Wrote {count} rows to {path}")

    get_run_logger().log_event(
        RunEventType.SWEEP,
        f"{spec.kind.value} sweep, {count} rows",
        {'overlap': spec.overlap, 'eta1_points': len(spec.eta1_values),
         'margin_points': len(spec.margin_values), 'output': args.output},
    )
    return 0
