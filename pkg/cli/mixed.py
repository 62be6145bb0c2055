# QMARGIN v1.0 - mixed-bound command
import argparse
import json

from cli.ui import fmt, key_value_table, show_result_panel
from core.mixed_bounds import (
    DensityMatrix,
    helstrom_mixed,
    make_mixed_instance,
    mixed_critical_margins,
    trace_fidelity_inequality_gap,
    upper_bound_mixed,
)
from utils.run_log import RunEventType, get_run_logger
from utils.validation import parse_ket, parse_probability


def build_parser():
    parser = argparse.ArgumentParser(
        prog='main.py mixed-bound',
        description='Upper bound for two mixed states under a weak error margin.',
    )
    parser.add_argument('--rho1', help='JSON file {"dim", "re", "im"} for state 1')
    parser.add_argument('--rho2', help='JSON file for state 2')
    parser.add_argument('--state1', help='pure state 1 as complex components instead of --rho1')
    parser.add_argument('--state2', help='pure state 2 as complex components instead of --rho2')
    parser.add_argument('--eta1', required=True, help='occurrence probability of state 1, in (0, 1)')
    parser.add_argument('--margin', required=True, help='error margin in [0, 1]')
    parser.add_argument('--json', action='store_true')
    return parser


def _load_state(path, ket, label):
    if path and ket:
        raise ValueError(f"use either --rho{label} or --state{label}, not both")
    if path:
        try:
            return DensityMatrix.from_file(path)
        except OSError as e:
            raise OSError(f"cannot read {path}: {e.strerror}") from e
        except json.JSONDecodeError as e:
            raise ValueError(f"{path} is not valid JSON: {e.msg}") from e
    if ket:
        return DensityMatrix.pure(parse_ket(ket, f"state{label}"))
    raise ValueError(f"--rho{label} or --state{label} is required")


def cmd_mixed_bound(args):
    rho1 = _load_state(args.rho1, args.state1, 1)
    rho2 = _load_state(args.rho2, args.state2, 2)
    minst = make_mixed_instance(rho1, rho2, parse_probability(args.eta1, 'eta1', open_interval=True))
    margin = parse_probability(args.margin, 'margin')
    m_c, m_c_prime = mixed_critical_margins(minst)

    report = {
        'dim': minst.dim,
        'eta1': minst.eta1,
        'margin': margin,
        'fidelity': minst.fidelity,
        'm_c': m_c,
        'm_c_prime': m_c_prime,
        'upper_bound': upper_bound_mixed(minst, margin),
        'helstrom': helstrom_mixed(minst),
        'trace_fidelity_gap': trace_fidelity_inequality_gap(minst),
    }
    get_run_logger().log_event(
        RunEventType.MIXED_BOUND,
        f"dim {minst.dim}, m={margin:g}",
        {'fidelity': minst.fidelity, 'upper_bound': report['upper_bound']},
    )
    return report


def run(argv):
    args = build_parser().parse_args(argv)
    report = cmd_mixed_bound(args)
    if args.json:
        print(json.dumps(report, indent=2))
        return 0

    rows = [
        ("dimension", str(report['dim'])),
        ("eta1", fmt(report['eta1'])),
        ("margin", fmt(report['margin'])),
        ("fidelity F", fmt(report['fidelity'])),
        ("m_c (S = F^2)", fmt(report['m_c'])),
        ("m_c' (S = F^2)", fmt(report['m_c_prime'])),
        ("upper bound", fmt(report['upper_bound'])),
        ("Helstrom value", fmt(report['helstrom'])),
        ("trace/fidelity gap", fmt(report['trace_fidelity_gap'])),
    ]
    show_result_panel(key_value_table(rows), title="Mixed-state bound")
    return 0
