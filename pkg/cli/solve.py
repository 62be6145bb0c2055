# QMARGIN v1.0 - solve command
import argparse
import json

from rich.table import Table

from cli.ui import console, fmt, key_value_table, show_result_panel, show_warning
from core.certificate import check_solution
from core.instance import MarginKind, canonicalize, instance_from_overlap
from core.op2 import conjugate
from core.strong_margin import solve_strong
from core.weak_solver import solve_weak
from utils.run_log import RunEventType, get_run_logger
from utils.validation import parse_ket, parse_probability


def build_parser():
    parser = argparse.ArgumentParser(
        prog='main.py solve',
        description='Optimal measurement for two pure states under an error margin.',
    )
    parser.add_argument('--eta1', required=True, help='occurrence probability of state 1, in (0, 1)')
    parser.add_argument('--overlap', help='|<phi1|phi2>| in [0, 1]')
    parser.add_argument('--state1', help='state 1 as two complex components, e.g. "1,0"')
    parser.add_argument('--state2', help='state 2 as two complex components, e.g. "0.9,0.43589"')
    parser.add_argument('--margin', required=True, help='error margin in [0, 1]')
    parser.add_argument('--kind', choices=[k.value for k in MarginKind], default='weak')
    parser.add_argument('--json', action='store_true', help='emit a single JSON object')
    parser.add_argument('--input-basis', action='store_true',
                        help='also report POVM elements as matrices in the basis of --state1/--state2')
    return parser


def instance_from_args(args):
    eta1 = parse_probability(args.eta1, 'eta1', open_interval=True)
    if args.overlap is not None:
        if args.state1 or args.state2:
            raise ValueError("use either --overlap or --state1/--state2, not both")
        return instance_from_overlap(eta1, parse_probability(args.overlap, 'overlap'))
    if not (args.state1 and args.state2):
        raise ValueError("either --overlap or both --state1 and --state2 are required")
    return canonicalize(parse_ket(args.state1, 'state1'), parse_ket(args.state2, 'state2'), eta1)


def _matrix_json(m):
    return {'re': m.real.tolist(), 'im': m.imag.tolist()}


def cmd_solve(args):
    '''Solve one instance and return the report dict.'''
    inst = instance_from_args(args)
    margin = parse_probability(args.margin, 'margin')

    if MarginKind(args.kind) is MarginKind.STRONG:
        solution = solve_strong(inst, margin)
    else:
        solution = solve_weak(inst, margin)

    report = solution.as_dict()
    report['check'] = check_solution(solution).as_dict()

    if args.input_basis:
        frame = inst.frame()
        report['povm_input_basis'] = {
            f"E{i}": _matrix_json(conjugate(e, frame))
            for i, e in enumerate(solution.povm.elements(), 1)
        }

    get_run_logger().log_event(
        RunEventType.SOLVE,
        f"{solution.kind.value} m={margin:g} -> {solution.domain.tag.value}",
        {'eta1': solution.instance.eta1, 'overlap': solution.instance.overlap,
         'margin': margin, 'p_max': solution.p_max},
    )
    return report


def render(report):
    diag = report['diagnostics']
    rows = [
        ("kind", report['kind']),
        ("margin", fmt(report['margin'])),
        ("weak margin", fmt(report['weak_margin'])),
        ("eta1", fmt(report['eta1'])),
        ("|<phi1|phi2>|", fmt(report['overlap'])),
        ("domain", report['domain']),
        ("m_c", fmt(report['m_c'])),
        ("m_c'", fmt(report['m_c_prime'])),
        ("p_max", fmt(report['p_max'])),
        ("p_success", fmt(diag['p_success'])),
        ("p_error", fmt(diag['p_error'])),
        ("p_inconclusive", fmt(diag['p_inconclusive'])),
        ("P(rho2 | E1)", fmt(diag['cond_err_1'])),
        ("P(rho1 | E2)", fmt(diag['cond_err_2'])),
        ("tr E1", fmt(report['trace_e1'])),
    ]
    show_result_panel(key_value_table(rows), title="Optimal measurement")

    table = Table(title="POVM (canonical frame, caller labels)", header_style="bold cyan")
    table.add_column("Element")
    table.add_column("alpha * I + beta . sigma")
    for name, element in report['povm'].items():
        b = element['beta']
        table.add_row(name, f"α={element['alpha']:.10g}  β=({b[0]:.10g}, {b[1]:.10g}, {b[2]:.10g})")
    console.print(table)

    cert = report['certificate']
    y = "inf (zero-margin limit)" if cert['limiting'] else fmt(cert['y'])
    Y = cert['Y']
    console.print(f"  Certificate: Y α={Y['alpha']:.10g} β={tuple(round(v, 10) for v in Y['beta'])}  y={y}  d={fmt(cert['d'])}")

    check = report['check']
    if check['ok']:
        console.print(f"  Duality gap {check['gap']:.2e}, certificate verified", style="green")
    else:
        show_warning(f"certificate check failed (gap {check['gap']:.2e})")

    for name, m in report.get('povm_input_basis', {}).items():
        console.print(f"  {name} (input basis): re={m['re']} im={m['im']}", style="dim")


def run(argv):
    args = build_parser().parse_args(argv)
    report = cmd_solve(args)
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        render(report)
    return 0
