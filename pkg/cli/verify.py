# QMARGIN v1.0 - verify command
'''
Seeded random cross-checks of the closed forms against the brute-force
oracle and the dual certificates. Exit code 0 when every sample passes,
1 otherwise.
'''
import argparse
import json
import logging
import math
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np
from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

from cli.ui import console, show_step, show_step_detail, show_step_final
from core.certificate import check_solution
from core.instance import instance_from_overlap
from core.mixed_bounds import (
    DensityMatrix,
    helstrom_mixed,
    make_mixed_instance,
    trace_fidelity_inequality_gap,
    upper_bound_mixed,
)
from core.oracle import SearchConfig, oracle_mixed_weak, oracle_pure_strong, oracle_pure_weak
from core.strong_margin import p_max_strong, solve_strong
from core.weak_solver import solve_weak
from utils.run_log import RunEventType, get_run_logger
from utils.workers import resolve_workers

_log = logging.getLogger(__name__)

WEAK_DUALITY_SLACK = 1e-9
MIXED_BOUND_SLACK = 1e-6
GAP_FLOOR = -1e-10


@dataclass
class SampleResult:
    index: int
    mode: str
    params: dict
    analytic: float
    oracle: float
    problems: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.problems

    @property
    def deviation(self):
        return abs(self.analytic - self.oracle)


def random_bloch(rng):
    '''Uniform point in the unit ball.'''
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return v * rng.uniform() ** (1.0 / 3.0)


def make_tasks(mode, samples, seed, cfg):
    '''Draw every sample's parameters up front so results do not depend on workers.'''
    rng = np.random.default_rng(seed)
    tasks = []
    for i in range(samples):
        if mode == 'mixed':
            params = {
                'eta1': float(rng.uniform(0.02, 0.98)),
                'r1': random_bloch(rng).tolist(),
                'r2': random_bloch(rng).tolist(),
                'm': float(rng.uniform(0.0, 1.0)),
            }
        else:
            params = {
                'eta1': float(rng.uniform(0.02, 0.5)),
                'S': float(rng.uniform(0.0, 0.98)),
                'm': float(rng.uniform(0.0, 1.0 if mode == 'weak' else 0.5)),
            }
        tasks.append((i, mode, params, cfg))
    return tasks


def _verify_weak(params, cfg, problems):
    inst = instance_from_overlap(params['eta1'], math.sqrt(params['S']))
    sol = solve_weak(inst, params['m'])
    problems.extend(check_solution(sol).failures())
    oracle = oracle_pure_weak(inst, params['m'], cfg).p_best
    if oracle > sol.cert.d + WEAK_DUALITY_SLACK:
        problems.append(f"oracle {oracle:.12g} exceeds dual value {sol.cert.d:.12g}")
    return sol.p_max, oracle


def _verify_strong(params, cfg, problems):
    inst = instance_from_overlap(params['eta1'], math.sqrt(params['S']))
    m_s = params['m']
    sol = solve_strong(inst, m_s)
    problems.extend(check_solution(sol).failures())
    for label, cond in (('E1', sol.cond_err_1), ('E2', sol.cond_err_2)):
        if cond is not None and cond > m_s + 1e-10:
            problems.append(f"conditional error on {label} {cond:.12g} exceeds {m_s:.12g}")
    return p_max_strong(inst, m_s), oracle_pure_strong(inst, m_s, cfg)


def _verify_mixed(params, cfg, problems):
    rho1 = DensityMatrix.from_bloch(params['r1'])
    rho2 = DensityMatrix.from_bloch(params['r2'])
    minst = make_mixed_instance(rho1, rho2, params['eta1'])
    bound = upper_bound_mixed(minst, params['m'])
    oracle = oracle_mixed_weak(minst, params['m'], cfg)
    if oracle > bound + MIXED_BOUND_SLACK:
        problems.append(f"oracle {oracle:.12g} exceeds bound {bound:.12g}")
    gap = trace_fidelity_inequality_gap(minst)
    if gap < GAP_FLOOR:
        problems.append(f"trace/fidelity inequality violated by {gap:.3e}")
    if helstrom_mixed(minst) > upper_bound_mixed(minst, 1.0) + 1e-12:
        problems.append("Helstrom value exceeds the m = 1 bound")
    return bound, oracle


_CHECKS = {'weak': _verify_weak, 'strong': _verify_strong, 'mixed': _verify_mixed}


def verify_sample(task) -> SampleResult:
    index, mode, params, cfg = task
    problems = []
    try:
        analytic, oracle = _CHECKS[mode](params, cfg, problems)
    except Exception as e:
        return SampleResult(index, mode, params, math.nan, math.nan, [f"{type(e).__name__}: {e}"])

    # The mixed bound is only an upper bound; the others must agree
    if mode != 'mixed' and abs(analytic - oracle) > cfg.tolerance:
        problems.append(f"analytic {analytic:.12g} vs oracle {oracle:.12g}")
    return SampleResult(index, mode, params, analytic, oracle, problems)


def cmd_verify(mode, samples, seed, workers=1, cfg=None, progress=True):
    '''Run the checks; returns the list of SampleResult in sample order.'''
    cfg = cfg or SearchConfig.from_defaults()
    tasks = make_tasks(mode, samples, seed, cfg)
    results = []

    def collect(iterator):
        if not progress:
            results.extend(iterator)
            return
        with Progress(
            TextColumn("  │     [progress.description]{task.description}"),
            BarColumn(bar_width=40),
            TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
            TimeElapsedColumn(),
            console=console
        ) as bar:
            job = bar.add_task(f"Checking {mode} samples...", total=len(tasks))
            for result in iterator:
                results.append(result)
                bar.update(job, advance=1)

    if workers > 1 and len(tasks) > 1:
        with Pool(workers) as pool:
            collect(pool.imap(verify_sample, tasks))
    else:
        collect(map(verify_sample, tasks))
    return results


def summarize(results):
    failed = [r for r in results if not r.ok]
    deviations = [r.deviation for r in results if r.mode != 'mixed' and math.isfinite(r.deviation)]
    return {
        'samples': len(results),
        'failed': len(failed),
        'max_deviation': max(deviations) if deviations else None,
        'failures': [
            {'index': r.index, 'params': r.params, 'problems': r.problems} for r in failed
        ],
    }


def build_parser():
    parser = argparse.ArgumentParser(prog='main.py verify', description='Oracle and certificate cross-checks.')
    parser.add_argument('--samples', type=int, default=200)
    parser.add_argument('--seed', type=int, default=7)
    parser.add_argument('--kind', choices=['weak', 'strong'], default='weak')
    parser.add_argument('--mixed', action='store_true', help='check the mixed-state bound instead')
    parser.add_argument('--workers', type=int, help='worker processes (default: CPU count)')
    parser.add_argument('--grid', type=int, help='oracle angular samples per direction')
    parser.add_argument('--json', action='store_true')
    return parser


def run(argv):
    args = build_parser().parse_args(argv)
    if args.samples < 1:
        raise ValueError("--samples must be at least 1")
    mode = 'mixed' if args.mixed else args.kind
    cfg = SearchConfig.from_defaults(**({'coarse_grid': args.grid} if args.grid else {}))
    workers = resolve_workers(args.workers)

    if not args.json:
        show_step(f"{args.samples} {mode} samples, seed {args.seed}, {workers} worker(s)", status="active")
    results = cmd_verify(mode, args.samples, args.seed, workers, cfg, progress=not args.json)
    summary = summarize(results)

    get_run_logger().log_event(
        RunEventType.VERIFY,
        f"{mode}: {summary['failed']}/{summary['samples']} failed",
        {'seed': args.seed, 'max_deviation': summary['max_deviation']},
    )

    if args.json:
        print(json.dumps(summary, indent=2))
    else:
        if summary['max_deviation'] is not None:
            show_step_detail(f"largest |analytic - oracle| = {summary['max_deviation']:.3e}")
        if summary['failures']:
            table = Table(title="Failed samples", header_style="bold red")
            table.add_column("#", justify="right")
            table.add_column("Parameters")
            table.add_column("Problems")
            for f in summary['failures'][:20]:
                params = ', '.join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in f['params'].items())
                table.add_row(str(f['index']), params, '; '.join(f['problems']))
            console.print(table)
        show_step_final(
            f"{summary['samples'] - summary['failed']}/{summary['samples']} samples passed",
            success=not summary['failed'],
        )

    return 0 if not summary['failed'] else 1
