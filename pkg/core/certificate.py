# QMARGIN v1.0 - Dual certificate checks
'''
Independent checks that a (POVM, certificate) pair is optimal: dual
feasibility, complementary slackness and a vanishing duality gap.

Works in whatever labelling the instance carries, as long as the POVM and
certificate were expressed in the same one.
'''
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

from config import get_tolerances
from core.instance import Instance
from core.op2 import frobenius_norm, mul, trace_product
from core.weak_solver import Certificate, Povm3, Solution, diagnostics

_log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CertificateReport:
    '''Outcome of a certificate check; tolerances come from defaults.yaml.'''
    feasibility: Tuple[float, float, float]     # smallest eigenvalue / compressed value
    y: float
    slackness: Tuple[float, float, float, float]
    dual_value: float
    p_success: float
    p_error: float
    margin: float
    limiting: bool

    @property
    def gap(self):
        return abs(self.p_success - self.dual_value)

    def failures(self, tolerances: Optional[dict] = None):
        tol = tolerances or get_tolerances()
        psd, slack, gap = tol['psd'], tol['slackness'], tol['duality_gap']
        problems = []
        for i, value in enumerate(self.feasibility, 1):
            if value < -psd:
                problems.append(f"dual constraint {i} violated (min eigenvalue {value:.3e})")
        if not self.limiting and self.y < -psd:
            problems.append(f"negative multiplier y={self.y:.3e}")
        for name, value in zip(('E1*Y1', 'E2*Y2', 'E3*Y', 'y*(m - p_err)'), self.slackness):
            if value > slack:
                problems.append(f"slackness {name} = {value:.3e}")
        if self.gap > gap:
            problems.append(f"duality gap {self.gap:.3e}")
        if self.p_error > self.margin + tol.get('margin_slack', 1e-12):
            problems.append(f"error probability {self.p_error:.15g} exceeds margin {self.margin:.15g}")
        return problems

    @property
    def ok(self):
        return not self.failures()

    def as_dict(self):
        return {
            'feasibility': list(self.feasibility),
            'slackness': list(self.slackness),
            'dual_value': self.dual_value,
            'p_success': self.p_success,
            'gap': self.gap,
            'limiting': self.limiting,
            'ok': self.ok,
        }


def dual_constraints(inst: Instance, cert: Certificate):
    '''(Y1, Y2, Y) with Y1 = Y - eta1*rho1 + y*eta2*rho2 and likewise for Y2.'''
    Y, y = cert.Y, cert.y
    y1 = Y - inst.eta1 * inst.rho1 + y * inst.eta2 * inst.rho2
    y2 = Y - inst.eta2 * inst.rho2 + y * inst.eta1 * inst.rho1
    return y1, y2, Y


def _limiting_feasibility(inst: Instance, cert: Certificate):
    # As y -> inf only the directions orthogonal to the opposite state matter
    y1 = cert.Y - inst.eta1 * inst.rho1
    y2 = cert.Y - inst.eta2 * inst.rho2
    return (
        y1.expectation(-inst.n2),
        y2.expectation(-inst.n1),
        cert.Y.min_eig(),
    )


def dual_feasibility(inst: Instance, cert: Certificate):
    if cert.limiting:
        return _limiting_feasibility(inst, cert)
    return tuple(h.min_eig() for h in dual_constraints(inst, cert))


def slackness_residuals(inst: Instance, povm: Povm3, cert: Certificate):
    '''Frobenius norms of E_mu Y_mu plus the multiplier term.

    Zero-margin certificates use the y -> inf form: E1 must annihilate
    rho2, E2 must annihilate rho1, and p_err must vanish.
    '''
    p_error = diagnostics(inst, povm, cert.m).p_error

    if cert.limiting:
        y1 = cert.Y - inst.eta1 * inst.rho1
        y2 = cert.Y - inst.eta2 * inst.rho2
        r1 = frobenius_norm(mul(povm.e1, inst.rho2)) + abs(trace_product(povm.e1, y1))
        r2 = frobenius_norm(mul(povm.e2, inst.rho1)) + abs(trace_product(povm.e2, y2))
        r3 = frobenius_norm(mul(povm.e3, cert.Y))
        return r1, r2, r3, abs(p_error)

    y1, y2, Y = dual_constraints(inst, cert)
    return (
        frobenius_norm(mul(povm.e1, y1)),
        frobenius_norm(mul(povm.e2, y2)),
        frobenius_norm(mul(povm.e3, Y)),
        abs(cert.y * (cert.m - p_error)),
    )


def check_certificate(inst: Instance, povm: Povm3, cert: Certificate) -> CertificateReport:
    diag = diagnostics(inst, povm, cert.m)
    report = CertificateReport(
        feasibility=dual_feasibility(inst, cert),
        y=cert.y,
        slackness=slackness_residuals(inst, povm, cert),
        dual_value=cert.d,
        p_success=diag.p_success,
        p_error=diag.p_error,
        margin=cert.m,
        limiting=cert.limiting,
    )
    if not report.ok:
        _log.debug(f"certificate check failed: {report.failures()}")
    return report


def check_solution(solution: Solution) -> CertificateReport:
    '''Certificate check of a solved instance, in caller labels.'''
    return check_certificate(solution.instance, solution.povm, solution.cert)
