# QMARGIN v1.0 - Optimal measurements under the weak (mean-error) margin
'''
Closed-form optimal POVMs and dual certificates for discriminating two pure
qubit states when the mean error probability may not exceed ``m``.

Builders work on the internal labelling of an ``Instance`` (eta1 <= eta2,
canonical x-z frame). ``solve_weak`` maps results back to the caller's
labels.
'''
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from config import get_tolerances
from core.errors import (
    DegenerateDirection,
    MarginZeroDegenerate,
    NumericalBreakdown,
    OutOfDomain,
)
from core.instance import (
    Domain,
    DomainTag,
    Instance,
    MarginKind,
    classify,
    classify_margin,
    sorted_priors,
    validate_margin,
)
from core.op2 import PSD_TOL, Herm2, Vec3, frobenius_norm, is_psd, trace_product

_log = logging.getLogger(__name__)

# Boundary checks on m allow this much floating-point slack
_DOMAIN_SLACK = 1e-12


@dataclass(frozen=True)
class Povm3:
    e1: Herm2
    e2: Herm2
    e3: Herm2

    def elements(self):
        return (self.e1, self.e2, self.e3)

    def total(self) -> Herm2:
        return self.e1 + self.e2 + self.e3

    def completeness_residual(self) -> float:
        return frobenius_norm(self.total() - Herm2.identity())

    def is_valid(self, tol=PSD_TOL) -> bool:
        '''PSD elements, sum to identity, every element of rank <= 1.'''
        if self.completeness_residual() > tol:
            return False
        for e in self.elements():
            lo, _ = e.eigs()
            if lo < -tol or lo > tol:
                return False
        return True

    def unswapped(self):
        '''Exchange outcome labels 1 <-> 2 and apply the sigma_z reflection.'''
        return Povm3(self.e2.reflected(), self.e1.reflected(), self.e3.reflected())

    def as_dict(self):
        return {f"E{i}": e.as_dict() for i, e in enumerate(self.elements(), 1)}


@dataclass(frozen=True)
class Certificate:
    '''
    Dual pair (Y, y) for margin m; d = tr Y + m*y bounds every feasible
    success probability. ``y = inf`` marks the zero-margin limit, where
    m*y is taken as 0.
    '''
    Y: Herm2
    y: float
    m: float

    @property
    def limiting(self) -> bool:
        return math.isinf(self.y)

    @property
    def d(self) -> float:
        if self.limiting:
            return self.Y.trace()
        return self.Y.trace() + self.m * self.y

    def reflected(self):
        return replace(self, Y=self.Y.reflected())

    def as_dict(self):
        return {
            'Y': self.Y.as_dict(),
            'y': None if self.limiting else self.y,
            'limiting': self.limiting,
            'm': self.m,
            'd': self.d,
        }


@dataclass(frozen=True)
class Diagnostics:
    '''Joint, marginal and conditional probabilities of a measurement.

    ``joint[a][mu]`` is P(rho_{a+1}, E_{mu+1}). Conditional errors are None
    when the outcome has (numerically) zero probability.
    '''
    joint: Tuple[Tuple[float, float, float], Tuple[float, float, float]]
    margin: float
    zero_tol: float = 1e-14

    @property
    def outcome_probs(self):
        return tuple(self.joint[0][mu] + self.joint[1][mu] for mu in range(3))

    @property
    def p_success(self):
        return self.joint[0][0] + self.joint[1][1]

    @property
    def p_error(self):
        return self.joint[0][1] + self.joint[1][0]

    @property
    def p_inconclusive(self):
        return self.outcome_probs[2]

    def conditional(self, a: int, mu: int) -> Optional[float]:
        '''P(rho_a | E_mu) with 1-based labels.'''
        total = self.outcome_probs[mu - 1]
        if total < self.zero_tol:
            return None
        return self.joint[a - 1][mu - 1] / total

    @property
    def cond_err_1(self):
        return self.conditional(2, 1)

    @property
    def cond_err_2(self):
        return self.conditional(1, 2)

    def as_dict(self):
        return {
            'p_success': self.p_success,
            'p_error': self.p_error,
            'p_inconclusive': self.p_inconclusive,
            'outcome_probs': list(self.outcome_probs),
            'cond_err_1': self.cond_err_1,
            'cond_err_2': self.cond_err_2,
            'joint': [list(row) for row in self.joint],
        }


@dataclass(frozen=True)
class Solution:
    instance: Instance          # caller order
    domain: Domain
    margin: float
    p_max: float
    povm: Povm3
    cert: Certificate
    diagnostics: Diagnostics
    kind: MarginKind = MarginKind.WEAK
    weak_margin: float = field(default=None)

    @property
    def p_success(self):
        return self.diagnostics.p_success

    @property
    def p_error(self):
        return self.diagnostics.p_error

    @property
    def cond_err_1(self):
        return self.diagnostics.cond_err_1

    @property
    def cond_err_2(self):
        return self.diagnostics.cond_err_2

    @property
    def trace_e1(self):
        return self.povm.e1.trace()

    def as_dict(self):
        return {
            'kind': self.kind.value,
            'margin': self.margin,
            'weak_margin': self.weak_margin,
            'eta1': self.instance.eta1,
            'overlap': self.instance.overlap,
            'domain': self.domain.tag.value,
            'm_c': self.domain.m_c,
            'm_c_prime': self.domain.m_c_prime,
            'p_max': self.p_max,
            'trace_e1': self.trace_e1,
            'povm': self.povm.as_dict(),
            'certificate': self.cert.as_dict(),
            'diagnostics': self.diagnostics.as_dict(),
        }


# -- closed-form optimum -------------------------------------------------------

def helstrom_value(eta1, eta2, s):
    return 0.5 * (1.0 + math.sqrt(max(0.0, 1.0 - 4.0 * eta1 * eta2 * s)))


def p_max_closed_form(eta1, eta2, s, m):
    '''Optimal success probability for priors (eta1, eta2), |<phi1|phi2>|^2 = s.

    Priors may come in either order. s = 1 is accepted (needed when the
    formula is evaluated with a fidelity in place of the overlap).
    '''
    eta1, eta2 = sorted_priors(eta1, eta2)
    domain = classify_margin(eta1, eta2, s, m)
    if domain.tag is DomainTag.MINIMUM_ERROR:
        return helstrom_value(eta1, eta2, s)
    if domain.tag is DomainTag.INTERMEDIATE:
        r = math.sqrt(eta1 * eta2 * s)
        return (math.sqrt(m) + math.sqrt(max(0.0, 1.0 - 2.0 * r))) ** 2
    t = 1.0 - s
    return eta2 * (math.sqrt(m * s / eta1) + math.sqrt(max(0.0, eta1 - m) * t / eta1)) ** 2


def p_max_weak(inst: Instance, m) -> float:
    m = validate_margin(m)
    return p_max_closed_form(inst.eta1, inst.eta2, inst.S, m)


# -- minimum-error domain ------------------------------------------------------

def build_min_error(inst: Instance, m: float = 1.0):
    '''Helstrom measurement; its certificate has y = 0.'''
    g = inst.eta1 * inst.n1 - inst.eta2 * inst.n2
    g_norm = g.norm()
    if g_norm < 1e-14:
        raise DegenerateDirection("eta1*n1 - eta2*n2 vanishes; no preferred direction")
    direction = g * (1.0 / g_norm)

    e1 = Herm2.projector(direction)
    e2 = Herm2.projector(-direction)
    povm = Povm3(e1, e2, Herm2.zero())

    lam_plus = 0.5 * (inst.eta1 - inst.eta2 + g_norm)
    Y = inst.eta2 * inst.rho2 + lam_plus * e1
    return povm, Certificate(Y, 0.0, m)


# -- intermediate domain -------------------------------------------------------

def _check_intermediate_range(inst: Instance, m: float):
    domain = classify_margin(inst.eta1, inst.eta2, inst.S, m)
    lo = domain.m_c_prime if inst.eta1 <= inst.eta2 * inst.S else 0.0
    if m < lo - _DOMAIN_SLACK or m > domain.m_c + _DOMAIN_SLACK:
        raise OutOfDomain(
            f"m={m} outside the intermediate domain [{lo:.12g}, {domain.m_c:.12g}]"
        )
    if m == 0.0:
        raise MarginZeroDegenerate("intermediate construction diverges at m = 0; use build_unambiguous")


def _dual_direction(inst: Instance) -> Vec3:
    '''((eta1 - k) n1 + (eta2 - k) n2) / 2 with k = sqrt(eta1 eta2 / S).

    n1 + n2 = (0, 0, 2 sqrt(S)) in the canonical frame, so k drops out.
    '''
    shift = Vec3(0.0, 0.0, 2.0 * math.sqrt(inst.eta1 * inst.eta2))
    return 0.5 * (inst.eta1 * inst.n1 + inst.eta2 * inst.n2 - shift)


def intermediate_y(inst: Instance, m: float) -> float:
    r = math.sqrt(inst.eta1 * inst.eta2 * inst.S)
    return 1.0 + math.sqrt(max(0.0, 1.0 - 2.0 * r)) / math.sqrt(m)


def intermediate_dual(inst: Instance, m: float):
    '''(alpha, beta, y) of the intermediate-domain dual operator Y.'''
    r = math.sqrt(inst.eta1 * inst.eta2 * inst.S)
    q = math.sqrt(max(0.0, 1.0 - 2.0 * r))
    y = intermediate_y(inst, m)
    scale = y * math.sqrt(m) / (2.0 * q)     # y / (2(y - 1))
    beta = scale * (2.0 * _dual_direction(inst))
    alpha = beta.norm()
    _log.debug(f"intermediate dual: y={y:.15g} alpha={alpha:.15g} "
               f"(closed form {scale * (1.0 - 2.0 * r):.15g})")
    return alpha, beta, y


def intermediate_coefficients(inst: Instance, m: float):
    '''Raw (c1, c2, c3) of the linear relation sum c_mu beta_mu = 0.'''
    _check_intermediate_range(inst, m)
    r = math.sqrt(inst.eta1 * inst.eta2 * inst.S)
    q = math.sqrt(max(0.0, 1.0 - 2.0 * r))
    sm = math.sqrt(m)
    y = intermediate_y(inst, m)
    c1 = y / (y + 1.0) * (sm - (r - inst.eta1) / q)
    c2 = y / (y + 1.0) * (sm - (r - inst.eta2) / q)
    c3 = r / sm - sm - q
    return c1, c2, c3


def _clamp_coefficients(coeffs):
    tol = get_tolerances().get('coefficient_clamp', 1e-12)
    clamped = []
    for i, c in enumerate(coeffs, 1):
        if c < 0.0:
            if c < -tol:
                raise NumericalBreakdown(f"coefficient c{i}={c:.3e} is negative beyond tolerance")
            _log.debug(f"clamping c{i}={c:.3e} to 0")
            c = 0.0
        clamped.append(c)
    return clamped


def build_intermediate(inst: Instance, m: float):
    '''All three outcomes occur; p_error = m at the optimum.'''
    coeffs = _clamp_coefficients(intermediate_coefficients(inst, m))
    alpha, beta, y = intermediate_dual(inst, m)

    a1 = inst.eta1 * inst.n1 - y * inst.eta2 * inst.n2
    a2 = inst.eta2 * inst.n2 - y * inst.eta1 * inst.n1
    betas = (beta - 0.5 * a1, beta - 0.5 * a2, beta)

    weight = sum(c * b.norm() for c, b in zip(coeffs, betas))
    if weight <= 0.0:
        raise NumericalBreakdown("intermediate POVM normalization vanished")
    gamma = 1.0 / weight

    elements = [
        Herm2(gamma * c * b.norm(), -(gamma * c) * b) for c, b in zip(coeffs, betas)
    ]
    return Povm3(*elements), Certificate(Herm2(alpha, beta), y, m)


def build_unambiguous(inst: Instance):
    '''Zero-margin measurement with all three outcomes (eta1 >= eta2*S).

    Certificate is the y -> infinity limit of the intermediate family.
    '''
    if inst.eta1 < inst.eta2 * inst.S - _DOMAIN_SLACK:
        raise OutOfDomain("unambiguous three-outcome measurement needs eta1 >= eta2*S")
    s, t = inst.S, inst.T
    w1 = (1.0 - math.sqrt(inst.eta2 * s / inst.eta1)) / t
    w2 = (1.0 - math.sqrt(inst.eta1 * s / inst.eta2)) / t
    w1, w2 = max(0.0, w1), max(0.0, w2)

    e1 = w1 * Herm2.projector(-inst.n2)
    e2 = w2 * Herm2.projector(-inst.n1)
    e3 = Herm2.identity() - e1 - e2

    beta = _dual_direction(inst)
    Y = Herm2(beta.norm(), beta)
    return Povm3(e1, e2, e3), Certificate(Y, math.inf, 0.0)


# -- single-state domain -------------------------------------------------------

def single_state_y(inst: Instance, m: float) -> float:
    '''Dual parameter y fixed by p_error = m (m > 0).'''
    s, t, eta1 = inst.S, inst.T, inst.eta1
    return (inst.eta2 / eta1) * (
        s - t + math.sqrt(s * t) * (eta1 - 2.0 * m) / math.sqrt(m * (eta1 - m))
    )


def _single_state_spectrum(inst: Instance, y: float):
    '''(lambda_plus, f) of eta2*rho2 - y*eta1*rho1.'''
    a2 = inst.eta2 * inst.n2 - y * inst.eta1 * inst.n1
    a2_norm = a2.norm()
    if a2_norm == 0.0:
        raise DegenerateDirection("a2 vanishes")
    denom = a2_norm - (inst.eta2 - y * inst.eta1)
    lam_plus = 2.0 * y * inst.eta1 * inst.eta2 * inst.T / denom
    return lam_plus, a2 * (1.0 / a2_norm)


def build_single_state(inst: Instance, m: float):
    '''E1 = 0; E2 and E3 project onto +f and -f.'''
    domain = classify_margin(inst.eta1, inst.eta2, inst.S, m)
    if inst.eta1 > inst.eta2 * inst.S + _DOMAIN_SLACK:
        raise OutOfDomain("single-state domain needs eta1 <= eta2*S")
    if m < 0.0 or m > domain.m_c_prime + _DOMAIN_SLACK:
        raise OutOfDomain(f"m={m} outside the single-state domain [0, {domain.m_c_prime:.12g}]")
    if m > inst.eta1:
        raise OutOfDomain(f"m={m} exceeds eta1={inst.eta1}")

    if m == 0.0:
        f = -inst.n1
        Y = inst.eta2 * inst.T * Herm2.projector(f)
        cert = Certificate(Y, math.inf, 0.0)
    else:
        y = single_state_y(inst, m)
        if y < 0.0:
            raise NumericalBreakdown(f"single-state dual parameter y={y} is negative")
        lam_plus, f = _single_state_spectrum(inst, y)
        cert = Certificate(lam_plus * Herm2.projector(f), y, m)

    povm = Povm3(Herm2.zero(), Herm2.projector(f), Herm2.projector(-f))
    return povm, cert


def dual_trace(inst: Instance, y: float, tag: DomainTag) -> float:
    '''tr Y along the one-parameter dual family of a domain.'''
    if tag is DomainTag.INTERMEDIATE:
        r = math.sqrt(inst.eta1 * inst.eta2 * inst.S)
        return y / (y - 1.0) * (1.0 - 2.0 * r)
    if tag is DomainTag.SINGLE_STATE:
        return _single_state_spectrum(inst, y)[0]
    raise ValueError("the minimum-error certificate has fixed y = 0")


# -- diagnostics and dispatch ---------------------------------------------------

def diagnostics(inst: Instance, povm: Povm3, m: float) -> Diagnostics:
    rhos = (inst.rho1, inst.rho2)
    etas = (inst.eta1, inst.eta2)
    joint = tuple(
        tuple(eta * trace_product(rho, e) for e in povm.elements())
        for eta, rho in zip(etas, rhos)
    )
    zero_tol = get_tolerances().get('zero_probability', 1e-14)
    return Diagnostics(joint, m, zero_tol)


def solve_weak(inst: Instance, m) -> Solution:
    m = validate_margin(m)
    domain = classify(inst, m)

    if domain.tag is DomainTag.MINIMUM_ERROR:
        povm, cert = build_min_error(inst, m)
    elif domain.tag is DomainTag.SINGLE_STATE:
        povm, cert = build_single_state(inst, m)
    elif m == 0.0:
        povm, cert = build_unambiguous(inst)
    else:
        povm, cert = build_intermediate(inst, m)

    if not is_psd(cert.Y):
        _log.warning(f"dual operator has eigenvalue {cert.Y.min_eig():.3e} (m={m})")

    if inst.swapped:
        povm, cert = povm.unswapped(), cert.reflected()
    caller = inst.in_caller_order()

    return Solution(
        instance=caller,
        domain=domain,
        margin=m,
        p_max=p_max_weak(inst, m),
        povm=povm,
        cert=cert,
        diagnostics=diagnostics(caller, povm, m),
        kind=MarginKind.WEAK,
        weak_margin=m,
    )
