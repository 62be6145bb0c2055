# QMARGIN v1.0 - Strong (conditional-error) margin
'''
Under the strong margin every reported outcome must be wrong with
conditional probability at most ``m_s``. The optimal measurement coincides
with the weak-margin optimum at the converted margin

    m_w = m_s * p / (1 - m_s),    m_s = m_w / (p + m_w)

so the strong solver reuses the weak constructions.
'''
import logging
import math
from dataclasses import replace

from core.errors import MarginOutOfRange
from core.instance import (
    Domain,
    DomainTag,
    Instance,
    MarginKind,
    critical_margins,
    sorted_priors,
    validate_margin,
)
from core.weak_solver import Solution, helstrom_value, p_max_weak, solve_weak

__all__ = [
    'MarginKind',
    'strong_critical_margins',
    'classify_strong',
    'amplification',
    'p_max_strong_closed_form',
    'p_max_strong',
    'weak_margin_of_strong',
    'strong_margin_of_weak',
    'solve_strong',
]

_log = logging.getLogger(__name__)


def strong_critical_margins(eta1, eta2, s):
    '''(m_c, m_c_prime) of the strong scheme; m_c equals the weak one.'''
    eta1, eta2 = sorted_priors(eta1, eta2)
    m_c, _ = critical_margins(eta1, eta2, s)
    if eta1 >= eta2 * s:
        return m_c, 0.0
    r = math.sqrt(eta1 * eta2 * s)
    lo = (eta1 - r) ** 2
    return m_c, lo / ((eta2 - r) ** 2 + lo)


def _classify(eta1, eta2, s, m_s) -> Domain:
    m_c, m_c_prime = strong_critical_margins(eta1, eta2, s)
    if m_s >= m_c:
        tag = DomainTag.MINIMUM_ERROR
    elif eta1 <= eta2 * s and m_s <= m_c_prime:
        tag = DomainTag.SINGLE_STATE
    else:
        tag = DomainTag.INTERMEDIATE
    return Domain(tag, m_c, m_c_prime)


def classify_strong(inst: Instance, m_s) -> Domain:
    m_s = validate_margin(m_s)
    return _classify(inst.eta1, inst.eta2, inst.S, m_s)


def amplification(m_s):
    '''A_m = (1 - m)/(1 - 2m)^2 * (1 + 2 sqrt(m(1 - m))).'''
    if m_s >= 0.5:
        raise MarginOutOfRange(f"A_m is undefined at m={m_s} >= 1/2")
    return (1.0 - m_s) / (1.0 - 2.0 * m_s) ** 2 * (1.0 + 2.0 * math.sqrt(m_s * (1.0 - m_s)))


def p_max_strong_closed_form(eta1, eta2, s, m_s):
    eta1, eta2 = sorted_priors(eta1, eta2)
    domain = _classify(eta1, eta2, s, m_s)
    if domain.tag is DomainTag.MINIMUM_ERROR:
        return helstrom_value(eta1, eta2, s)
    r = math.sqrt(eta1 * eta2 * s)
    if domain.tag is DomainTag.INTERMEDIATE:
        return amplification(m_s) * (1.0 - 2.0 * r)
    t = 1.0 - s
    denom = (
        m_s * eta2 + (1.0 - m_s) * eta1
        - 2.0 * math.sqrt(m_s * (1.0 - m_s) * eta1 * eta2 * s)
    )
    return eta1 * eta2 * (1.0 - m_s) * t / denom


def p_max_strong(inst: Instance, m_s) -> float:
    m_s = validate_margin(m_s)
    return p_max_strong_closed_form(inst.eta1, inst.eta2, inst.S, m_s)


def weak_margin_of_strong(inst: Instance, m_s) -> float:
    '''Weak margin whose optimum meets the strong margin m_s (capped at 1).

    m_s = 1 has no finite image under m_s p / (1 - m_s) and is rejected.
    '''
    m_s = validate_margin(m_s)
    if m_s == 1.0:
        raise MarginOutOfRange("strong margin 1 has no weak-margin counterpart")
    m_w = m_s * p_max_strong(inst, m_s) / (1.0 - m_s)
    return min(1.0, m_w)


def strong_margin_of_weak(inst: Instance, m_w) -> float:
    m_w = validate_margin(m_w)
    if m_w == 0.0:
        return 0.0
    return m_w / (p_max_weak(inst, m_w) + m_w)


def solve_strong(inst: Instance, m_s) -> Solution:
    m_s = validate_margin(m_s)
    # every measurement satisfies the strong margin 1
    m_w = 1.0 if m_s == 1.0 else weak_margin_of_strong(inst, m_s)
    _log.debug(f"strong margin {m_s:.15g} -> weak margin {m_w:.15g}")

    weak = solve_weak(inst, m_w)
    return replace(
        weak,
        domain=classify_strong(inst, m_s),
        margin=m_s,
        p_max=p_max_strong(inst, m_s),
        kind=MarginKind.STRONG,
        weak_margin=m_w,
    )
