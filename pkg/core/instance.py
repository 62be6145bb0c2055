# QMARGIN v1.0 - Problem normalization and domain classification
import cmath
import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Tuple

import numpy as np

from config import get_tolerances
from core.errors import (
    DegeneratePrior,
    DimensionMismatch,
    LinearlyDependent,
    MarginOutOfRange,
    NotNormalizable,
)
from core.op2 import Herm2, Vec3

_log = logging.getLogger(__name__)

Ket = Tuple[complex, complex]


class DomainTag(Enum):
    """Type of the optimal measurement"""
    MINIMUM_ERROR = "minimum-error"
    INTERMEDIATE = "intermediate"
    SINGLE_STATE = "single-state"


class MarginKind(Enum):
    """How the error margin is imposed"""
    WEAK = "weak"       # mean error probability
    STRONG = "strong"   # each conditional error probability


@dataclass(frozen=True)
class Domain:
    tag: DomainTag
    m_c: float
    m_c_prime: float


@dataclass(frozen=True)
class Instance:
    '''
    Two pure qubit states with priors, in canonical form.

    Labels are internal: eta1 <= eta2 always holds here, and ``swapped``
    records whether the caller's first state is stored as state 2.
    n1, n2 are the Bloch vectors in the canonical x-z frame.
    '''
    eta1: float
    eta2: float
    psi1: Ket
    psi2: Ket
    S: float
    T: float
    n1: Vec3
    n2: Vec3
    swapped: bool = False

    @property
    def rho1(self) -> Herm2:
        return Herm2.projector(self.n1)

    @property
    def rho2(self) -> Herm2:
        return Herm2.projector(self.n2)

    @property
    def overlap(self) -> float:
        return math.sqrt(self.S)

    def in_caller_order(self):
        '''The same problem with labels in the order the caller supplied them.

        Bloch vectors are unchanged: after the sigma_z reflection that
        accompanies a label swap, the caller's first state again sits at
        (sqrt(T), 0, sqrt(S)).
        '''
        if not self.swapped:
            return self
        return replace(
            self, eta1=self.eta2, eta2=self.eta1,
            psi1=self.psi2, psi2=self.psi1, swapped=False,
        )

    def canonical_kets(self):
        '''Kets of the canonical frame, in caller order.'''
        c = math.sqrt(0.5 * (1.0 + math.sqrt(self.S)))
        s = math.sqrt(max(0.0, 0.5 * (1.0 - math.sqrt(self.S))))
        return (complex(c), complex(s)), (complex(c), complex(-s))

    def frame(self) -> np.ndarray:
        '''Unitary taking the canonical frame to the caller's input basis.'''
        caller = self.in_caller_order()
        phi1, phi2 = caller.canonical_kets()
        psi = np.array([caller.psi1, caller.psi2], dtype=complex).T
        phi = np.array([phi1, phi2], dtype=complex).T
        return psi @ np.linalg.inv(phi)


def _normalize(psi) -> np.ndarray:
    v = np.asarray(psi, dtype=complex).reshape(-1)
    if v.shape != (2,):
        raise DimensionMismatch(f"state vectors must have 2 components, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise NotNormalizable("state vector has non-finite components")
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise NotNormalizable("state vector is zero")
    return v / norm


def validate_prior(eta1):
    try:
        eta1 = float(eta1)
    except (TypeError, ValueError):
        raise DegeneratePrior(f"occurrence probability must be a number, got {eta1!r}")
    if not (0.0 < eta1 < 1.0):
        raise DegeneratePrior(f"occurrence probability eta1={eta1} must lie in (0, 1)")
    return eta1


def canonicalize(psi1, psi2, eta1) -> Instance:
    '''Normalize two states and priors into the canonical Bloch frame.'''
    eta1 = validate_prior(eta1)
    eta2 = 1.0 - eta1

    v1 = _normalize(psi1)
    v2 = _normalize(psi2)

    # Fix the global phase of the second state so <v1|v2> is real, >= 0
    inner = np.vdot(v1, v2)
    if abs(inner) > 0.0:
        v2 = v2 * cmath.exp(-1j * cmath.phase(inner))
    s = float(min(1.0, abs(inner) ** 2))

    cutoff = get_tolerances().get('linear_dependence', 1e-10)
    if s > 1.0 - cutoff:
        raise LinearlyDependent(f"states are linearly dependent (S={s:.15g})")

    t = 1.0 - s
    n1 = Vec3(math.sqrt(t), 0.0, math.sqrt(s))
    n2 = Vec3(-math.sqrt(t), 0.0, math.sqrt(s))

    k1 = (complex(v1[0]), complex(v1[1]))
    k2 = (complex(v2[0]), complex(v2[1]))
    if eta1 > eta2:
        _log.debug(f"swapping labels so that eta1 <= eta2 (eta1={eta1})")
        return Instance(eta2, eta1, k2, k1, s, t, n1, n2, swapped=True)
    return Instance(eta1, eta2, k1, k2, s, t, n1, n2, swapped=False)


def instance_from_overlap(eta1, overlap) -> Instance:
    '''Instance with real overlap |<phi1|phi2>| = overlap.'''
    overlap = float(overlap)
    if not (0.0 <= overlap <= 1.0):
        raise ValueError(f"overlap must lie in [0, 1], got {overlap}")
    return canonicalize((1.0, 0.0), (overlap, math.sqrt(max(0.0, 1.0 - overlap * overlap))), eta1)


# -- closed-form critical margins (shared with the mixed-state bound) ----------

def validate_margin(m, upper=1.0):
    try:
        m = float(m)
    except (TypeError, ValueError):
        raise MarginOutOfRange(f"error margin must be a number, got {m!r}")
    if not (0.0 <= m <= upper):
        raise MarginOutOfRange(f"error margin m={m} must lie in [0, {upper:g}]")
    return m


def sorted_priors(eta1, eta2):
    return (eta1, eta2) if eta1 <= eta2 else (eta2, eta1)


def critical_margins(eta1, eta2, s):
    '''(m_c, m_c_prime) for priors eta1 <= eta2 and squared overlap s.'''
    r = math.sqrt(eta1 * eta2 * s)
    m_c = 0.5 * (1.0 - math.sqrt(max(0.0, 1.0 - 4.0 * r * r)))
    if eta1 >= eta2 * s:
        return m_c, 0.0
    m_c_prime = (eta1 - r) ** 2 / (1.0 - 2.0 * r)
    return m_c, m_c_prime


def classify_margin(eta1, eta2, s, m) -> Domain:
    m_c, m_c_prime = critical_margins(eta1, eta2, s)
    if m >= m_c:
        tag = DomainTag.MINIMUM_ERROR
    elif eta1 <= eta2 * s and m <= m_c_prime:
        tag = DomainTag.SINGLE_STATE
    else:
        tag = DomainTag.INTERMEDIATE
    return Domain(tag, m_c, m_c_prime)


def classify(inst: Instance, m) -> Domain:
    m = validate_margin(m)
    return classify_margin(inst.eta1, inst.eta2, inst.S, m)
