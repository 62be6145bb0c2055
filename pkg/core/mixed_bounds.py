# QMARGIN v1.0 - Mixed-state upper bound
'''
Density matrices up to dimension 8, Uhlmann fidelity, and the upper bound
on mixed-state discrimination with a weak margin obtained by evaluating the
pure-state optimum at overlap F(rho1, rho2).
'''
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import linalg

from core.errors import DimensionMismatch, DimensionUnsupported, NotAState
from core.instance import critical_margins, sorted_priors, validate_margin, validate_prior
from core.op2 import Herm2, Vec3
from core.weak_solver import helstrom_value, p_max_closed_form

_log = logging.getLogger(__name__)

MIN_DIM = 2
MAX_DIM = 8
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-12
EIG_ROUNDOFF = 16 * np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    '''Validated d x d density matrix (Hermitian, PSD, unit trace).'''
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got shape {m.shape}")
        if not (MIN_DIM <= m.shape[0] <= MAX_DIM):
            raise DimensionUnsupported(
                f"dimension {m.shape[0]} outside supported range {MIN_DIM}..{MAX_DIM}"
            )
        if not np.all(np.isfinite(m)):
            raise NotAState("density matrix has non-finite entries")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise NotAState("density matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        trace = float(np.trace(m).real)
        if abs(trace - 1.0) > TRACE_TOL:
            raise NotAState(f"density matrix has trace {trace:.15g}, expected 1")
        lowest = float(linalg.eigvalsh(m)[0])
        if lowest < -PSD_TOL:
            raise NotAState(f"density matrix has negative eigenvalue {lowest:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, 'matrix', m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def eigenvalues(self):
        return linalg.eigvalsh(self.matrix)

    def rank(self, tol=1e-12):
        return int(np.sum(self.eigenvalues() > tol))

    def bloch(self) -> Vec3:
        if self.dim != 2:
            raise DimensionUnsupported("Bloch vectors exist only for qubits")
        return 2.0 * Herm2.from_matrix(self.matrix).beta

    # -- constructors -------------------------------------------------------

    @classmethod
    def pure(cls, ket):
        v = np.asarray(ket, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise NotAState("cannot build a density matrix from the zero vector")
        v = v / norm
        return cls(np.outer(v, v.conj()))

    @classmethod
    def from_bloch(cls, r):
        r = Vec3.from_iterable(r)
        if r.norm() > 1.0 + PSD_TOL:
            raise NotAState(f"Bloch vector length {r.norm():.15g} exceeds 1")
        return cls(Herm2(0.5, 0.5 * r).to_array())

    @classmethod
    def from_json(cls, obj):
        '''Parse ``{"dim": n, "re": [[...]], "im": [[...]]}`` (row-major).'''
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            dim = int(obj['dim'])
            re = np.asarray(obj['re'], dtype=float)
        except (KeyError, TypeError, ValueError) as e:
            raise NotAState(f"malformed density matrix JSON: {e}")
        im = np.asarray(obj.get('im', np.zeros_like(re)), dtype=float)
        if re.shape != (dim, dim) or im.shape != (dim, dim):
            raise DimensionMismatch(f"declared dim {dim} does not match entries {re.shape}/{im.shape}")
        return cls(re + 1j * im)

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        with open(path, 'r', encoding='utf-8') as f:
            return cls.from_json(json.load(f))

    def to_json(self):
        return {
            'dim': self.dim,
            're': self.matrix.real.tolist(),
            'im': self.matrix.imag.tolist(),
        }


def _psd_sqrt(m):
    '''Square root of a PSD matrix; eigenvalues at roundoff level count as 0.'''
    w, v = linalg.eigh(m)
    floor = EIG_ROUNDOFF * m.shape[0] * max(float(np.max(np.abs(w))), 1.0)
    w = np.where(w > floor, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    '''F = tr sqrt(sqrt(rho1) rho2 sqrt(rho1)) = || sqrt(rho1) sqrt(rho2) ||_1.'''
    if rho1.dim != rho2.dim:
        raise DimensionMismatch(f"dimensions differ: {rho1.dim} vs {rho2.dim}")
    f = float(np.sum(linalg.svdvals(_psd_sqrt(rho1.matrix) @ _psd_sqrt(rho2.matrix))))
    return min(1.0, max(0.0, f))


def _qubit_det(rho: DensityMatrix) -> float:
    det = float(np.linalg.det(rho.matrix).real)
    return det if det > EIG_ROUNDOFF else 0.0


def qubit_fidelity(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    '''Closed form sqrt(tr(rho1 rho2) + 2 sqrt(det rho1 det rho2)) for qubits.'''
    if rho1.dim != 2 or rho2.dim != 2:
        raise DimensionUnsupported("closed-form fidelity is for qubits only")
    overlap = float(np.trace(rho1.matrix @ rho2.matrix).real)
    dets = _qubit_det(rho1) * _qubit_det(rho2)
    return min(1.0, math.sqrt(max(0.0, overlap + 2.0 * math.sqrt(dets))))


@dataclass(frozen=True, eq=False)
class MixedInstance:
    rho1: DensityMatrix
    rho2: DensityMatrix
    eta1: float
    eta2: float
    fidelity: float

    @property
    def dim(self):
        return self.rho1.dim


def make_mixed_instance(rho1: DensityMatrix, rho2: DensityMatrix, eta1) -> MixedInstance:
    eta1 = validate_prior(eta1)
    if rho1.dim != rho2.dim:
        raise DimensionMismatch(f"dimensions differ: {rho1.dim} vs {rho2.dim}")
    f = fidelity(rho1, rho2)
    _log.debug(f"mixed instance dim={rho1.dim} eta1={eta1} F={f:.15g}")
    return MixedInstance(rho1, rho2, eta1, 1.0 - eta1, f)


def mixed_critical_margins(minst: MixedInstance):
    eta1, eta2 = sorted_priors(minst.eta1, minst.eta2)
    return critical_margins(eta1, eta2, minst.fidelity ** 2)


def upper_bound_mixed(minst: MixedInstance, m) -> float:
    '''Pure-state optimum evaluated at overlap F; covers m >= m_c as well.'''
    m = validate_margin(m)
    return p_max_closed_form(minst.eta1, minst.eta2, minst.fidelity ** 2, m)


def _trace_norm_difference(minst: MixedInstance) -> float:
    diff = minst.eta1 * minst.rho1.matrix - minst.eta2 * minst.rho2.matrix
    return float(np.sum(np.abs(linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))


def helstrom_mixed(minst: MixedInstance) -> float:
    return 0.5 * (1.0 + _trace_norm_difference(minst))


def trace_fidelity_inequality_gap(minst: MixedInstance) -> float:
    '''sqrt(1 - 4 eta1 eta2 F^2) - tr|eta1 rho1 - eta2 rho2|, never negative.'''
    bound = 2.0 * helstrom_value(minst.eta1, minst.eta2, minst.fidelity ** 2) - 1.0
    return bound - _trace_norm_difference(minst)
