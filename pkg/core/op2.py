# QMARGIN v1.0 - 2x2 operator algebra in Bloch form
'''
Every qubit operator in the solver is a Hermitian ``alpha*I + beta.sigma``.
Eigenvalues are ``alpha -/+ |beta|``, so PSD checks and ranks need no
eigensolver. Products of Hermitians are generally not Hermitian; those are
expanded into a plain complex 2x2 (``Mat2c``).
'''
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

PSD_TOL = 1e-12


@dataclass(frozen=True)
class Vec3:
    '''Real 3-vector (Bloch components).'''
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __add__(self, other):
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other):
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, k):
        return Vec3(k * self.x, k * self.y, k * self.z)

    __rmul__ = __mul__

    def __neg__(self):
        return Vec3(-self.x, -self.y, -self.z)

    def dot(self, other):
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self):
        return math.hypot(self.x, self.y, self.z)

    def normalized(self):
        n = self.norm()
        if n == 0.0:
            raise ZeroDivisionError("cannot normalize the zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def reflected(self):
        '''Image under conjugation by sigma_z: (x, y, z) -> (-x, -y, z).'''
        return Vec3(-self.x, -self.y, self.z)

    def as_tuple(self):
        return (self.x, self.y, self.z)

    @classmethod
    def from_iterable(cls, values):
        x, y, z = (float(v) for v in values)
        return cls(x, y, z)


@dataclass(frozen=True)
class Herm2:
    '''Hermitian 2x2 operator alpha*I + beta.sigma.'''
    alpha: float
    beta: Vec3 = Vec3()

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls):
        return cls(1.0, Vec3())

    @classmethod
    def zero(cls):
        return cls(0.0, Vec3())

    @classmethod
    def projector(cls, direction: Vec3):
        '''(I + u.sigma)/2 for a unit Bloch vector u.'''
        return cls(0.5, 0.5 * direction)

    @classmethod
    def from_matrix(cls, m):
        '''Bloch decomposition of a Hermitian 2x2 array (Hermitian part taken).'''
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
        off = 0.5 * (b + np.conj(c))
        return cls(
            float(0.5 * (a.real + d.real)),
            Vec3(float(off.real), float(-off.imag), float(0.5 * (a.real - d.real))),
        )

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        return Herm2(self.alpha + other.alpha, self.beta + other.beta)

    def __sub__(self, other):
        return Herm2(self.alpha - other.alpha, self.beta - other.beta)

    def __mul__(self, k):
        return Herm2(k * self.alpha, k * self.beta)

    __rmul__ = __mul__

    def __neg__(self):
        return Herm2(-self.alpha, -self.beta)

    # -- spectral data ------------------------------------------------------

    def trace(self):
        return 2.0 * self.alpha

    def eigs(self):
        r = self.beta.norm()
        return self.alpha - r, self.alpha + r

    def min_eig(self):
        return self.alpha - self.beta.norm()

    def expectation(self, direction: Vec3):
        '''<u|H|u> for the pure state with unit Bloch vector u.'''
        return self.alpha + self.beta.dot(direction)

    def reflected(self):
        return Herm2(self.alpha, self.beta.reflected())

    def to_mat2c(self):
        b = self.beta
        return Mat2c(
            complex(self.alpha + b.z), complex(b.x, -b.y),
            complex(b.x, b.y), complex(self.alpha - b.z),
        )

    def to_array(self):
        return self.to_mat2c().to_array()

    def as_dict(self):
        return {'alpha': self.alpha, 'beta': list(self.beta.as_tuple())}


@dataclass(frozen=True)
class Mat2c:
    '''General complex 2x2 [[a, b], [c, d]]; only used for products.'''
    a: complex
    b: complex
    c: complex
    d: complex

    def __matmul__(self, other):
        return Mat2c(
            self.a * other.a + self.b * other.c, self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c, self.c * other.b + self.d * other.d,
        )

    def trace(self):
        return self.a + self.d

    def to_array(self):
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @classmethod
    def from_array(cls, m):
        m = np.asarray(m, dtype=complex)
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))


Operator = Union[Herm2, Mat2c]


def _as_mat(op: Operator) -> Mat2c:
    return op.to_mat2c() if isinstance(op, Herm2) else op


def eigs(h: Herm2):
    '''(lambda_minus, lambda_plus) = alpha -/+ |beta|.'''
    return h.eigs()


def is_psd(h: Herm2, tol: float = PSD_TOL) -> bool:
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    return h.min_eig() >= -tol


def mul(a: Operator, b: Operator) -> Mat2c:
    return _as_mat(a) @ _as_mat(b)


def frobenius_norm(m: Operator) -> float:
    m = _as_mat(m)
    return math.sqrt(abs(m.a) ** 2 + abs(m.b) ** 2 + abs(m.c) ** 2 + abs(m.d) ** 2)


def trace_product(a: Herm2, b: Herm2) -> float:
    '''tr(AB) = 2(alpha alpha' + beta.beta').'''
    return 2.0 * (a.alpha * b.alpha + a.beta.dot(b.beta))


def conjugate(h: Operator, u) -> np.ndarray:
    '''U H U^dagger as a dense array.'''
    u = np.asarray(u, dtype=complex)
    return u @ _as_mat(h).to_array() @ u.conj().T
