# QMARGIN v1.0 - Exception hierarchy


class DiscriminationError(ValueError):
    '''Base class for every validation or construction failure.'''


class NotNormalizable(DiscriminationError):
    '''A state vector has zero (or non-finite) norm.'''


class LinearlyDependent(DiscriminationError):
    '''The two pure states are (numerically) the same ray.'''


class DegeneratePrior(DiscriminationError):
    '''Occurrence probability outside the open interval (0, 1).'''


class MarginOutOfRange(DiscriminationError):
    '''Error margin outside its admissible range.'''


class OutOfDomain(DiscriminationError):
    '''A domain-specific builder was called outside its domain.'''


class MarginZeroDegenerate(DiscriminationError):
    '''The intermediate construction diverges at m = 0.'''


class DegenerateDirection(DiscriminationError):
    '''A Bloch direction needed for a projector has vanishing length.'''


class DimensionMismatch(DiscriminationError):
    '''Operands or states of incompatible dimension.'''


class NotAState(DiscriminationError):
    '''Matrix is not Hermitian, positive semidefinite and of unit trace.'''


class DimensionUnsupported(DiscriminationError):
    '''Operation only supports a specific Hilbert-space dimension.'''


class NoFeasiblePoint(DiscriminationError):
    '''The oracle search found no feasible measurement.'''


class NumericalBreakdown(DiscriminationError):
    '''A quantity that must be non-negative came out clearly negative.'''
