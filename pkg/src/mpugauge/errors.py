"""Exception hierarchy for the analysis and gauging pipeline.

Every error carries enough context (offending object, residual, tolerance)
to be surfaced in CLI reports without re-running the failing step.
"""


class MpuGaugeError(Exception):
    """Base class for all package errors."""


class LegMismatch(MpuGaugeError):
    """Contraction requested over legs with incompatible names or dimensions."""


class ShapeMismatch(MpuGaugeError):
    """Tensor data does not match the declared shape or leg count."""


class NotProportional(MpuGaugeError):
    """Two tensors expected to agree up to a scalar do not, within tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotAGroup(MpuGaugeError):
    """Multiplication table fails associativity, identity or inverse axioms."""


class NotACocycle(MpuGaugeError):
    """Phase table violates the relevant cocycle condition."""


class NotARoot(MpuGaugeError):
    """A phase could not be snapped to a root of unity of admissible order."""


class NoSolution(MpuGaugeError):
    """A linear system over Z_n has no solution (e.g. cocycle not a coboundary)."""


class NotInjective(MpuGaugeError):
    """MPS tensor not injective even after the allowed number of blockings."""


class NotUnitaryFamily(MpuGaugeError):
    """MPO tensor fails unitarity of the generated operator family."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotSimple(MpuGaugeError):
    """MPU two-layer overlap diagrams do not factorize through fixed points."""


class NotRankOne(MpuGaugeError):
    """Boundary intertwiner failed to split as a rank-one product."""

    def __init__(self, message, second_singular=None):
        super().__init__(message)
        self.second_singular = second_singular


class NotARepresentation(MpuGaugeError):
    """Operator family fails the group multiplication law."""


class OrbitMismatch(MpuGaugeError):
    """Declared block permutation is inconsistent with the extracted action."""


class NotInvariant(MpuGaugeError):
    """State expected to be invariant under the symmetry is not."""


class MissingDefect(MpuGaugeError):
    """Defect system lacks a tensor required by the requested operation."""


class FixedBlockUnderAnomaly(MpuGaugeError):
    """A block fixed by g with sigma_g = -1 admits no consistent sign choice."""


class NotLocallyOrthogonal(MpuGaugeError):
    """Blocks of the MPS are not locally orthogonal on the physical index."""


class SpanDegenerate(MpuGaugeError):
    """Two-site defect patches are not full column rank within a block."""


class NonCommutingProjectors(MpuGaugeError):
    """Projection gauging requested but the local projectors do not commute."""


class TooLarge(MpuGaugeError):
    """Requested dense computation exceeds the memory guard."""
