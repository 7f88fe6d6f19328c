"""Exception types shared across the package."""


class NcpotError(Exception):
    """Base class for all package-specific errors."""


class NonHermitian(NcpotError):
    """Matrix fails the Hermitian symmetry check."""


class DimMismatch(NcpotError):
    """Operands have incompatible dimensions."""


class DimOverflow(NcpotError):
    """Requested product dimension exceeds the supported range."""


class NonPhysical(NcpotError):
    """State parameters violate positivity of the density matrix."""


class OutOfRange(NcpotError):
    """Scalar parameter outside its admissible interval."""


class InvalidState(NcpotError):
    """Matrix is not a valid density matrix (Hermitian, trace-one, PSD)."""


class HierarchyViolation(NcpotError):
    """Correlation measures violate the set-inclusion hierarchy."""


class ElevenPopulated(NcpotError):
    """Two-qubit state has weight in the double-occupation sector."""


class GridTooLarge(NcpotError):
    """Phase-space grid exceeds the point budget."""


class MissingRecord(NcpotError):
    """A required measurement record is absent from the data set."""


class NonConvergence(NcpotError):
    """Iterative estimation failed to converge within the iteration cap."""


class EmptySweep(NcpotError):
    """Visibility sweep contains too few samples."""


class IrreparableBlock(NcpotError):
    """Fixed diagonal blocks already violate positivity; repair impossible."""


class CurveTooShort(NcpotError):
    """Interpolation curve has too few points for extremum detection."""
