"""Exception hierarchy shared by every scrollsmith module."""
from typing import Any, Dict, Optional


class ScrollsmithError(Exception):
    """Base class for all scrollsmith failures."""


class ContextMismatchError(ScrollsmithError, ValueError):
    """Operands live over different scalar fields."""


class ArityError(ScrollsmithError, ValueError):
    """A polynomial was applied to the wrong number of arguments."""


class NonHomogeneousError(ScrollsmithError, ValueError):
    """A graded operation received a non-homogeneous polynomial."""


class InvalidProjectionError(ScrollsmithError, ValueError):
    """The projection matrix has the wrong shape or is rank deficient."""


class UnsupportedCaseError(ScrollsmithError, NotImplementedError):
    """The requested scroll type lies outside the implemented range (u = 1)."""


class UnsupportedCharacteristicError(ScrollsmithError, ValueError):
    """Polarization needs a field whose characteristic does not divide 6."""


class BadPrimeError(ScrollsmithError, ValueError):
    """A verification prime divides a denominator or a parameter difference."""


class ContainmentError(ScrollsmithError):
    """A cubic that should contain the scroll does not."""


class ConsistencyError(ScrollsmithError):
    """Two independent computations of the same quantity disagree."""


class PlanInfeasibleError(ScrollsmithError):
    """No chain plan realizes the requested singularity budget."""


class SearchFailedError(ScrollsmithError):
    """A randomized stage exhausted its retry budget."""

    def __init__(
        self,
        stage: str,
        message: str,
        diagnostics: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
        self.diagnostics = diagnostics or {}


class UsageError(ScrollsmithError, ValueError):
    """Bad command-line flags."""
