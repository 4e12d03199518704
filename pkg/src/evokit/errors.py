"""Exception hierarchy.

Every numerical failure raised by this package derives from
:class:`EvokitError`, so callers (and the CLI) can distinguish "the
computation refused to proceed" from plain usage errors.  Each message is
expected to name the violated precondition.
"""


class EvokitError(Exception):
    """Base class for numerical / precondition failures."""


class ConfigError(EvokitError):
    """Invalid problem configuration (schema violation, unknown keys)."""


# -- time calculus ----------------------------------------------------------

class EdgeSupportError(EvokitError):
    """Input is not negligible at the window edges, spectral differentiation
    would pick up wrap-around contamination."""


class WrapMarginError(EvokitError):
    """The window / weight combination cannot suppress periodic wrap-around
    to tolerance, even after padding up to the configured size cap."""


class SupportEscapeError(EvokitError):
    """A time translation would move the signal support out of the window."""


# -- material laws ----------------------------------------------------------

class DivergenceError(EvokitError):
    """A Neumann series did not contract (certified bound violated)."""


class ShapeMismatchError(EvokitError):
    """Operator blocks have incompatible shapes."""


class SpdViolationError(EvokitError):
    """A coefficient that must be selfadjoint positive definite is not."""


class ProjectorInvalidError(EvokitError):
    """Projector triple does not resolve the identity or is not orthogonal."""


class PositivityError(EvokitError):
    """A solvability / positivity condition fails where it is required."""


# -- spatial operators ------------------------------------------------------

class SizeExceededError(EvokitError):
    """Requested discretization exceeds the supported desk scale."""


class DegenerateBasisError(EvokitError):
    """Numerical rank of a boundary-data space differs from the expected
    boundary degree-of-freedom count."""


# -- solvers ----------------------------------------------------------------

class SingularFrequencyError(EvokitError):
    """A per-frequency system is numerically singular, which indicates a
    violated positivity condition."""


class UnsupportedLawError(EvokitError):
    """The requested operation supports only affine symbols M0 + z*M1."""


class StepSingularError(EvokitError):
    """An implicit step matrix is numerically singular."""


class NoConvergenceError(EvokitError):
    """A fixed-point / resolvent iteration exhausted its iteration budget."""


class LipschitzViolatedError(EvokitError):
    """Sampled increments exceed a declared Lipschitz constant."""


# -- elliptic ---------------------------------------------------------------

class SingularCouplingError(EvokitError):
    """The mean-coupling denominator vanishes (alpha = -beta)."""


class ZeroCoefficientError(EvokitError):
    """A piecewise coefficient value is zero, the coefficient map is not
    invertible."""


class NotCoerciveError(EvokitError):
    """The operator's Hermitian part is not strictly positive definite."""


# -- experiments ------------------------------------------------------------

class ResolutionExceededError(EvokitError):
    """Oscillation index too large for the spatial resolution."""


class TailTooShortError(EvokitError):
    """Too few decay windows behind the forcing to fit a rate."""


class NoRootError(EvokitError):
    """The delay rate equation has no positive root (requires c > 1)."""
