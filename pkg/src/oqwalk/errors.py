"""Exception taxonomy for the oqwalk package.

The CLI maps these onto process exit codes; see ``oqwalk.cli``.
"""


class OQWalkError(Exception):
    """Base class for every error raised by this package."""


class ModelFormatError(OQWalkError):
    """A model/state document cannot be parsed or is missing/mistyping fields.

    Carries enough context (line or field path) to locate the offending spot.
    """


class ModelValidationError(OQWalkError):
    """A parsed model violates a validity requirement (stochasticity, PSD, ...)."""


class AssumptionError(OQWalkError):
    """An operation's structural precondition does not hold (wrong dim, H1/H2, ...)."""


class HermiticityError(OQWalkError):
    """Input expected to be Hermitian deviates beyond tolerance."""


class TraceGaugeError(OQWalkError):
    """A trace constraint on an input or output is violated."""


class SingularRestrictionError(OQWalkError):
    """A linear solve's restricted operator is numerically singular."""


class SpectralIndeterminateError(OQWalkError):
    """A spectral decision sits too close to its tolerance boundary to call."""


class PositivityError(OQWalkError):
    """An object that must be positive semidefinite fails beyond repairable noise."""


class MultiplicityError(OQWalkError):
    """A fixed point assumed simple has higher multiplicity."""


class ConvergenceError(OQWalkError):
    """An iterative procedure exhausted its budget without stabilizing."""


class PathBudgetError(OQWalkError):
    """An exact enumeration would exceed the configured path-count cap."""


class DegenerateStepError(OQWalkError):
    """All step probabilities vanished along a trajectory (absorbing numerical trap)."""


class TraceDriftError(OQWalkError):
    """A trajectory state's trace drifted beyond the renormalization guard."""


class StandardizationError(OQWalkError):
    """Batch standardization impossible (displacement outside the covariance support)."""
