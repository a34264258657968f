"""Exception types shared across the package."""


class MvopError(Exception):
    """Base class for all package-specific errors."""


class SpecFormatError(MvopError):
    """An input document (measure spec, Fock input, CLI argument) is malformed."""


class DepthExceededError(MvopError):
    """A moment beyond the functional's reliable depth was requested."""


class InconsistentMomentsError(MvopError):
    """Moment data is not positive semidefinite beyond tolerance."""


class ValidationFailedError(MvopError):
    """Supplied Fock data violates the reconstruction hypotheses."""


class NotFinitelySupportedError(MvopError):
    """Gradations do not terminate within the available depth."""


class InternalConsistencyError(MvopError):
    """Assembled operator data failed a self-check that should hold by construction."""
