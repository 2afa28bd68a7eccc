"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad user-supplied configuration or arguments."""


class InfeasibleParameters(ValidationError):
    """Scheme parameters violate a feasibility precondition."""


class ReducibleModulusError(ValidationError):
    """The defining polynomial factors over the prime field."""


class MalformedViewError(ValidationError):
    """An adversary view that no honest protocol run can produce."""


class NotInImageError(ValidationError):
    """Element asked to be expanded does not lie in the claimed image."""


class MaskPolicyError(RuntimeError):
    """A masking polynomial vanishing at the target reached recovery."""


class InternalInconsistencyError(RuntimeError):
    """An invariant that should be unconditionally true was violated."""
