"""Exception types shared across the package."""


class MesocKitError(Exception):
    """Base class for all errors raised by mesoc_kit."""


class DimensionError(MesocKitError, ValueError):
    """A vector's length does not match the cone or map it is used with."""


class UnsupportedConeError(MesocKitError, ValueError):
    """The requested operation is not defined for this cone variant."""


class MembershipError(MesocKitError, ValueError):
    """A precondition requiring cone membership was violated."""


class OracleError(MesocKitError, RuntimeError):
    """An independent verification oracle failed to reach its accuracy target."""


class SchemaError(MesocKitError, ValueError):
    """A problem file does not conform to the documented schema."""
