"""Exception types shared across the package."""


class SizingError(ValueError):
    """Requested table size is invalid or exceeds the memory budget."""


class RangeError(ValueError):
    """An evaluation point lies outside the supporting table."""


class DomainError(ValueError):
    """An evaluation point lies outside a model's valid domain."""


class ShapeError(ValueError):
    """Inputs that must align (grids, table lengths) do not."""


class UsageError(ValueError):
    """An operation was called in a way that violates its contract."""


class UnknownClaimError(KeyError):
    """Lookup of a claim id that is not in the catalog."""
