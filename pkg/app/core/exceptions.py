"""
Exception hierarchy and error-raising helpers.

Solver outcomes such as Infeasible or IterationLimit are statuses, not errors;
the exceptions here signal bad input or a broken numerical contract.
"""

from typing import Optional


class FPIError(Exception):
    """Base class for every error raised by the solver package."""


class InstanceParseError(FPIError):
    """An instance, solution or config file does not match its schema."""

    def __init__(self, detail: str, field: Optional[str] = None):
        self.detail = detail
        self.field = field
        message = f"{field}: {detail}" if field else detail
        super().__init__(message)


class ConfigError(FPIError):
    """An experiment or iteration config is invalid."""


class NumericalPivotError(FPIError):
    """A Schur-complement pivot fell below the positivity guard."""


class DegenerateDualError(FPIError):
    """A dual pivot lambda_m^(m) vanished, so Q cannot be reconstructed."""


class DegenerateDirectionError(FPIError):
    """A beam direction carries no useful signal to its own user."""


class NotContractiveError(FPIError):
    """The affine primal map has spectral radius >= 1."""

    def __init__(self, spectral_radius: float):
        self.spectral_radius = spectral_radius
        super().__init__(
            f"primal map is not contractive (spectral radius {spectral_radius:.6g} >= 1)"
        )


class NegativePowerError(FPIError):
    """The direct power solve returned a negative power, so its fixed point is unusable."""


class MetricDomainError(FPIError):
    """The Thompson metric was evaluated on a vector with a non-positive entry."""


class UnsupportedLayoutError(FPIError):
    """The hexagonal layout only supports 7 or 19 relays."""


def raise_parse_error(detail: str, field: Optional[str] = None) -> None:
    """
    Raise an InstanceParseError.

    Args:
        detail: Description of what went wrong
        field: Optional name of the offending field

    Raises:
        InstanceParseError
    """
    raise InstanceParseError(detail, field=field)


def raise_dimension_mismatch(field: str, expected: int, actual: int) -> None:
    """
    Raise an InstanceParseError for a wrongly sized array.

    Args:
        field: Name of the field (e.g. "channels", "sigma2")
        expected: Expected length
        actual: Length found in the input

    Raises:
        InstanceParseError
    """
    raise InstanceParseError(
        f"dimension mismatch, expected {expected} entries but got {actual}",
        field=field,
    )


def raise_not_contractive(spectral_radius: float) -> None:
    """
    Raise a NotContractiveError.

    Raises:
        NotContractiveError
    """
    raise NotContractiveError(spectral_radius)


def raise_negative_power(powers) -> None:
    """
    Raise a NegativePowerError naming the smallest power.

    Raises:
        NegativePowerError
    """
    raise NegativePowerError(f"direct power solve returned a negative power ({min(powers):.6g})")
