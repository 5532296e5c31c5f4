"""Validation utilities for numerical inputs.

Scalar checks mirror the message style used across the package; array checks guard the
grid and path invariants every brick relies on.
"""

from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike

from .exceptions import PathcalcError


class ValidationError(PathcalcError):
    """Raised when an input fails validation.

    Attributes:
        message: The validation error message
        field: The field that failed validation (optional)
        value: The invalid value (optional)
    """

    def __init__(
        self,
        message: str,
        field: str | None = None,
        value: object = None,
    ) -> None:
        """Initialize validation error.

        Args:
            message: Error message describing the validation failure
            field: Name of the field that failed validation
            value: The invalid value that was provided
        """
        super().__init__(message)
        self.message = message
        self.field = field
        self.value = value

    def __str__(self) -> str:
        """Format error message."""
        if self.field:
            return f"Validation failed for '{self.field}': {self.message}"
        return self.message


def validate_positive(value: float | int, field: str) -> None:
    """Validate that a number is positive.

    Raises:
        ValidationError: If the value is not positive
    """
    if not value > 0:
        msg = f"{field} must be positive"
        raise ValidationError(msg, field=field, value=value)


def validate_non_negative(value: float | int, field: str) -> None:
    """Validate that a number is non-negative.

    Raises:
        ValidationError: If the value is negative
    """
    if not value >= 0:
        msg = f"{field} cannot be negative"
        raise ValidationError(msg, field=field, value=value)


def validate_in_range(
    value: float | int,
    min_value: float | int,
    max_value: float | int,
    field: str,
) -> None:
    """Validate that a number is within a closed range.

    Raises:
        ValidationError: If the value is outside the range
    """
    if not min_value <= value <= max_value:
        msg = f"{field} must be between {min_value} and {max_value}"
        raise ValidationError(msg, field=field, value=value)


def validate_one_of(value: object, allowed_values: Sequence[object], field: str) -> None:
    """Validate that a value is one of the allowed values.

    Raises:
        ValidationError: If the value is not in the allowed list
    """
    if value not in allowed_values:
        msg = f"{field} must be one of {list(allowed_values)}"
        raise ValidationError(msg, field=field, value=value)


def validate_finite(values: ArrayLike, field: str) -> None:
    """Validate that every entry of an array is finite.

    Raises:
        ValidationError: If any entry is NaN or infinite
    """
    array = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(array)):
        bad = int(np.count_nonzero(~np.isfinite(array)))
        msg = f"{field} contains {bad} non-finite entries"
        raise ValidationError(msg, field=field)


def validate_strictly_increasing(values: ArrayLike, field: str) -> None:
    """Validate that a one-dimensional array is strictly increasing.

    Raises:
        ValidationError: If the array is not one-dimensional or not strictly increasing
    """
    array = np.asarray(values, dtype=float)
    if array.ndim != 1:
        msg = f"{field} must be one-dimensional"
        raise ValidationError(msg, field=field, value=array.shape)
    if array.size > 1 and not np.all(np.diff(array) > 0):
        msg = f"{field} must be strictly increasing"
        raise ValidationError(msg, field=field)


def validate_nondecreasing_indices(values: ArrayLike, last: int, field: str) -> None:
    """Validate a stop-index array: starts at 0, nondecreasing, ends at ``last``.

    Raises:
        ValidationError: If any of the three conditions fails
    """
    array = np.asarray(values)
    if array.ndim != 1 or array.size < 2:
        msg = f"{field} needs at least two entries"
        raise ValidationError(msg, field=field, value=array.shape)
    if array[0] != 0 or array[-1] != last:
        msg = f"{field} must start at 0 and end at {last}"
        raise ValidationError(msg, field=field, value=(int(array[0]), int(array[-1])))
    if np.any(np.diff(array) < 0):
        msg = f"{field} must be nondecreasing"
        raise ValidationError(msg, field=field)


def validate_power_of_two(value: int, field: str) -> None:
    """Validate that an integer is a positive power of two.

    Raises:
        ValidationError: If the value is not a power of two
    """
    if value < 1 or value & (value - 1):
        msg = f"{field} must be a power of two"
        raise ValidationError(msg, field=field, value=value)
