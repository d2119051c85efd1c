"""Input validation helpers.

Every public entry point funnels its array arguments through
:func:`check_matrix`, so the rest of the package can assume finite,
two-dimensional float64 arrays.
"""

import numbers

import numpy as np

from .exceptions import DimensionError, MatrixInputError, ParameterError

__all__ = ["check_matrix", "check_count", "check_index_range", "check_fraction"]


def check_matrix(a, name="matrix"):
    """Coerce ``a`` to a 2-D float64 array with finite entries.

    Parameters
    ----------
    a : array_like
        Candidate matrix.
    name : str
        Name used in error messages.

    Returns
    -------
    numpy.ndarray
        The validated array (a view when no conversion was needed).

    Raises
    ------
    MatrixInputError
        If ``a`` is not 2-D, not numeric, or contains NaN/Inf.
    DimensionError
        If either dimension is zero.
    """
    try:
        arr = np.asarray(a, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise MatrixInputError(f"{name} is not numeric: {exc}") from None
    if arr.ndim != 2:
        raise MatrixInputError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionError(f"{name} has a zero dimension: shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise MatrixInputError(f"{name} contains non-finite entries")
    return arr


def check_count(value, name, minimum=1, maximum=None):
    """Validate an integer-valued count within ``[minimum, maximum]``."""
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise DimensionError(f"{name} must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ParameterError(f"{name} must be <= {maximum}, got {value}")
    return value


def check_index_range(value, name, low, high):
    """Validate an integer in the closed range ``[low, high]``."""
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if not low <= value <= high:
        raise ParameterError(f"{name} must be in [{low}, {high}], got {value}")
    return value


def check_fraction(value, name, low=0.0, high=1.0, inclusive_low=False, inclusive_high=False):
    """Validate a real number in the (optionally open) range ``(low, high)``."""
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise ParameterError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    low_ok = value >= low if inclusive_low else value > low
    high_ok = value <= high if inclusive_high else value < high
    if not (low_ok and high_ok) or not np.isfinite(value):
        lo = "[" if inclusive_low else "("
        hi = "]" if inclusive_high else ")"
        raise ParameterError(f"{name} must lie in {lo}{low}, {high}{hi}, got {value}")
    return value
