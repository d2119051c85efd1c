"""Discretized ill-posed integral operators used as deterministic test matrices.

Each generator builds the classical midpoint-rule (Nystrom/Galerkin) dense
discretization of a first-kind Fredholm or Volterra integral operator on ``n``
nodes, scaled so its singular values approximate those of the underlying
operator.  All five are deterministic functions of ``n`` alone and carry
rapidly decaying spectra, which makes them stress tests for rank-revealing
factorizations and spectral-norm estimators.

Available kernels (by name):

* ``baart``    — ``exp(s*cos(t))`` on ``[0, pi/2] x [0, pi]``.
* ``deriv2``   — Green's function for the second derivative on ``[0, 1]^2``
  (symmetric; singular values approach ``1/(j*pi)**2``).
* ``foxgood``  — ``sqrt(s**2 + t**2)`` on ``[0, 1]^2``, severely ill posed.
* ``gravity``  — ``depth / (depth**2 + (s-t)**2)**1.5``, a 1-D gravity
  surveying kernel (default depth ``0.25``).
* ``heat``     — causal inverse-heat-equation kernel, a lower-triangular
  Toeplitz matrix (default conductivity ``kappa = 1``).
"""

import numpy as np
import scipy.linalg

from .exceptions import ParameterError
from .validation import check_count

__all__ = ["HANSEN_NAMES", "gen_hansen", "baart", "deriv2", "foxgood", "gravity", "heat"]

MIN_ORDER = 8

HANSEN_NAMES = ("baart", "deriv2", "foxgood", "gravity", "heat")


def _midpoints(n, length):
    """``n`` midpoint nodes covering ``[0, length]``."""
    h = length / n
    return (np.arange(n) + 0.5) * h, h


def baart(n):
    """Fredholm kernel ``exp(s*cos(t))``, ``s in [0, pi/2]``, ``t in [0, pi]``."""
    n = check_count(n, "n", minimum=MIN_ORDER)
    s, hs = _midpoints(n, np.pi / 2)
    t, ht = _midpoints(n, np.pi)
    return np.sqrt(hs * ht) * np.exp(np.outer(s, np.cos(t)))


def deriv2(n):
    """Green's function for the second derivative; symmetric by construction."""
    n = check_count(n, "n", minimum=MIN_ORDER)
    x, h = _midpoints(n, 1.0)
    s = x[:, None]
    t = x[None, :]
    green = np.where(s <= t, s * (t - 1.0), t * (s - 1.0))
    return h * green


def foxgood(n):
    """Severely ill-posed kernel ``sqrt(s**2 + t**2)`` on the unit square."""
    n = check_count(n, "n", minimum=MIN_ORDER)
    x, h = _midpoints(n, 1.0)
    return h * np.sqrt(x[:, None] ** 2 + x[None, :] ** 2)


def gravity(n, depth=0.25):
    """1-D gravity surveying kernel at the given source ``depth``."""
    n = check_count(n, "n", minimum=MIN_ORDER)
    if not depth > 0:
        raise ParameterError(f"depth must be positive, got {depth}")
    x, h = _midpoints(n, 1.0)
    diff = x[:, None] - x[None, :]
    return h * depth / (depth**2 + diff**2) ** 1.5


def heat(n, kappa=1.0):
    """Inverse heat equation kernel; lower-triangular Toeplitz."""
    n = check_count(n, "n", minimum=MIN_ORDER)
    if not kappa > 0:
        raise ParameterError(f"kappa must be positive, got {kappa}")
    t, h = _midpoints(n, 1.0)
    column = h / (2.0 * kappa * np.sqrt(np.pi)) * t**-1.5 * np.exp(-1.0 / (4.0 * kappa**2 * t))
    row = np.zeros(n)
    row[0] = column[0]
    return scipy.linalg.toeplitz(column, row)


_GENERATORS = {
    "baart": baart,
    "deriv2": deriv2,
    "foxgood": foxgood,
    "gravity": gravity,
    "heat": heat,
}


def gen_hansen(name, n, **kwargs):
    """Build the named test matrix of order ``n`` (``n >= 8``).

    Extra keyword arguments are forwarded to the individual generator
    (``depth`` for ``gravity``, ``kappa`` for ``heat``).
    """
    key = str(name).lower()
    if key not in _GENERATORS:
        raise ParameterError(
            f"unknown test-matrix name {name!r}; choose from {', '.join(HANSEN_NAMES)}"
        )
    return _GENERATORS[key](n, **kwargs)
