"""Dense linear-algebra kernels shared by every higher layer.

The kernels wrap LAPACK through numpy/scipy and normalize their output to the
package-wide conventions:

* QR factors carry a nonnegative R diagonal (reflector signs are flipped), so
  diagonal magnitudes can be compared against singular values without
  run-to-run sign noise.
* Column-pivoted QR breaks exact column-norm ties toward the lowest original
  index (the LAPACK convention), keeping factorizations deterministic.
* Triangular factors contain exact zeros in their structural-zero triangles.

Random matrices come from the Philox counter-based generator with numpy's
Ziggurat normal transform; every draw is a pure function of
``(rows, cols, seed)``.
"""

import warnings
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg

from .exceptions import ConvergenceError, RankDeficiencyWarning
from .validation import check_count, check_matrix

__all__ = [
    "QrFactors",
    "SvdFactors",
    "gaussian_matrix",
    "householder_qr",
    "column_pivoted_qr",
    "svd_full",
    "orth",
    "spectral_norm",
]

#: Largest dimension for which :func:`spectral_norm` uses a dense SVD; above
#: this it switches to power iteration on the Gram operator.
DENSE_NORM_LIMIT = 2000

#: Relative tolerance and iteration cap for the power-iteration norm path.
POWER_RTOL = 1e-10
POWER_MAXITER = 5000

#: Columns whose pivot falls below this multiple of the leading pivot are
#: reported as numerically dependent by :func:`orth`.
RANK_DEFICIENCY_RTOL = 1e-14


class QrFactors(NamedTuple):
    """Economy-size QR factors, optionally column pivoted.

    ``q`` has orthonormal columns, ``r`` is upper triangular with nonnegative
    diagonal, and ``perm`` (when present) satisfies ``m[:, perm] = q @ r``.
    """

    q: np.ndarray
    r: np.ndarray
    perm: Optional[np.ndarray] = None


class SvdFactors(NamedTuple):
    """Thin singular value decomposition ``u @ diag(s) @ v.T``.

    ``s`` is nonincreasing and nonnegative; ``u`` and ``v`` hold the left and
    right singular vectors as columns.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def truncate(self, rank):
        """Return the leading ``rank`` singular triplets."""
        return SvdFactors(self.u[:, :rank], self.s[:rank], self.v[:, :rank])

    def approx(self):
        """Reconstruct ``u @ diag(s) @ v.T``."""
        return (self.u * self.s) @ self.v.T


def gaussian_matrix(rows, cols, seed=0):
    """Draw a ``rows x cols`` matrix of i.i.d. standard normal entries.

    The stream is the Philox counter-based generator keyed by ``seed``; numpy's
    Ziggurat transform produces the normals.  Calls with equal arguments return
    bitwise-identical matrices.
    """
    rows = check_count(rows, "rows")
    cols = check_count(cols, "cols")
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    return rng.standard_normal((rows, cols))


def _fix_signs(q, r):
    """Flip reflector signs in place so that ``diag(r)`` is nonnegative."""
    k = min(r.shape)
    signs = np.sign(np.diagonal(r)[:k])
    signs[signs == 0] = 1.0
    q[:, :k] *= signs
    r[:k, :] *= signs[:, None]
    return q, r


def householder_qr(m):
    """Unpivoted Householder QR with economy factors and ``diag(r) >= 0``.

    Returns :class:`QrFactors` with ``q @ r == m`` to within roundoff and
    exact zeros below the diagonal of ``r``.
    """
    m = check_matrix(m, "m")
    q, r = np.linalg.qr(m, mode="reduced")
    q, r = _fix_signs(q.copy(), r.copy())
    return QrFactors(q, np.triu(r), None)


def column_pivoted_qr(m):
    """Column-pivoted Householder QR with nonincreasing pivot magnitudes.

    Returns :class:`QrFactors` whose ``perm`` satisfies
    ``m[:, perm] = q @ r``; exact ties in column norms resolve to the lowest
    original index.
    """
    m = check_matrix(m, "m")
    q, r, perm = scipy.linalg.qr(m, mode="economic", pivoting=True)
    q, r = _fix_signs(q, r)
    return QrFactors(q, np.triu(r), perm)


def svd_full(m):
    """Thin SVD of ``m`` with nonincreasing singular values.

    Intended for desk-scale matrices; the independent cross-check against a
    one-sided Jacobi eigensolver lives in the test suite.
    """
    m = check_matrix(m, "m")
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    return SvdFactors(u, s, vh.T)


def orth(m):
    """Orthonormal basis for the range of ``m`` (the Q of its Householder QR).

    The basis always has as many columns as ``m``.  If some columns are
    numerically dependent (a diagonal of R below ``1e-14`` times the leading
    one) a :class:`~pbpqlp.exceptions.RankDeficiencyWarning` is emitted and
    the basis is returned anyway.
    """
    factors = householder_qr(m)
    diag = np.abs(np.diagonal(factors.r))
    if diag.size and diag[0] > 0 and np.any(diag < RANK_DEFICIENCY_RTOL * diag[0]):
        warnings.warn(
            "orth: input is numerically rank deficient; trailing basis "
            "directions are arbitrary",
            RankDeficiencyWarning,
            stacklevel=2,
        )
    elif diag.size and diag[0] == 0:
        warnings.warn(
            "orth: input is identically zero; returned basis is arbitrary",
            RankDeficiencyWarning,
            stacklevel=2,
        )
    return factors.q


def _power_norm(m, rtol=POWER_RTOL, maxiter=POWER_MAXITER):
    """Largest singular value via power iteration on the Gram operator."""
    # A deterministic seeded start keeps the whole function pure; a Gaussian
    # start vector is almost surely not orthogonal to the top singular vector.
    v = gaussian_matrix(m.shape[1], 1, seed=0x5EED).ravel()
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(maxiter):
        w = m @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = m.T @ w
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return 0.0
        v /= nv
        new_estimate = nv / nw  # ||A^T w|| / ||w|| -> sigma_1
        if abs(new_estimate - estimate) <= rtol * max(new_estimate, 1e-300):
            return new_estimate
        estimate = new_estimate
    raise ConvergenceError(
        f"power iteration did not reach relative tolerance {rtol:g} "
        f"within {maxiter} iterations",
        estimate=estimate,
    )


def spectral_norm(m):
    """Largest singular value of ``m``.

    Uses a dense SVD up to ``DENSE_NORM_LIMIT`` in the larger dimension and
    power iteration on the Gram operator beyond that (relative tolerance
    ``1e-10``, at most ``5000`` iterations).  Power-iteration failure raises
    :class:`~pbpqlp.exceptions.ConvergenceError` carrying the best estimate.
    """
    m = check_matrix(m, "m")
    if max(m.shape) <= DENSE_NORM_LIMIT:
        return float(np.linalg.svd(m, compute_uv=False)[0])
    return float(_power_norm(m))
