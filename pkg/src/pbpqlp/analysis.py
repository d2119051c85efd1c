"""Approximation metrics shared by the experiments and the guarantee checks.

This module measures factorizations rather than computing them: distances
between subspaces, rank-revealing block summaries, reconstruction-error
curves over the sampling size, and spectral-norm estimates read off the
triangular factors.  A small dispatcher (:func:`factorize`,
:func:`low_rank_approx`, :func:`singular_value_estimates`) gives every
algorithm a common interface keyed by a short id, which the command-line
harness reuses.
"""

import math

import numpy as np

from .algorithms import (
    QlpFactors,
    RsvdFactors,
    UtvFactors,
    cor_utv,
    pbp_qlp,
    pivoted_qlp,
    r_svd,
    truncated_svd,
)
from .exceptions import DimensionError, MatrixInputError, ParameterError
from .linalg import QrFactors, SvdFactors, column_pivoted_qr, spectral_norm
from .validation import check_count, check_index_range, check_matrix

__all__ = [
    "ALGORITHMS",
    "DETERMINISTIC_ALGORITHMS",
    "RANDOMIZED_ALGORITHMS",
    "DEFAULT_NORM_RATIO_SAMPLES",
    "ORTHONORMALITY_TOL",
    "subspace_distance",
    "rank_reveal_report",
    "factorize",
    "low_rank_approx",
    "singular_value_estimates",
    "error_curve",
    "l2_norm_ratio",
]

#: Largest allowed deviation of ``b.T @ b`` from the identity before a basis
#: is rejected as non-orthonormal.
ORTHONORMALITY_TOL = 1e-8

#: Sampling size used by :func:`l2_norm_ratio` (capped at the matrix size).
DEFAULT_NORM_RATIO_SAMPLES = 20

#: Algorithm ids accepted by :func:`factorize` and the harness.
DETERMINISTIC_ALGORITHMS = ("svd", "cpqr", "pqlp")
RANDOMIZED_ALGORITHMS = ("r_svd", "cor_utv", "pbp_qlp")
ALGORITHMS = DETERMINISTIC_ALGORITHMS + RANDOMIZED_ALGORITHMS


def _sv_max(block):
    """Largest singular value of a block; zero for an empty block."""
    if block.size == 0:
        return 0.0
    return float(np.linalg.svd(block, compute_uv=False)[0])


def _sv_min(block):
    """Smallest singular value of a block; zero for an empty block."""
    if block.size == 0:
        return 0.0
    return float(np.linalg.svd(block, compute_uv=False)[-1])


def _check_orthonormal(b, name):
    gram = b.T @ b
    deviation = float(np.linalg.norm(gram - np.eye(b.shape[1]), 2))
    if deviation > ORTHONORMALITY_TOL:
        raise MatrixInputError(
            f"{name} does not have orthonormal columns "
            f"(||b.T @ b - I||_2 = {deviation:.3e} > {ORTHONORMALITY_TOL:.0e})"
        )


def subspace_distance(b1, b2):
    """Spectral norm of the difference of the two orthogonal projectors.

    For orthonormal bases of equal shape this equals the sine of the largest
    canonical angle between the spanned subspaces, computed as the largest
    singular value of the residual ``b1 - b2 @ (b2.T @ b1)`` without forming
    any full-size projector.  Working with the residual rather than the
    cosines ``svdvals(b1.T @ b2)`` keeps full absolute precision for nearly
    coincident subspaces, where ``sqrt(1 - cos^2)`` would bottom out near
    ``sqrt(eps)``.

    Returns a value in ``[0, 1]``; symmetric in its arguments and invariant
    under right-multiplication of either basis by an orthogonal matrix.
    """
    b1 = check_matrix(b1, "b1")
    b2 = check_matrix(b2, "b2")
    if b1.shape != b2.shape:
        raise DimensionError(
            f"bases must have equal shapes, got {b1.shape} and {b2.shape}"
        )
    _check_orthonormal(b1, "b1")
    _check_orthonormal(b2, "b2")
    residual = b1 - b2 @ (b2.T @ b1)
    return min(1.0, _sv_max(residual))


def rank_reveal_report(factors, k):
    """Block summary of how well a QLP-type factorization reveals rank ``k``.

    Partitions the first-stage triangular factor ``R`` and the final factor
    ``L`` after row/column ``k`` and reports the quantities whose magnitudes
    separate when the numerical rank is revealed: the smallest singular value
    of each leading block, the norm of each trailing block, and the drop
    ``|R[k-1, k-1]| / |R[k, k]|`` across the diagonal (``gap_ratio``,
    infinite when the lower diagonal entry is exactly zero).
    """
    if not isinstance(factors, QlpFactors):
        raise ParameterError(
            f"rank_reveal_report expects QlpFactors, got {type(factors).__name__}"
        )
    r11, _, r22 = factors.r_blocks(k)
    l11, _, l22 = factors.l_blocks(k)
    diag = np.abs(np.diagonal(factors.first_stage_r))
    gap = math.inf if diag[k] == 0.0 else float(diag[k - 1] / diag[k])
    return {
        "sigma_min_R11": _sv_min(r11),
        "norm_R22": _sv_max(r22),
        "sigma_min_L11": _sv_min(l11),
        "sigma_1_L22": _sv_max(l22),
        "gap_ratio": gap,
    }


def factorize(a, algorithm, d, q=0, seed=0, reorthonormalize=True):
    """Run one algorithm selected by id and return its factor object.

    ``d`` is the truncation rank for ``svd`` and the sampling size for the
    randomized ids; the deterministic ``cpqr`` and ``pqlp`` factor the whole
    matrix and ignore ``d``, ``q``, and ``seed``.
    """
    a = check_matrix(a, "a")
    if algorithm == "svd":
        return truncated_svd(a, d)
    if algorithm == "cpqr":
        return column_pivoted_qr(a)
    if algorithm == "pqlp":
        return pivoted_qlp(a)
    if algorithm == "r_svd":
        return r_svd(a, d, q=q, seed=seed, reorthonormalize=reorthonormalize)
    if algorithm == "cor_utv":
        return cor_utv(a, d, q=q, seed=seed, reorthonormalize=reorthonormalize)
    if algorithm == "pbp_qlp":
        return pbp_qlp(a, d, q=q, seed=seed, reorthonormalize=reorthonormalize)
    raise ParameterError(
        f"unknown algorithm id {algorithm!r}; expected one of {ALGORITHMS}"
    )


def _pivoted_qr_approx(factors, rank):
    q, r, perm = factors
    rank = r.shape[0] if rank is None else check_index_range(rank, "rank", 1, r.shape[0])
    columns = q[:, :rank] @ r[:rank, :]
    if perm is None:
        return columns
    out = np.empty((q.shape[0], r.shape[1]))
    out[:, perm] = columns
    return out


def low_rank_approx(factors, rank=None):
    """Reconstruct the (optionally truncated) approximation from any factors."""
    if isinstance(factors, SvdFactors):
        return (factors.truncate(rank) if rank is not None else factors).approx()
    if isinstance(factors, QlpFactors):
        return factors.approx(rank)
    if isinstance(factors, QrFactors):
        return _pivoted_qr_approx(factors, rank)
    if isinstance(factors, RsvdFactors):
        if rank is None:
            return factors.approx()
        rank = check_index_range(rank, "rank", 1, factors.s.size)
        return (factors.u[:, :rank] * factors.s[:rank]) @ factors.v[:, :rank].T
    if isinstance(factors, UtvFactors):
        if rank is None:
            return factors.approx()
        rank = check_index_range(rank, "rank", 1, factors.t.shape[0])
        return factors.u[:, :rank] @ factors.t[:rank, :rank] @ factors.v[:, :rank].T
    raise ParameterError(
        f"cannot reconstruct from factors of type {type(factors).__name__}"
    )


def singular_value_estimates(factors):
    """Singular-value estimates read off a factor object.

    The triangular algorithms estimate through the absolute diagonal of their
    final triangular factor; the SVD-based ones return their computed spectrum.
    """
    if isinstance(factors, (SvdFactors, RsvdFactors)):
        return np.array(factors.s, dtype=np.float64, copy=True)
    if isinstance(factors, QlpFactors):
        return np.abs(factors.l_values)
    if isinstance(factors, UtvFactors):
        return np.array(factors.t_values, dtype=np.float64, copy=True)
    if isinstance(factors, QrFactors):
        return np.abs(np.diagonal(factors.r))
    raise ParameterError(
        f"cannot read singular-value estimates from {type(factors).__name__}"
    )


def error_curve(a, alg, d_values, q=0, seed=0, reorthonormalize=True):
    """Reconstruction error of ``alg`` on ``a`` for each rank in ``d_values``.

    Returns one record per requested ``d`` with keys ``d``,
    ``spectral_error``, and ``frobenius_error``.  Randomized algorithms draw a
    fresh sketch of size ``d`` for every point, all from the same ``seed``;
    deterministic algorithms are factored once and truncated.
    """
    a = check_matrix(a, "a")
    limit = min(a.shape)
    d_list = [check_index_range(d, "d", 1, limit) for d in d_values]
    if not d_list:
        raise ParameterError("d_values must contain at least one sampling size")
    if alg not in ALGORITHMS:
        raise ParameterError(f"unknown algorithm id {alg!r}; expected one of {ALGORITHMS}")

    base = None
    if alg in DETERMINISTIC_ALGORITHMS:
        base = factorize(a, alg, limit)
    records = []
    for d in d_list:
        if base is not None:
            approx = low_rank_approx(base, rank=d)
        else:
            fac = factorize(a, alg, d, q=q, seed=seed, reorthonormalize=reorthonormalize)
            approx = low_rank_approx(fac)
        residual = a - approx
        records.append(
            {
                "d": d,
                "spectral_error": spectral_norm(residual),
                "frobenius_error": float(np.linalg.norm(residual)),
            }
        )
    return records


def l2_norm_ratio(a, alg, q=0, seed=0, d=None, reorthonormalize=True):
    """Largest singular-value estimate of ``alg`` divided by the true norm.

    A ratio near 1 means the algorithm's triangular diagonal (or computed
    spectrum) tracks the spectral norm of ``a``.  ``d`` defaults to
    :data:`DEFAULT_NORM_RATIO_SAMPLES`, capped at the matrix size.
    """
    a = check_matrix(a, "a")
    if d is None:
        d = min(DEFAULT_NORM_RATIO_SAMPLES, min(a.shape))
    else:
        d = check_count(d, "d", minimum=1, maximum=min(a.shape))
    factors = factorize(a, alg, d, q=q, seed=seed, reorthonormalize=reorthonormalize)
    estimates = singular_value_estimates(factors)
    estimate = float(estimates.max()) if estimates.size else 0.0
    exact = spectral_norm(a)
    if exact == 0.0:
        return 0.0
    return estimate / exact
