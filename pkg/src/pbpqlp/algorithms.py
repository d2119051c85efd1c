"""Randomized and deterministic rank-revealing factorizations.

Five factorizations with one calling convention:

* :func:`pbp_qlp` — sketch the row space, orthonormalize, then two unpivoted
  QRs produce ``A ~ Q @ L @ P.T`` with lower-triangular ``L`` whose diagonal
  (the L-values) estimates the singular values.
* :func:`r_svd` — range-finder sketch followed by a small dense SVD.
* :func:`cor_utv` — sketches of both the column and the row space compressed
  into a small core, factored by column-pivoted QR into ``U @ T @ V.T``.
* :func:`pivoted_qlp` — deterministic two-stage column-pivoted QR
  (no sketching), the classical QLP decomposition.
* :func:`truncated_svd` — leading triplets of the dense SVD, the optimality
  reference.

The three randomized routines share the power-iteration scheme: ``q``
alternating applications of ``A`` and ``A.T`` sharpen the sketch, with an
orthonormalization between every application so that components below
``sigma_1 * eps`` survive roundoff.  Passing ``reorthonormalize=False``
selects the plain variant, kept solely to demonstrate the accuracy floor
around ``sigma_1 * sqrt(eps)`` that squared applications incur.

Every routine counts its passes over ``A`` (applications of ``A`` or ``A.T``
to a dense block) in the returned sketch record.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import ParameterError
from .linalg import (
    column_pivoted_qr,
    gaussian_matrix,
    householder_qr,
    orth,
    svd_full,
)
from .validation import check_count, check_index_range, check_matrix

__all__ = [
    "SketchRecord",
    "QlpFactors",
    "RsvdFactors",
    "UtvFactors",
    "pbp_qlp",
    "r_svd",
    "cor_utv",
    "pivoted_qlp",
    "truncated_svd",
]

#: Singular values of the small pass-efficient core below this multiple of the
#: largest one are treated as zero when the core requires a pseudoinverse.
PINV_RTOL = 1e-12


@dataclass(frozen=True)
class SketchRecord:
    """Provenance of one randomized factorization.

    ``test_matrix`` is the Gaussian sketch (regenerable bitwise from its shape
    and ``seed``), ``q`` the power-iteration exponent, and ``passes_over_a``
    the instrumented number of applications of ``A``/``A.T`` to dense blocks.
    """

    test_matrix: np.ndarray
    seed: int
    d: int
    q: int
    passes_over_a: int


@dataclass(frozen=True)
class QlpFactors:
    """Two-sided triangular factorization ``A ~ q_basis @ l @ p_basis.T``.

    ``first_stage_r`` is the upper-triangular factor of the first unpivoted QR
    (its absolute diagonal gives the R-values); ``l`` is lower triangular with
    nonnegative diagonal (the L-values).  ``sketch`` is ``None`` for the
    deterministic pivoted variant.
    """

    q_basis: np.ndarray
    l: np.ndarray
    p_basis: np.ndarray
    first_stage_r: np.ndarray
    sketch: Optional[SketchRecord] = None

    @property
    def l_values(self):
        """Diagonal of ``l`` (nonnegative by the QR sign convention)."""
        return np.diagonal(self.l).copy()

    @property
    def r_values(self):
        """Absolute diagonal of ``first_stage_r``."""
        return np.abs(np.diagonal(self.first_stage_r))

    def approx(self, rank=None):
        """Low-rank reconstruction, optionally truncated to ``rank``."""
        if rank is None:
            return self.q_basis @ self.l @ self.p_basis.T
        rank = check_index_range(rank, "rank", 1, self.l.shape[0])
        return self.q_basis[:, :rank] @ self.l[:rank, :rank] @ self.p_basis[:, :rank].T

    def r_blocks(self, k):
        """Partition ``first_stage_r`` at ``k``: leading, coupling, trailing."""
        k = check_index_range(k, "k", 1, self.first_stage_r.shape[0] - 1)
        r = self.first_stage_r
        return r[:k, :k], r[:k, k:], r[k:, k:]

    def l_blocks(self, k):
        """Partition ``l`` at ``k``: leading, subdiagonal, trailing."""
        k = check_index_range(k, "k", 1, self.l.shape[0] - 1)
        l = self.l
        return l[:k, :k], l[k:, :k], l[k:, k:]

    def projection_basis(self):
        """The orthonormal basis the second-stage QR rotated away.

        Reconstructs the pre-rotation row-space basis ``p_basis @ w.T`` where
        ``w`` is the orthogonal factor of the second-stage QR; applying ``A``
        to it reproduces the matrix whose QR produced ``first_stage_r``.
        """
        w = householder_qr(self.first_stage_r.T).q
        return self.p_basis @ w.T


@dataclass(frozen=True)
class RsvdFactors:
    """Rank-``d`` SVD estimate ``u @ diag(s) @ v.T`` plus its sketch record."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    sketch: SketchRecord

    def approx(self):
        """Reconstruct ``u @ diag(s) @ v.T``."""
        return (self.u * self.s) @ self.v.T


@dataclass(frozen=True)
class UtvFactors:
    """Compressed factorization ``A ~ u @ t @ v.T`` with triangular ``t``.

    ``pass_efficient`` records which core path built ``t``;
    ``pinv_truncated`` flags that the pass-efficient core needed a truncated
    pseudoinverse because the sample Gram factor was numerically singular.
    """

    u: np.ndarray
    t: np.ndarray
    v: np.ndarray
    pass_efficient: bool
    sketch: SketchRecord
    pinv_truncated: bool = False

    @property
    def t_values(self):
        """Absolute diagonal of ``t``."""
        return np.abs(np.diagonal(self.t))

    def approx(self):
        """Reconstruct ``u @ t @ v.T``."""
        return self.u @ self.t @ self.v.T


class _PassCounter:
    """Applies ``a`` or ``a.T`` to dense blocks while counting passes."""

    def __init__(self, a):
        self.a = a
        self.count = 0

    def apply(self, block):
        self.count += 1
        return self.a @ block

    def apply_t(self, block):
        self.count += 1
        return self.a.T @ block


def _check_sketch_params(d, q, n_limit):
    if not 1 <= d <= n_limit:
        raise ParameterError(f"d must be in [1, {n_limit}], got {d}")
    check_count(q, "q", minimum=0)


def _power_iterations(counter, basis, q, transpose_first):
    """Run ``q`` orthonormalized power iterations starting from ``basis``.

    ``transpose_first`` selects whether each iteration applies ``A`` before
    ``A.T`` (for a row-space basis) or the other way around (column space).
    """
    for _ in range(q):
        if transpose_first:
            basis = orth(counter.apply(basis))
            basis = orth(counter.apply_t(basis))
        else:
            basis = orth(counter.apply_t(basis))
            basis = orth(counter.apply(basis))
    return basis


def pbp_qlp(a, d, q=0, seed=0, reorthonormalize=True):
    """Projection-based partial QLP factorization of ``a``.

    Sketches the row space with a Gaussian test matrix, optionally sharpens it
    with ``q`` orthonormalized power iterations, then factors the projected
    matrix with two unpivoted QRs:

    1. ``c = a.T @ phi``; ``pbar = orth(c)``; power iterations on ``pbar``.
    2. ``dmat = a @ pbar``; ``(qfac, rfac) = qr(dmat)``.
    3. ``(w, rt) = qr(rfac.T)``; ``l = rt.T``; ``p = pbar @ w``.

    Uses ``2*q + 2`` passes over ``a``.  Deterministic for fixed arguments.

    Parameters
    ----------
    a : array_like, shape (n1, n2)
    d : int
        Number of sketch columns, ``1 <= d <= min(n1, n2)``.
    q : int
        Power-iteration exponent (``q = 0`` is the basic scheme).
    seed : int
        Key for the Gaussian sketch.
    reorthonormalize : bool
        When ``False``, power iterations multiply without intermediate
        orthonormalization (accuracy-floor demonstration only).

    Returns
    -------
    QlpFactors
    """
    a = check_matrix(a, "a")
    n1, n2 = a.shape
    _check_sketch_params(d, q, min(n1, n2))
    phi = gaussian_matrix(n1, d, seed)
    counter = _PassCounter(a)

    c = counter.apply_t(phi)
    if reorthonormalize:
        pbar = orth(c)
        pbar = _power_iterations(counter, pbar, q, transpose_first=True)
    else:
        for _ in range(q):
            c = counter.apply_t(counter.apply(c))
        pbar = orth(c)

    dmat = counter.apply(pbar)
    qfac, rfac, _ = householder_qr(dmat)
    w, rt, _ = householder_qr(rfac.T)
    l = np.tril(rt.T)
    p = pbar @ w
    sketch = SketchRecord(phi, int(seed), d, q, counter.count)
    return QlpFactors(qfac, l, p, rfac, sketch)


def r_svd(a, d, q=0, seed=0, reorthonormalize=True):
    """Randomized SVD of ``a`` with rank parameter ``d``.

    Sketches the column space (``f = a @ omega``), optionally sharpens it with
    ``q`` orthonormalized power iterations, projects (``g = ubar.T @ a``), and
    takes the dense SVD of the small projection.  Uses ``2*q + 2`` passes.

    Returns
    -------
    RsvdFactors
    """
    a = check_matrix(a, "a")
    n1, n2 = a.shape
    _check_sketch_params(d, q, n2)
    omega = gaussian_matrix(n2, d, seed)
    counter = _PassCounter(a)

    f = counter.apply(omega)
    if reorthonormalize:
        ubar = orth(f)
        ubar = _power_iterations(counter, ubar, q, transpose_first=False)
    else:
        for _ in range(q):
            f = counter.apply(counter.apply_t(f))
        ubar = orth(f)

    g = counter.apply_t(ubar).T  # = ubar.T @ a, one pass
    core = svd_full(g)
    sketch = SketchRecord(omega, int(seed), d, q, counter.count)
    return RsvdFactors(ubar @ core.u, core.s, core.v, sketch)


def _transposed_pinv_apply(r1, core):
    """Return ``pinv(r1).T @ core`` with the documented singular cutoff."""
    u, s, v = svd_full(r1)
    if s[0] == 0.0:
        return np.zeros_like(core), True
    keep = s > PINV_RTOL * s[0]
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (u * inv) @ (v.T @ core), bool(not keep.all())


def cor_utv(a, d, q=0, seed=0, pass_efficient=False, reorthonormalize=True):
    """Compressed randomized UTV factorization of ``a``.

    Builds orthonormal bases for the column space (``ubar``, from
    ``f1 = a @ omega``) and the row space (``vbar``, from ``f2``), compresses
    ``a`` into the ``d x d`` core ``ubar.T @ a @ vbar``, and factors the core
    by column-pivoted QR.

    The exact core path spends one extra pass over ``a``
    (``2*q + 3`` in total).  With ``pass_efficient=True`` the core is derived
    from the samples already in hand (``2*q + 2`` passes): under
    reorthonormalization ``f2 = a.T @ ubar`` makes ``f2.T @ vbar`` exact;
    without it the sample Gram factor ``ubar.T @ f1`` must be inverted, via a
    pseudoinverse with cutoff ``1e-12`` times its largest singular value
    (``pinv_truncated`` flags when the cutoff was active).

    Returns
    -------
    UtvFactors
    """
    a = check_matrix(a, "a")
    n1, n2 = a.shape
    _check_sketch_params(d, q, n2)
    omega = gaussian_matrix(n2, d, seed)
    counter = _PassCounter(a)

    f1 = counter.apply(omega)
    if reorthonormalize:
        ubar = orth(f1)
        ubar = _power_iterations(counter, ubar, q, transpose_first=False)
        f2 = counter.apply_t(ubar)
        gram = None
    else:
        for _ in range(q):
            f1 = counter.apply(counter.apply_t(f1))
        ubar = orth(f1)
        f2 = counter.apply_t(f1)
        gram = ubar.T @ f1
    vbar = orth(f2)

    pinv_truncated = False
    if pass_efficient:
        core = f2.T @ vbar
        if gram is not None:
            core, pinv_truncated = _transposed_pinv_apply(gram, core)
    else:
        core = ubar.T @ counter.apply(vbar)

    cp = column_pivoted_qr(core)
    sketch = SketchRecord(omega, int(seed), d, q, counter.count)
    return UtvFactors(
        u=ubar @ cp.q,
        t=cp.r,
        v=vbar[:, cp.perm],
        pass_efficient=bool(pass_efficient),
        sketch=sketch,
        pinv_truncated=pinv_truncated,
    )


def pivoted_qlp(a):
    """Deterministic QLP factorization via two column-pivoted QRs.

    First ``a[:, perm1] = q1 @ r1``, then ``r1.T[:, perm2] = w @ lt``; the
    result is the full factorization ``a = q_basis @ l @ p_basis.T`` with
    lower-triangular ``l`` whose diagonal (the L-values) tracks the singular
    values far more closely than the first-stage pivots.

    Requires ``n1 >= n2``.
    """
    a = check_matrix(a, "a")
    n1, n2 = a.shape
    if n1 < n2:
        raise ParameterError(
            f"pivoted_qlp requires at least as many rows as columns, got {a.shape}"
        )
    first = column_pivoted_qr(a)
    second = column_pivoted_qr(first.r.T)
    l = np.tril(second.r.T)
    q_basis = first.q[:, second.perm]
    p_basis = np.empty((n2, n2))
    p_basis[first.perm, :] = second.q
    return QlpFactors(q_basis, l, p_basis, first.r, sketch=None)


def truncated_svd(a, r):
    """Best rank-``r`` approximation factors (leading SVD triplets)."""
    a = check_matrix(a, "a")
    r = check_index_range(r, "r", 1, min(a.shape))
    return svd_full(a).truncate(r)
