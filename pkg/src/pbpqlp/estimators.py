"""Scikit-learn style transformer wrappers around the factorization routines.

Each estimator follows the ``fit`` / ``transform`` protocol: ``fit`` factorizes
the training matrix and stores the learned row-space basis, ``transform`` maps
a matrix with the same number of columns onto that basis, and
``inverse_transform`` lifts coordinates back to the ambient space, so
``inverse_transform(transform(X))`` is the estimator's low-rank approximation
of ``X``.  Hyperparameters live in ``__init__`` untouched (``get_params`` /
``set_params`` work as usual); everything learned carries a trailing
underscore.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .algorithms import cor_utv, pbp_qlp, pivoted_qlp, r_svd, truncated_svd
from .analysis import singular_value_estimates
from .exceptions import DimensionError
from .validation import check_count, check_matrix

__all__ = [
    "PbpQlp",
    "RandomizedSvd",
    "CorUtv",
    "PivotedQlp",
    "TruncatedSvd",
]


class _LowRankTransformer(BaseEstimator, TransformerMixin):
    """Shared plumbing: validation, fitted state, transform algebra.

    Subclasses implement ``_factorize(x)`` returning a factor object and
    ``_row_basis(factors)`` returning the orthonormal row-space basis whose
    first ``n_components_`` columns define the transform.
    """

    def fit(self, X, y=None):
        """Factorize ``X`` and store the learned basis and spectrum."""
        x = check_matrix(X, "X")
        limit = min(x.shape)
        rank = check_count(self.n_components, "n_components", minimum=1, maximum=limit)
        self.n_components_ = rank
        self.factors_ = self._factorize(x)
        basis = self._row_basis(self.factors_)
        self.components_ = np.ascontiguousarray(basis[:, :rank].T)
        self.singular_values_ = singular_value_estimates(self.factors_)[:rank]
        self.n_features_in_ = x.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "factors_"):
            raise NotFittedError(
                f"{type(self).__name__} is not fitted yet; call fit first"
            )

    def transform(self, X):
        """Coordinates of each row of ``X`` in the learned row-space basis."""
        self._check_fitted()
        x = check_matrix(X, "X")
        if x.shape[1] != self.n_features_in_:
            raise DimensionError(
                f"X has {x.shape[1]} columns but the estimator was fitted "
                f"with {self.n_features_in_}"
            )
        return x @ self.components_.T

    def inverse_transform(self, X):
        """Lift transformed coordinates back to the original column space."""
        self._check_fitted()
        x = check_matrix(X, "X")
        if x.shape[1] != self.n_components_:
            raise DimensionError(
                f"X has {x.shape[1]} columns but the fitted basis has "
                f"{self.n_components_} components"
            )
        return x @ self.components_


class PbpQlp(_LowRankTransformer):
    """Randomized QLP factorization driven by a row-space sketch.

    ``fit`` computes the rank-``n_components`` factorization ``Q L P^T`` with
    ``q`` power-iteration rounds; ``components_`` holds the first columns of
    ``P`` transposed, so ``inverse_transform(transform(X))`` reproduces the
    factorization's low-rank approximation.  ``reorthonormalize=False``
    selects the cheaper power-iteration variant without orthonormalization
    between applications, which trades accuracy near round-off for speed.
    """

    def __init__(self, n_components, q=0, seed=0, reorthonormalize=True):
        self.n_components = n_components
        self.q = q
        self.seed = seed
        self.reorthonormalize = reorthonormalize

    def _factorize(self, x):
        return pbp_qlp(
            x,
            self.n_components,
            q=self.q,
            seed=self.seed,
            reorthonormalize=self.reorthonormalize,
        )

    def _row_basis(self, factors):
        return factors.p_basis


class RandomizedSvd(_LowRankTransformer):
    """Randomized truncated SVD via a column-space sketch and two passes."""

    def __init__(self, n_components, q=0, seed=0, reorthonormalize=True):
        self.n_components = n_components
        self.q = q
        self.seed = seed
        self.reorthonormalize = reorthonormalize

    def _factorize(self, x):
        return r_svd(
            x,
            self.n_components,
            q=self.q,
            seed=self.seed,
            reorthonormalize=self.reorthonormalize,
        )

    def _row_basis(self, factors):
        return factors.v


class CorUtv(_LowRankTransformer):
    """Randomized rank-revealing UTV via compressed orthogonal bases.

    ``pass_efficient=True`` estimates the core matrix from the sketch products
    alone, trading one pass over the input for a pseudoinverse solve.
    """

    def __init__(
        self, n_components, q=0, seed=0, pass_efficient=False, reorthonormalize=True
    ):
        self.n_components = n_components
        self.q = q
        self.seed = seed
        self.pass_efficient = pass_efficient
        self.reorthonormalize = reorthonormalize

    def _factorize(self, x):
        return cor_utv(
            x,
            self.n_components,
            q=self.q,
            seed=self.seed,
            pass_efficient=self.pass_efficient,
            reorthonormalize=self.reorthonormalize,
        )

    def _row_basis(self, factors):
        return factors.v


class PivotedQlp(_LowRankTransformer):
    """Deterministic two-step pivoted QLP (requires rows >= columns)."""

    def __init__(self, n_components):
        self.n_components = n_components

    def _factorize(self, x):
        return pivoted_qlp(x)

    def _row_basis(self, factors):
        return factors.p_basis


class TruncatedSvd(_LowRankTransformer):
    """Exact truncated SVD baseline (optimal low-rank approximation)."""

    def __init__(self, n_components):
        self.n_components = n_components

    def _factorize(self, x):
        return truncated_svd(x, self.n_components)

    def _row_basis(self, factors):
        return factors.v
