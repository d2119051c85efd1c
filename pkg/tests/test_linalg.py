"""Dense kernel tests: QR, SVD, orthonormalization, norms, Gaussian draws."""

import numpy as np
import pytest

from pbpqlp import (
    MatrixInputError,
    RankDeficiencyWarning,
    column_pivoted_qr,
    gaussian_matrix,
    householder_qr,
    orth,
    spectral_norm,
    svd_full,
)

import oracles


def random_matrix(rows, cols, seed):
    return np.random.default_rng(seed).standard_normal((rows, cols))


class TestGaussianMatrix:
    def test_shape_and_determinism(self):
        a = gaussian_matrix(40, 7, seed=3)
        b = gaussian_matrix(40, 7, seed=3)
        assert a.shape == (40, 7)
        np.testing.assert_array_equal(a, b)

    def test_seed_changes_draw(self):
        assert not np.array_equal(gaussian_matrix(10, 4, 0), gaussian_matrix(10, 4, 1))

    def test_moments_are_standard_normal(self):
        a = gaussian_matrix(500, 400, seed=0)
        assert abs(a.mean()) < 0.01
        assert abs(a.std() - 1.0) < 0.01
        # tail mass beyond three sigma close to the normal value 2.7e-3
        tail = np.mean(np.abs(a) > 3.0)
        assert 0.001 < tail < 0.006

    def test_rejects_bad_shape(self):
        with pytest.raises(Exception):
            gaussian_matrix(0, 4, 0)


class TestHouseholderQr:
    @pytest.mark.parametrize("rows,cols", [(30, 30), (50, 20), (8, 8)])
    def test_reconstruction_and_structure(self, rows, cols):
        m = random_matrix(rows, cols, seed=rows + cols)
        q, r, perm = householder_qr(m)
        assert perm is None
        assert q.shape == (rows, cols)
        assert r.shape == (cols, cols)
        np.testing.assert_allclose(q @ r, m, atol=1e-12 * spectral_norm(m))
        np.testing.assert_allclose(q.T @ q, np.eye(cols), atol=1e-12)
        assert np.allclose(r, np.triu(r))

    def test_sign_convention_nonnegative_diagonal(self):
        m = random_matrix(25, 10, seed=5)
        _, r, _ = householder_qr(m)
        assert np.all(np.diagonal(r) >= 0)

    def test_wide_input_rejected_or_consistent(self):
        # economy QR of a wide matrix still reconstructs
        m = random_matrix(6, 9, seed=1)
        q, r, _ = householder_qr(m)
        np.testing.assert_allclose(q @ r, m, atol=1e-12)


class TestColumnPivotedQr:
    def test_reconstruction_with_permutation(self):
        m = random_matrix(40, 15, seed=2)
        q, r, perm = column_pivoted_qr(m)
        assert sorted(perm) == list(range(15))
        np.testing.assert_allclose(q @ r, m[:, perm], atol=1e-12 * spectral_norm(m))

    def test_diagonal_magnitudes_nonincreasing(self):
        m = random_matrix(60, 25, seed=9)
        _, r, _ = column_pivoted_qr(m)
        diag = np.abs(np.diagonal(r))
        assert np.all(diag[:-1] >= diag[1:] - 1e-14)

    def test_pivoting_beats_natural_order_on_graded_columns(self):
        m = random_matrix(30, 10, seed=4) * np.logspace(0, -8, 10)
        _, r, perm = column_pivoted_qr(m)
        # the largest column must be pivoted to the front
        assert perm[0] == int(np.argmax(np.linalg.norm(m, axis=0)))


class TestSvdFull:
    def test_factors_and_reconstruction(self):
        m = random_matrix(35, 20, seed=7)
        f = svd_full(m)
        np.testing.assert_allclose((f.u * f.s) @ f.v.T, m, atol=1e-11)
        np.testing.assert_allclose(f.u.T @ f.u, np.eye(20), atol=1e-12)
        np.testing.assert_allclose(f.v.T @ f.v, np.eye(20), atol=1e-12)
        assert np.all(f.s[:-1] >= f.s[1:])
        assert np.all(f.s >= 0)

    def test_values_match_gram_eigenvalue_roots(self):
        m = random_matrix(45, 30, seed=11)
        f = svd_full(m)
        gram_roots = np.sqrt(np.maximum(np.linalg.eigvalsh(m.T @ m), 0.0))[::-1]
        np.testing.assert_allclose(f.s, gram_roots, atol=1e-10 * f.s[0])

    def test_truncate(self):
        m = random_matrix(20, 12, seed=3)
        f = svd_full(m).truncate(5)
        assert f.u.shape == (20, 5)
        assert f.s.shape == (5,)
        assert f.v.shape == (12, 5)


class TestOrth:
    def test_orthonormal_and_spanning(self):
        m = random_matrix(50, 12, seed=6)
        b = orth(m)
        assert b.shape == (50, 12)
        np.testing.assert_allclose(b.T @ b, np.eye(12), atol=1e-12)
        # same span: projecting m onto the basis reproduces m
        np.testing.assert_allclose(b @ (b.T @ m), m, atol=1e-11)

    def test_rank_deficient_input_warns(self):
        m = random_matrix(30, 4, seed=8)
        m = np.hstack([m, m[:, :2]])  # two duplicated columns
        with pytest.warns(RankDeficiencyWarning):
            b = orth(m)
        np.testing.assert_allclose(b.T @ b, np.eye(6), atol=1e-10)


class TestSpectralNorm:
    def test_matches_dense_svd(self):
        m = random_matrix(80, 60, seed=12)
        exact = float(np.linalg.svd(m, compute_uv=False)[0])
        assert abs(spectral_norm(m) - exact) <= 1e-9 * exact

    def test_matches_independent_power_route(self):
        m = random_matrix(40, 40, seed=13)
        independent = oracles.power_method_norm(m)
        assert abs(spectral_norm(m) - independent) <= 1e-8 * independent

    def test_zero_matrix(self):
        assert spectral_norm(np.zeros((5, 3))) == 0.0

    def test_rejects_non_finite(self):
        m = np.ones((4, 4))
        m[2, 2] = np.nan
        with pytest.raises(MatrixInputError):
            spectral_norm(m)
