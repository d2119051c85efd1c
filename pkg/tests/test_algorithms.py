"""Factorization algorithm tests: structure, exactness, passes, variants."""

import numpy as np
import pytest

from pbpqlp import (
    ParameterError,
    cor_utv,
    orth,
    pbp_qlp,
    pivoted_qlp,
    r_svd,
    spectral_norm,
    truncated_svd,
)


def planted(rows, cols, values, seed):
    """A matrix with exactly the given singular values (random factors)."""
    rng = np.random.default_rng(seed)
    u = orth(rng.standard_normal((rows, len(values))))
    v = orth(rng.standard_normal((cols, len(values))))
    return (u * np.asarray(values, dtype=float)) @ v.T


def assert_orthonormal(b, atol=1e-11):
    np.testing.assert_allclose(b.T @ b, np.eye(b.shape[1]), atol=atol)


class TestTwoSidedRandomized:
    def test_factor_structure(self):
        a = planted(60, 45, np.geomspace(1, 1e-3, 30), seed=0)
        f = pbp_qlp(a, 12, q=1, seed=3)
        assert f.q_basis.shape == (60, 12)
        assert f.l.shape == (12, 12)
        assert f.p_basis.shape == (45, 12)
        assert f.first_stage_r.shape == (12, 12)
        assert_orthonormal(f.q_basis)
        assert_orthonormal(f.p_basis)
        assert np.allclose(f.l, np.tril(f.l))
        assert np.allclose(f.first_stage_r, np.triu(f.first_stage_r))
        assert np.all(f.l_values >= 0)

    def test_exact_rank_recovery(self):
        values = np.linspace(1, 0.1, 10)
        a = planted(50, 40, values, seed=1)
        f = pbp_qlp(a, 10, seed=5)
        assert spectral_norm(a - f.approx()) <= 1e-12
        np.testing.assert_allclose(
            np.linalg.svd(f.l, compute_uv=False), values, atol=1e-12
        )

    def test_deterministic_per_seed(self):
        a = planted(40, 30, np.geomspace(1, 1e-2, 20), seed=2)
        f1 = pbp_qlp(a, 8, q=1, seed=9)
        f2 = pbp_qlp(a, 8, q=1, seed=9)
        np.testing.assert_array_equal(f1.l, f2.l)
        np.testing.assert_array_equal(f1.q_basis, f2.q_basis)
        f3 = pbp_qlp(a, 8, q=1, seed=10)
        assert not np.array_equal(f1.l, f3.l)

    @pytest.mark.parametrize("q", [0, 1, 3])
    def test_pass_count(self, q):
        a = planted(30, 25, np.geomspace(1, 1e-2, 15), seed=3)
        assert pbp_qlp(a, 6, q=q, seed=0).sketch.passes_over_a == 2 * q + 2
        assert (
            pbp_qlp(a, 6, q=q, seed=0, reorthonormalize=False).sketch.passes_over_a
            == 2 * q + 2
        )

    def test_triangular_factors_share_singular_values(self):
        a = planted(50, 50, np.geomspace(1, 1e-4, 35), seed=4)
        f = pbp_qlp(a, 14, q=0, seed=2)
        s_l = np.linalg.svd(f.l, compute_uv=False)
        s_r = np.linalg.svd(f.first_stage_r, compute_uv=False)
        np.testing.assert_allclose(s_l, s_r, atol=1e-13)
        s_d = np.linalg.svd(a @ f.p_basis, compute_uv=False)
        np.testing.assert_allclose(s_l, s_d, atol=1e-12)

    def test_reorth_flag_is_identity_at_zero_power(self):
        a = planted(40, 30, np.geomspace(1, 1e-2, 20), seed=5)
        f1 = pbp_qlp(a, 8, q=0, seed=1, reorthonormalize=True)
        f2 = pbp_qlp(a, 8, q=0, seed=1, reorthonormalize=False)
        np.testing.assert_array_equal(f1.l, f2.l)

    def test_power_iteration_tightens_estimates(self):
        a = planted(80, 80, np.exp(-np.arange(1, 41) / 6.0), seed=6)
        exact = np.linalg.svd(a, compute_uv=False)[0]
        err0 = abs(np.max(pbp_qlp(a, 10, q=0, seed=3).l_values) - exact)
        err2 = abs(np.max(pbp_qlp(a, 10, q=2, seed=3).l_values) - exact)
        assert err2 <= err0

    def test_parameter_validation(self):
        a = planted(20, 15, np.linspace(1, 0.5, 5), seed=7)
        with pytest.raises(ParameterError):
            pbp_qlp(a, 0)
        with pytest.raises(ParameterError):
            pbp_qlp(a, 16)
        with pytest.raises(ParameterError):
            pbp_qlp(a, 5, q=-1)


class TestRandomizedSvd:
    def test_exact_rank_recovery_and_orthogonality(self):
        values = np.linspace(2, 0.2, 12)
        a = planted(45, 35, values, seed=8)
        f = r_svd(a, 12, seed=1)
        assert spectral_norm(a - f.approx()) <= 1e-12
        np.testing.assert_allclose(f.s, values, atol=1e-12)
        assert_orthonormal(f.u)
        assert_orthonormal(f.v)

    def test_pass_count(self):
        a = planted(30, 25, np.geomspace(1, 1e-2, 15), seed=9)
        assert r_svd(a, 6, q=2, seed=0).sketch.passes_over_a == 6

    def test_reorth_flag_is_identity_at_zero_power(self):
        a = planted(40, 30, np.geomspace(1, 1e-2, 20), seed=10)
        f1 = r_svd(a, 8, q=0, seed=1, reorthonormalize=True)
        f2 = r_svd(a, 8, q=0, seed=1, reorthonormalize=False)
        np.testing.assert_array_equal(f1.s, f2.s)


class TestCompressedUtv:
    def test_exact_core_path(self):
        values = np.linspace(1, 0.1, 10)
        a = planted(50, 40, values, seed=11)
        f = cor_utv(a, 10, seed=2)
        assert not f.pass_efficient
        assert f.sketch.passes_over_a == 3
        assert spectral_norm(a - f.approx()) <= 1e-12
        assert_orthonormal(f.u)
        assert_orthonormal(f.v)
        assert np.allclose(f.t, np.triu(f.t))

    @pytest.mark.parametrize("reorthonormalize", [True, False])
    def test_pass_efficient_path_matches_exact_rank(self, reorthonormalize):
        values = np.linspace(1, 0.1, 10)
        a = planted(100, 80, values, seed=12)
        f = cor_utv(a, 20, seed=3, pass_efficient=True, reorthonormalize=reorthonormalize)
        assert f.pass_efficient
        assert f.sketch.passes_over_a == 2
        assert spectral_norm(a - f.approx()) <= 1e-8 * values[0]

    def test_identity_reconstruction(self):
        eye = np.eye(4)
        for pass_efficient in (False, True):
            f = cor_utv(eye, 4, seed=0, pass_efficient=pass_efficient)
            assert spectral_norm(eye - f.approx()) <= 1e-12

    def test_pass_efficient_flags_truncated_pseudoinverse(self):
        # numerically rank-deficient sample Gram factor triggers the cutoff
        values = np.array([1.0, 1e-14, 1e-15])
        a = planted(30, 20, values, seed=13)
        f = cor_utv(a, 6, seed=1, pass_efficient=True, reorthonormalize=False)
        assert f.pinv_truncated


class TestPivotedQlp:
    def test_full_reconstruction_and_structure(self):
        rng = np.random.default_rng(14)
        a = rng.standard_normal((40, 25))
        f = pivoted_qlp(a)
        assert spectral_norm(a - f.approx()) <= 1e-11 * spectral_norm(a)
        assert np.allclose(f.l, np.tril(f.l))
        assert f.sketch is None
        assert_orthonormal(f.q_basis)
        assert_orthonormal(f.p_basis)

    def test_l_values_track_singular_values(self):
        a = planted(60, 40, np.geomspace(1, 1e-6, 40), seed=15)
        f = pivoted_qlp(a)
        s = np.linalg.svd(a, compute_uv=False)
        ratios = np.sort(f.l_values)[::-1][:20] / s[:20]
        assert np.all(ratios > 0.3)
        assert np.all(ratios < 3.0)

    def test_wide_input_rejected(self):
        with pytest.raises(ParameterError):
            pivoted_qlp(np.ones((3, 5)))


class TestTruncatedSvd:
    def test_error_equals_next_singular_value(self):
        rng = np.random.default_rng(16)
        a = rng.standard_normal((30, 30))
        s = np.linalg.svd(a, compute_uv=False)
        f = truncated_svd(a, 8)
        err = spectral_norm(a - f.approx())
        assert abs(err - s[8]) <= 1e-10

    def test_rank_validation(self):
        a = np.eye(5)
        with pytest.raises(ParameterError):
            truncated_svd(a, 0)
        with pytest.raises(ParameterError):
            truncated_svd(a, 6)
