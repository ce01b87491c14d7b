import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmq.errors import DegenerateBasis
from gmq.gauss import (
    CovParamsChol,
    CovParamsCondCorr,
    CovParamsEig,
    build_cov_cholesky,
    build_cov_cholesky_batch,
    build_cov_condcorr,
    build_cov_condcorr_batch,
    build_cov_eig,
    build_cov_eig_batch,
    cross_basis,
)

finite = st.floats(min_value=-20, max_value=20, allow_nan=False)
vec3 = st.tuples(finite, finite, finite).map(np.array)
# Beyond |raw| ~ 8 the correlation triple collapses toward a singular
# matrix whose true minimum eigenvalue sits below eigvalsh's noise floor.
corr_raw = st.floats(min_value=-8, max_value=8, allow_nan=False)


class TestEig:
    def test_zero_raws_give_midrange_isotropic(self):
        p = CovParamsEig(v1_raw=np.array([1.0, 0, 0]), v2_raw=np.array([0.0, 1, 0]),
                         eig_raw=np.zeros(3))
        np.testing.assert_allclose(build_cov_eig(p), 0.26 * np.eye(3), atol=1e-14)

    def test_basis_is_orthonormal(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            v = cross_basis(rng.normal(size=3), rng.normal(size=3))
            np.testing.assert_allclose(v.T @ v, np.eye(3), atol=1e-12)

    def test_eigenvalues_match_requested(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            eig_raw = rng.normal(scale=2, size=3)
            p = CovParamsEig(v1_raw=rng.normal(size=3), v2_raw=rng.normal(size=3),
                             eig_raw=eig_raw)
            want = 0.01 + 0.5 / (1 + np.exp(-eig_raw)) * (np.ones(3))
            got = np.sort(np.linalg.eigvalsh(build_cov_eig(p)))
            np.testing.assert_allclose(got, np.sort(want), atol=1e-10)

    def test_degenerate_cross_product_raises(self):
        v1 = np.array([1.0, 2.0, -0.5])
        with pytest.raises(DegenerateBasis):
            build_cov_eig(CovParamsEig(v1_raw=v1, v2_raw=3.0 * v1, eig_raw=np.zeros(3)))

    def test_batch_matches_scalar_and_handles_degenerate(self):
        rng = np.random.default_rng(5)
        v1 = rng.normal(size=(50, 3))
        v2 = rng.normal(size=(50, 3))
        eig = rng.normal(size=(50, 3))
        v1[7] = v2[7]  # parallel pair falls back instead of raising
        batch = build_cov_eig_batch(v1, v2, eig)
        for i in range(50):
            if i == 7:
                continue
            single = build_cov_eig(CovParamsEig(v1_raw=v1[i], v2_raw=v2[i], eig_raw=eig[i]))
            np.testing.assert_allclose(batch[i], single, atol=1e-14)
        assert np.linalg.eigvalsh(batch[7]).min() >= 0.01 - 1e-12

    @settings(max_examples=150, deadline=None)
    @given(v1=vec3, v2=vec3, eig=vec3)
    def test_spd_closure(self, v1, v2, eig):
        cov = build_cov_eig_batch(v1, v2, eig)
        assert np.allclose(cov, cov.T)
        assert np.linalg.eigvalsh(cov).min() >= 0.01 - 1e-12


class TestCholesky:
    def test_diagonal_clamps_to_upper_bound(self):
        p = CovParamsChol(diag_raw=np.zeros(3), offdiag=np.zeros(3))
        np.testing.assert_allclose(build_cov_cholesky(p), 0.51 * np.eye(3), atol=1e-14)

    def test_unclamped_identity(self):
        p = CovParamsChol(diag_raw=np.zeros(3), offdiag=np.zeros(3),
                          eig_lo=None, eig_hi=None)
        np.testing.assert_allclose(build_cov_cholesky(p), np.eye(3), atol=1e-15)

    def test_factor_layout(self):
        # offdiag order is (L21, L31, L32)
        p = CovParamsChol(diag_raw=np.log(np.array([0.3, 0.4, 0.5])),
                          offdiag=np.array([1.0, 2.0, 3.0]), eig_lo=None, eig_hi=None)
        l = np.array([[0.3, 0, 0], [1.0, 0.4, 0], [2.0, 3.0, 0.5]])
        np.testing.assert_allclose(build_cov_cholesky(p), l @ l.T, atol=1e-14)

    @settings(max_examples=150, deadline=None)
    @given(d=vec3, o=vec3)
    def test_spd_closure(self, d, o):
        cov = build_cov_cholesky_batch(d, o)
        assert np.allclose(cov, cov.T)
        assert np.linalg.eigvalsh(cov).min() > 0


class TestCondCorr:
    def test_zero_raws(self):
        p = CovParamsCondCorr(sigma_raw=np.zeros(3), c12_raw=0.0, c13_raw=0.0,
                              c23g1_raw=0.0)
        mid = 0.5 * (np.sqrt(0.01) + np.sqrt(0.51))
        np.testing.assert_allclose(build_cov_condcorr(p), mid**2 * np.eye(3), atol=1e-14)

    def test_partial_correlation_reduces_to_c23(self):
        rho_raw = 0.8
        p = CovParamsCondCorr(sigma_raw=np.zeros(3), c12_raw=0.0, c13_raw=0.0,
                              c23g1_raw=rho_raw)
        cov = build_cov_condcorr(p)
        mid = 0.5 * (np.sqrt(0.01) + np.sqrt(0.51))
        assert cov[1, 2] == pytest.approx(np.tanh(rho_raw) * mid * mid, rel=1e-12)
        assert cov[0, 1] == 0.0 and cov[0, 2] == 0.0

    def test_diagonal_bounds(self):
        rng = np.random.default_rng(6)
        raws = rng.normal(scale=4, size=(500, 3))
        cov = build_cov_condcorr_batch(raws, rng.normal(size=500),
                                       rng.normal(size=500), rng.normal(size=500))
        d = np.diagonal(cov, axis1=-2, axis2=-1)
        assert d.min() >= 0.01 and d.max() <= 0.51

    @settings(max_examples=150, deadline=None)
    @given(s=vec3, c12=corr_raw, c13=corr_raw, c23=corr_raw)
    def test_spd_closure(self, s, c12, c13, c23):
        cov = build_cov_condcorr_batch(s, c12, c13, c23)
        assert np.allclose(cov, cov.T)
        assert np.linalg.eigvalsh(cov).min() > 0
