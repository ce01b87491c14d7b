import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from skimage.metrics import structural_similarity as sk_ssim

from gmq.errors import DimensionMismatch, TooSmall
from gmq.metrics import dssim, iou, ssim
from gmq.raster import MaskImage


def sk_oracle(a, b):
    """Reference SSIM: Gaussian-weighted 11x11 window, sigma 1.5, L = 1."""
    return sk_ssim(a, b, data_range=1.0, gaussian_weights=True, sigma=1.5,
                   use_sample_covariance=False)


class TestIou:
    def test_identical_nonempty(self):
        m = np.zeros((10, 10))
        m[2:5, 3:8] = 1.0
        assert iou(m, m) == 1.0

    def test_disjoint(self):
        a = np.zeros((10, 10))
        b = np.zeros((10, 10))
        a[:2] = 1.0
        b[5:] = 1.0
        assert iou(a, b) == 0.0

    def test_half_overlap(self):
        b = np.zeros((10, 10))
        b[:, :] = 1.0
        a = np.zeros((10, 10))
        a[:, :5] = 1.0
        assert iou(a, b) == 0.5

    def test_both_empty_convention(self):
        z = np.zeros((4, 4))
        assert iou(z, z) == 1.0

    def test_binarization_threshold(self):
        a = np.full((4, 4), 0.502)  # a 128-valued 8-bit pixel
        b = np.ones((4, 4))
        assert iou(a, b) == 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            iou(np.zeros((3, 3)), np.zeros((4, 4)))

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 10**6))
    def test_symmetry_and_permutation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        a = (rng.uniform(size=(8, 8)) > 0.5).astype(float)
        b = (rng.uniform(size=(8, 8)) > 0.5).astype(float)
        assert iou(a, b) == iou(b, a)
        perm = rng.permutation(64)
        ap = a.ravel()[perm].reshape(8, 8)
        bp = b.ravel()[perm].reshape(8, 8)
        assert iou(ap, bp) == pytest.approx(iou(a, b), abs=1e-12)


class TestDssim:
    def test_identical_images(self):
        rng = np.random.default_rng(1)
        a = rng.uniform(size=(32, 32))
        assert dssim(a, a) == pytest.approx(0.0, abs=1e-12)

    def test_constant_zero_vs_one(self):
        a = np.zeros((16, 16))
        b = np.ones((16, 16))
        want = (1.0 - sk_oracle(a, b)) / 2.0
        assert dssim(a, b) == pytest.approx(want, abs=1e-9)
        # structure terms cancel; luminance term leaves C1 / (1 + C1)
        assert dssim(a, b) == pytest.approx((1.0 - 1e-4 / (1.0 + 1e-4)) / 2.0, abs=1e-9)

    def test_agrees_with_reference_implementation(self):
        rng = np.random.default_rng(2)
        for _ in range(8):
            a = rng.uniform(size=(24, 31))
            b = np.clip(a + rng.normal(scale=0.2, size=a.shape), 0, 1)
            assert ssim(a, b) == pytest.approx(sk_oracle(a, b), abs=1e-6)

    def test_binary_masks_against_reference(self):
        rng = np.random.default_rng(3)
        a = (rng.uniform(size=(64, 64)) > 0.7).astype(float)
        b = (rng.uniform(size=(64, 64)) > 0.7).astype(float)
        assert dssim(a, b) == pytest.approx((1 - sk_oracle(a, b)) / 2, abs=1e-6)

    def test_symmetry(self):
        rng = np.random.default_rng(4)
        a = rng.uniform(size=(20, 20))
        b = rng.uniform(size=(20, 20))
        assert dssim(a, b) == pytest.approx(dssim(b, a), abs=1e-12)

    def test_accepts_mask_image(self):
        m = MaskImage(data=np.zeros((16, 16)))
        assert dssim(m, m) == 0.0

    def test_too_small(self):
        with pytest.raises(TooSmall):
            dssim(np.zeros((8, 8)), np.zeros((8, 8)))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            dssim(np.zeros((16, 16)), np.zeros((16, 17)))

    def test_range(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            a = rng.uniform(size=(16, 16))
            b = rng.uniform(size=(16, 16))
            assert 0.0 <= dssim(a, b) <= 1.0
