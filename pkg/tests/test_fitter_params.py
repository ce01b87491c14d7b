import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmq.fitter import ParamLayout, reparameterize
from gmq.fitter.params import build_cov_batch


layouts = st.builds(
    ParamLayout,
    mode=st.sampled_from(["single", "canonical"]),
    param=st.sampled_from(["eig", "cholesky", "condcorr"]),
    k=st.integers(1, 4),
    n_images=st.integers(1, 3),
    free_yaw=st.just(False),
).flatmap(
    lambda l: st.just(l)
    if l.mode == "single"
    else st.builds(
        ParamLayout,
        mode=st.just(l.mode),
        param=st.just(l.param),
        k=st.just(l.k),
        n_images=st.just(l.n_images),
        free_yaw=st.booleans(),
    )
)


class TestLayout:
    @settings(max_examples=60, deadline=None)
    @given(layout=layouts, seed=st.integers(0, 2**31))
    def test_pack_unpack_round_trip(self, layout, seed):
        rng = np.random.default_rng(seed)
        theta = rng.normal(size=layout.size)
        np.testing.assert_array_equal(layout.pack(layout.unpack(theta)), theta)

    def test_sizes(self):
        assert ParamLayout("single", "eig", 2, 3).size == 3 * 2 * 12
        assert ParamLayout("canonical", "cholesky", 2, 3).size == 2 * 9 + 3 * 2 * 9
        assert ParamLayout("canonical", "eig", 1, 4, free_yaw=True).size == 12 + 4 * 9 + 4

    def test_single_mode_rejects_free_yaw(self):
        with pytest.raises(ValueError):
            ParamLayout("single", "eig", 1, 1, free_yaw=True)


class TestReparameterize:
    def test_zero_raws_give_identity_transforms(self):
        layout = ParamLayout("canonical", "eig", 2, 2, free_yaw=True)
        vals = reparameterize(np.zeros(layout.size), layout)
        np.testing.assert_array_equal(vals["means"], np.zeros((2, 3)))
        np.testing.assert_allclose(vals["s"], 1.0)
        np.testing.assert_array_equal(vals["t"], 0.0)
        np.testing.assert_array_equal(vals["theta"], 0.0)
        np.testing.assert_array_equal(vals["yaw"], 0.0)

    def test_saturation_limits(self):
        layout = ParamLayout("canonical", "eig", 1, 1)
        theta = np.full(layout.size, 40.0)
        vals = reparameterize(theta, layout)
        np.testing.assert_allclose(vals["means"], 1.0)
        np.testing.assert_allclose(vals["s"], 2.0)
        np.testing.assert_allclose(vals["t"], 0.3)
        np.testing.assert_allclose(vals["theta"], np.pi / 4)

    @settings(max_examples=40, deadline=None)
    @given(layout=layouts, seed=st.integers(0, 2**31))
    def test_values_always_inside_bounds(self, layout, seed):
        rng = np.random.default_rng(seed)
        vals = reparameterize(rng.normal(scale=3, size=layout.size), layout)
        assert np.all(np.abs(vals["means"]) <= 1.0)
        eigs = np.linalg.eigvalsh(vals["covs"])
        assert eigs.min() > 0
        if layout.param == "eig":
            assert eigs.min() >= 0.01 - 1e-12 and eigs.max() <= 0.51 + 1e-12
        if layout.mode == "canonical":
            assert vals["s"].min() >= 0.5 and vals["s"].max() <= 2.0
            assert np.abs(vals["t"]).max() <= 0.3
            assert np.abs(vals["theta"]).max() <= np.pi / 4


def test_build_cov_batch_shapes():
    rng = np.random.default_rng(0)
    for param, d in (("eig", 9), ("cholesky", 6), ("condcorr", 6)):
        raw = rng.normal(size=(4, 5, d))
        cov = build_cov_batch(raw, param)
        assert cov.shape == (4, 5, 3, 3)
        assert np.linalg.eigvalsh(cov).min() > 0
