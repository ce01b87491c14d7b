import numpy as np
import pytest

from gmq.errors import InvariantViolation, ParseError, UnsupportedFormat
from gmq.datagen import (
    builtin_scene,
    load_manifest,
    load_mask,
    load_model,
    make_dataset,
    model_from_dict,
    model_to_dict,
    render_gt_mask,
    save_mask,
    save_model,
)
from gmq.datagen.scenes import SceneSpec
from gmq.gauss import Camera, Gaussian3, PoseTransform, counter_rotated
from gmq.model import CanonicalGaussian, ImagePose, Model
from gmq.raster import MaskImage


class TestRenderGtMask:
    def test_sphere_disk_radius(self):
        mask = render_gt_mask(builtin_scene("sphere"), 0.0, Camera())
        r = 128.0 * 0.5 / np.sqrt(4.0 - 0.25)
        area = mask.data.sum()
        assert area == pytest.approx(np.pi * r * r, rel=0.02)
        # centered disk: symmetric under both flips
        np.testing.assert_array_equal(mask.data, mask.data[::-1])
        np.testing.assert_array_equal(mask.data, mask.data[:, ::-1])

    def test_empty_scene(self):
        empty = SceneSpec("empty", ())
        mask = render_gt_mask(empty, 0.3, Camera())
        assert mask.data.sum() == 0.0

    def test_yaw_equals_counter_rotated_camera(self):
        scene = builtin_scene("tripod")
        cam = Camera()
        for phi in (0.4, -1.3, 2.9):
            a = render_gt_mask(scene, phi, cam)
            b = render_gt_mask(scene, 0.0, counter_rotated(cam, phi))
            np.testing.assert_array_equal(a.data, b.data)

    def test_masks_are_binary(self):
        mask = render_gt_mask(builtin_scene("quad"), 1.0, Camera())
        assert set(np.unique(mask.data)) <= {0.0, 1.0}


class TestMaskIo:
    def test_round_trip_binary(self, tmp_path):
        rng = np.random.default_rng(0)
        m = MaskImage(data=(rng.uniform(size=(32, 32)) > 0.5).astype(float))
        p = tmp_path / "m.png"
        save_mask(m, p)
        np.testing.assert_array_equal(load_mask(p).data, m.data)

    def test_gray_levels_scale(self, tmp_path):
        m = MaskImage(data=np.full((4, 4), 128 / 255.0))
        p = tmp_path / "g.png"
        save_mask(m, p)
        loaded = load_mask(p)
        assert loaded.data[0, 0] == pytest.approx(128 / 255.0)
        assert loaded.data[0, 0] >= 0.5  # binarizes to foreground

    def test_unsupported_format(self, tmp_path):
        p = tmp_path / "bad.png"
        p.write_bytes(b"this is not an image")
        with pytest.raises(UnsupportedFormat):
            load_mask(p)


class TestMakeDataset:
    def test_single_view(self, tmp_path):
        man = make_dataset("sphere", 1, seed=1, out_dir=tmp_path / "d")
        assert len(man.entries) == 1
        assert (tmp_path / "d" / man.entries[0].mask).exists()

    def test_deterministic_bytes(self, tmp_path):
        make_dataset("tripod", 6, seed=9, out_dir=tmp_path / "a")
        make_dataset("tripod", 6, seed=9, out_dir=tmp_path / "b")
        ma = (tmp_path / "a" / "manifest.json").read_bytes()
        mb = (tmp_path / "b" / "manifest.json").read_bytes()
        assert ma == mb
        for e in load_manifest(tmp_path / "a").entries:
            assert (tmp_path / "a" / e.mask).read_bytes() == (tmp_path / "b" / e.mask).read_bytes()

    def test_views_distinct_and_split_sizes(self, tmp_path):
        man = make_dataset("tripod", 24, seed=3, out_dir=tmp_path / "d")
        datas = [load_mask(tmp_path / "d" / e.mask).data for e in man.entries]
        for i in range(len(datas)):
            for j in range(i + 1, len(datas)):
                if np.array_equal(datas[i], datas[j]):
                    pytest.fail(f"views {i} and {j} identical")
        splits = [e.split for e in man.entries]
        assert splits.count("train") == 22 and splits.count("test") == 2

    def test_manifest_round_trip(self, tmp_path):
        man = make_dataset("quad", 4, seed=5, out_dir=tmp_path / "d")
        loaded = load_manifest(tmp_path / "d")
        assert loaded.scene == "quad"
        assert [e.mask for e in loaded.entries] == [e.mask for e in man.entries]
        assert [e.yaw for e in loaded.entries] == pytest.approx([e.yaw for e in man.entries])
        np.testing.assert_allclose(loaded.camera.pos, man.camera.pos)


def tiny_model():
    cam = Camera()
    g1 = Gaussian3(mu=np.array([0.1, -0.2, 0.05]), cov=np.diag([0.05, 0.1, 0.2]))
    g2 = Gaussian3(mu=np.array([-0.3, 0.0, 0.2]),
                   cov=np.array([[0.1, 0.02, 0.0], [0.02, 0.08, 0.01], [0.0, 0.01, 0.12]]))
    images = (
        ImagePose(id="mask_0000.png", yaw=0.7, transforms=(
            PoseTransform(s=np.array([1.2, 0.8, 1.0]), t=np.array([0.1, 0.0, -0.2]),
                          theta=np.array([0.3, -0.1, 0.0])),
            PoseTransform.identity(),
        )),
    )
    return Model(parameterization="eig", camera=cam,
                 canonical=(CanonicalGaussian(gaussian=g1, raw={"eig_raw": [0.0, 0.0, 0.0]}),
                            CanonicalGaussian(gaussian=g2)),
                 images=images)


class TestModelIo:
    def test_round_trip_exact(self, tmp_path):
        m = tiny_model()
        p = tmp_path / "model.json"
        save_model(m, p)
        loaded = load_model(p)
        assert loaded.parameterization == m.parameterization
        for a, b in zip(loaded.canonical, m.canonical):
            np.testing.assert_array_equal(a.gaussian.mu, b.gaussian.mu)
            np.testing.assert_array_equal(a.gaussian.cov, b.gaussian.cov)
        assert loaded.canonical[0].raw == m.canonical[0].raw
        la, ma_ = loaded.images[0], m.images[0]
        assert la.id == ma_.id and la.yaw == ma_.yaw
        for ta, tb in zip(la.transforms, ma_.transforms):
            np.testing.assert_array_equal(ta.s, tb.s)
            np.testing.assert_array_equal(ta.t, tb.t)
            np.testing.assert_array_equal(ta.theta, tb.theta)

    def test_non_symmetric_cov_rejected(self):
        doc = model_to_dict(tiny_model())
        doc["canonical"][0]["cov"][0][1] = 0.9
        with pytest.raises(InvariantViolation) as err:
            model_from_dict(doc)
        assert err.value.field == "canonical[0].cov"

    def test_out_of_bound_translation_rejected(self):
        doc = model_to_dict(tiny_model())
        doc["images"][0]["transforms"][0]["t"] = [0.5, 0.0, 0.0]
        with pytest.raises(InvariantViolation) as err:
            model_from_dict(doc)
        assert "images[0].transforms[0].t" == err.value.field

    def test_missing_field(self):
        doc = model_to_dict(tiny_model())
        del doc["canonical"][1]["mu"]
        with pytest.raises(ParseError) as err:
            model_from_dict(doc)
        assert "canonical[1].mu" in str(err.value)

    def test_bad_version(self):
        doc = model_to_dict(tiny_model())
        doc["version"] = 99
        with pytest.raises(ParseError):
            model_from_dict(doc)

    def test_non_pd_cov_rejected(self):
        doc = model_to_dict(tiny_model())
        doc["canonical"][0]["cov"] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]]
        with pytest.raises(InvariantViolation):
            model_from_dict(doc)
