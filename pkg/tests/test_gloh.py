import numpy as np
import pytest

from glohage import gloh
from glohage.errors import (
    ImageTooSmallError,
    NegativeEntryError,
    PatchOutOfBoundsError,
)
from glohage.gloh import GlohParams

DEFAULTS = GlohParams()


def rand_image(shape, seed=0):
    return np.random.default_rng(seed).integers(0, 256, size=shape).astype(np.uint8)


class TestGradients:
    def test_constant_image_zero_magnitude(self):
        mag, _ = gloh.compute_gradients(np.full((12, 12), 77, dtype=np.uint8))
        assert np.all(mag == 0)

    def test_horizontal_ramp(self):
        img = np.tile(np.arange(20, dtype=np.uint8), (15, 1))
        mag, ori = gloh.compute_gradients(img)
        assert np.allclose(mag[1:-1, 1:-1], 1.0)
        assert np.allclose(ori[1:-1, 1:-1], 0.0)

    def test_rotated_image_shifts_orientation(self):
        # rotating pixels clockwise in array terms turns gradients by +pi/2
        img = rand_image((12, 12), seed=5)
        rot = np.rot90(img, -1)
        m0, o0 = gloh.compute_gradients(img)
        m1, o1 = gloh.compute_gradients(rot)
        h, w = img.shape
        for r in range(1, h - 1):
            for c in range(1, w - 1):
                i, j = c, h - 1 - r
                if 1 <= i < rot.shape[0] - 1 and 1 <= j < rot.shape[1] - 1:
                    assert m1[i, j] == pytest.approx(m0[r, c], abs=1e-12)
                    if m0[r, c] > 0:
                        shift = (o1[i, j] - o0[r, c]) % (2 * np.pi)
                        assert shift == pytest.approx(np.pi / 2, abs=1e-9)


class TestPatchGrid:
    def test_default_face_grid(self):
        origins = gloh.patch_grid(68, 62, DEFAULTS)
        assert len(origins) == 360
        assert origins[0] == (0, 0)
        assert origins[-1] == (57, 51)

    def test_single_patch(self):
        assert gloh.patch_grid(10, 10, DEFAULTS) == [(0, 0)]

    def test_too_small(self):
        with pytest.raises(ImageTooSmallError):
            gloh.patch_grid(9, 62, DEFAULTS)


class TestPatchDescriptor:
    def test_zero_field(self):
        mag = np.zeros((10, 10))
        ori = np.zeros((10, 10))
        d = gloh.patch_descriptor(mag, ori, (0, 0), DEFAULTS)
        assert d.shape == (136,)
        assert np.all(d == 0)

    def test_single_center_pixel(self):
        mag = np.zeros((10, 10))
        ori = np.zeros((10, 10))
        mag[4, 4] = 1.0  # within the central disc of the (4.5, 4.5) center
        ori[4, 4] = 0.1
        d = gloh.patch_descriptor(mag, ori, (0, 0), DEFAULTS)
        assert d[0] == pytest.approx(1.0)
        assert np.count_nonzero(d) == 1

    def test_orientation_rotation_permutes_bins(self):
        rng = np.random.default_rng(3)
        mag = rng.uniform(0, 1, (10, 10))
        ori = rng.uniform(0, 2 * np.pi, (10, 10))
        step = 2 * np.pi / DEFAULTS.n_orient
        # snap orientations to bin centers so the cyclic shift is exact
        ori = (np.floor(ori / step) + 0.5) * step
        d0 = gloh.patch_descriptor(mag, ori, (0, 0), DEFAULTS)
        d1 = gloh.patch_descriptor(mag, (ori + step) % (2 * np.pi), (0, 0), DEFAULTS)
        rolled = d0.reshape(17, 8)
        rolled = np.roll(rolled, 1, axis=1).ravel()
        assert np.allclose(d1, rolled, atol=1e-12)

    def test_out_of_bounds(self):
        mag = np.zeros((12, 12))
        with pytest.raises(PatchOutOfBoundsError):
            gloh.patch_descriptor(mag, mag, (5, 0), DEFAULTS)


class TestNormalize:
    def test_plain_l2(self):
        v = np.zeros(136)
        v[0], v[1] = 3.0, 4.0
        out = gloh.normalize_descriptor(v, None)
        assert out[0] == pytest.approx(0.6)
        assert out[1] == pytest.approx(0.8)

    def test_zero_vector_passthrough(self):
        v = np.zeros(10)
        assert np.all(gloh.normalize_descriptor(v, 0.2) == 0)

    def test_single_support_fixed_point(self):
        v = np.zeros(136)
        v[0] = 1.0
        out = gloh.normalize_descriptor(v, 0.2)
        assert out[0] == pytest.approx(1.0)
        assert np.all(out[1:] == 0)

    def test_negative_entry_rejected(self):
        with pytest.raises(NegativeEntryError):
            gloh.normalize_descriptor(np.array([1.0, -0.5]), 0.2)


class TestExtract:
    def test_face_dimensions(self):
        v = gloh.extract_gloh(rand_image((68, 62)), DEFAULTS)
        assert v.shape == (48960,)

    def test_single_patch_dimension(self):
        v = gloh.extract_gloh(rand_image((10, 10)), DEFAULTS)
        assert v.shape == (136,)

    def test_constant_image_all_zero(self):
        v = gloh.extract_gloh(np.full((68, 62), 9, dtype=np.uint8), DEFAULTS)
        assert np.all(v == 0)

    def test_matches_per_patch_reference(self):
        img = rand_image((31, 25), seed=2)
        mag, ori = gloh.compute_gradients(img)
        ref = np.concatenate(
            [
                gloh.patch_descriptor(mag, ori, o, DEFAULTS)
                for o in gloh.patch_grid(*img.shape, DEFAULTS)
            ]
        )
        assert np.allclose(gloh.extract_gloh(img, DEFAULTS), ref, atol=1e-12)

    def test_block_norms_zero_or_one(self):
        v = gloh.extract_gloh(rand_image((68, 62), seed=4), DEFAULTS)
        norms = np.linalg.norm(v.reshape(-1, 136), axis=1)
        assert np.all((np.abs(norms - 1) < 1e-9) | (norms == 0))

    def test_intensity_shift_invariance(self):
        img = rand_image((30, 28), seed=6) // 2  # headroom for the shift
        v0 = gloh.extract_gloh(img, DEFAULTS)
        v1 = gloh.extract_gloh(img + 40, DEFAULTS)
        assert np.array_equal(v0, v1)

    def test_intensity_scale_invariance(self):
        img = rand_image((30, 28), seed=7) // 4
        v0 = gloh.extract_gloh(img.astype(np.float64), DEFAULTS)
        v1 = gloh.extract_gloh(img.astype(np.float64) * 3.0, DEFAULTS)
        assert np.allclose(v0, v1, atol=1e-6)

    def test_locality(self):
        img = rand_image((30, 28), seed=8)
        v0 = gloh.extract_gloh(img, DEFAULTS)
        r, c = 15, 13
        img2 = img.copy()
        img2[r, c] = (int(img[r, c]) + 128) % 256
        v1 = gloh.extract_gloh(img2, DEFAULTS)
        changed = np.flatnonzero(
            np.any((v0 != v1).reshape(-1, 136), axis=1)
        )
        origins = gloh.patch_grid(*img.shape, DEFAULTS)
        p = DEFAULTS.patch_size
        for b in changed:
            orow, ocol = origins[b]
            # the edited pixel or one of its gradient neighbors is inside
            assert orow - 1 <= r <= orow + p and ocol - 1 <= c <= ocol + p

    def test_length_invariant_random_shapes(self):
        rng = np.random.default_rng(9)
        for _ in range(5):
            h = int(rng.integers(10, 40))
            w = int(rng.integers(10, 40))
            v = gloh.extract_gloh(rand_image((h, w), seed=int(rng.integers(1e6))))
            expected = len(gloh.patch_grid(h, w, DEFAULTS)) * 136
            assert v.shape == (expected,)


def test_params_validation():
    with pytest.raises(ValueError):
        GlohParams(radii=(3.0, 2.0, 5.0))
    with pytest.raises(ValueError):
        GlohParams(radii=(2.0, 3.0, 9.0))
    with pytest.raises(ValueError):
        GlohParams(clip_threshold=0.0)
    assert GlohParams(clip_threshold=None).per_patch_dim == 136
