import colorsys

import numpy as np
import pytest

from estool.color import (
    ImageFormatError,
    decode_ppm,
    read_ppm,
    read_pgm,
    resize_nearest,
    rgb_to_gray,
    rgb_to_hsv,
    value_map,
    write_pgm,
    write_ppm,
    zero_pad,
)


class TestResizeNearest:
    def test_identity_at_same_dims(self):
        img = np.arange(4 * 4 * 3, dtype=np.uint8).reshape(4, 4, 3)
        assert np.array_equal(resize_nearest(img, 4, 4), img)

    def test_upscale_replicates_blocks(self):
        img = np.array([[[10, 0, 0], [20, 0, 0]],
                        [[30, 0, 0], [40, 0, 0]]], dtype=np.uint8)
        out = resize_nearest(img, 4, 4)
        # floor(x * 2 / 4) maps output columns (0,1,2,3) -> source (0,0,1,1)
        expected = np.repeat(np.repeat(img, 2, axis=0), 2, axis=1)
        assert np.array_equal(out, expected)

    def test_floor_mapping_oracle(self):
        rng = np.random.default_rng(3)
        img = rng.integers(0, 256, size=(5, 7, 3), dtype=np.uint8)
        out = resize_nearest(img, 11, 4)
        for y in range(4):
            for x in range(11):
                assert np.array_equal(out[y, x], img[(y * 5) // 4, (x * 7) // 11])

    def test_canonical_pipeline_dims(self):
        img = np.zeros((100, 133, 3), dtype=np.uint8)
        resized = resize_nearest(img, 254, 254)
        assert resized.shape == (254, 254, 3)
        canvas = zero_pad(value_map(resized), 2)
        assert canvas.shape == (258, 258)

    def test_rejects_empty_source_and_bad_targets(self):
        with pytest.raises(ValueError):
            resize_nearest(np.empty((0, 0, 3), dtype=np.uint8), 4, 4)
        img = np.zeros((2, 2, 3), dtype=np.uint8)
        with pytest.raises(ValueError):
            resize_nearest(img, 0, 4)

    def test_idempotent_at_fixed_dims(self):
        rng = np.random.default_rng(4)
        img = rng.integers(0, 256, size=(9, 6, 3), dtype=np.uint8)
        once = resize_nearest(img, 13, 17)
        assert np.array_equal(resize_nearest(once, 13, 17), once)


class TestRgbToHsv:
    def test_gray_pixel(self):
        h, s, v = rgb_to_hsv(100, 100, 100)
        assert h == 0.0
        assert s == 0.0
        assert v == 100 / 255

    def test_pure_red_hue_canonicalized(self):
        h, s, v = rgb_to_hsv(255, 0, 0)
        assert h == 0.0
        assert s == 1.0
        assert v == 1.0

    def test_half_green(self):
        h, s, v = rgb_to_hsv(0, 128, 0)
        assert h == 120.0
        assert s == 1.0
        assert v == 128 / 255

    def test_matches_stdlib_hexcone(self):
        rng = np.random.default_rng(5)
        for r, g, b in rng.integers(0, 256, size=(300, 3)).tolist():
            h, s, v = rgb_to_hsv(r, g, b)
            hh, ss, vv = colorsys.rgb_to_hsv(r / 255, g / 255, b / 255)
            assert h == pytest.approx((hh * 360) % 360, abs=1e-9)
            assert s == pytest.approx(ss, abs=1e-12)
            assert v == pytest.approx(vv, abs=1e-12)
            assert 0.0 <= h < 360.0

    def test_value_channel_agrees_with_value_map(self):
        rng = np.random.default_rng(6)
        img = rng.integers(0, 256, size=(4, 5, 3), dtype=np.uint8)
        vm = value_map(img)
        for y in range(4):
            for x in range(5):
                _, _, v = rgb_to_hsv(*img[y, x].tolist())
                assert v == vm[y, x]


class TestValueMap:
    def test_black_is_zero(self):
        assert value_map(np.zeros((3, 3, 3), dtype=np.uint8)).max() == 0.0

    def test_saturated_channel_is_one(self):
        img = np.zeros((1, 1, 3), dtype=np.uint8)
        img[0, 0] = (255, 0, 0)
        assert value_map(img)[0, 0] == 1.0

    def test_max_channel_wins(self):
        img = np.array([[[10, 200, 30]]], dtype=np.uint8)
        assert value_map(img)[0, 0] == 200 / 255

    def test_invariant_under_non_max_permutation(self):
        a = np.array([[[10, 200, 30]]], dtype=np.uint8)
        b = np.array([[[30, 200, 10]]], dtype=np.uint8)
        assert value_map(a)[0, 0] == value_map(b)[0, 0]


class TestRgbToGray:
    def test_white_full_range(self):
        img = np.full((1, 1, 3), 255, dtype=np.uint8)
        assert rgb_to_gray(img, 256)[0, 0] == 255

    def test_black_any_levels(self):
        img = np.zeros((1, 1, 3), dtype=np.uint8)
        assert rgb_to_gray(img, 17)[0, 0] == 0

    def test_red_weight(self):
        img = np.array([[[255, 0, 0]]], dtype=np.uint8)
        assert rgb_to_gray(img, 256)[0, 0] == round(0.299 * 255)

    def test_levels_bound(self):
        rng = np.random.default_rng(7)
        img = rng.integers(0, 256, size=(8, 8, 3), dtype=np.uint8)
        for levels in (2, 5, 17, 256):
            g = rgb_to_gray(img, levels)
            assert g.min() >= 0
            assert g.max() <= levels - 1

    def test_rejects_single_level(self):
        with pytest.raises(ValueError):
            rgb_to_gray(np.zeros((1, 1, 3), dtype=np.uint8), 1)


class TestZeroPad:
    def test_zero_margin_is_identity(self):
        v = np.ones((3, 3))
        assert zero_pad(v, 0) is v

    def test_single_pixel(self):
        out = zero_pad(np.array([[0.5]]), 1)
        expected = np.zeros((3, 3))
        expected[1, 1] = 0.5
        assert np.array_equal(out, expected)

    def test_pad_then_crop_is_identity(self):
        rng = np.random.default_rng(8)
        v = rng.random((6, 9))
        padded = zero_pad(v, 3)
        assert padded.shape == (12, 15)
        assert np.array_equal(padded[3:-3, 3:-3], v)
        assert padded[:3].sum() == 0


class TestPpmCodec:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(9)
        img = rng.integers(0, 256, size=(7, 5, 3), dtype=np.uint8)
        path = tmp_path / "img.ppm"
        write_ppm(path, img)
        assert np.array_equal(read_ppm(path), img)

    def test_header_comments(self):
        img = decode_ppm(b"P6\n# a comment\n2 1\n# more\n255\n" + bytes(6))
        assert img.shape == (1, 2, 3)

    def test_bad_magic(self):
        with pytest.raises(ImageFormatError):
            decode_ppm(b"P5\n1 1\n255\n\x00\x00\x00")

    def test_bad_maxval(self):
        with pytest.raises(ImageFormatError):
            decode_ppm(b"P6\n1 1\n65535\n" + bytes(6))

    def test_truncated_raster(self):
        with pytest.raises(ImageFormatError):
            decode_ppm(b"P6\n2 2\n255\n\x00\x00\x00")

    def test_pgm_round_trip(self, tmp_path):
        rng = np.random.default_rng(10)
        img = rng.integers(0, 256, size=(4, 6), dtype=np.uint8)
        path = tmp_path / "img.pgm"
        write_pgm(path, img)
        assert np.array_equal(read_pgm(path), img)
