"""Raster values, PNG codec, color conversion, and the rounding rule."""

from __future__ import annotations

import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from occusearch.errors import MalformedFileError, UnsupportedFormatError
from occusearch.image import (
    ImageBuffer,
    MaskImage,
    decode_image,
    decode_mask,
    encode_mask,
    encode_png,
    round_to_u8,
    rgb_to_ycbcr,
    to_grayscale,
    ycbcr_to_rgb,
)
from conftest import random_image
from oracles import u8


class TestRounding:
    @pytest.mark.parametrize(
        "value,expected",
        [(0.0, 0), (0.4, 0), (0.5, 1), (1.5, 2), (2.5, 3), (127.5, 128),
         (254.5, 255), (255.4, 255), (300.0, 255), (-0.4, 0), (-5.0, 0)],
    )
    def test_half_away_from_zero_and_clamp(self, value, expected):
        assert round_to_u8(np.array([value]))[0] == expected

    @given(st.floats(min_value=-50.0, max_value=310.0, allow_nan=False))
    @settings(max_examples=200, deadline=None)
    def test_matches_scalar_rule(self, v):
        assert int(round_to_u8(np.array([v]))[0]) == u8(v)


class TestImageBuffer:
    def test_from_flat_matches_spec_layout(self):
        img = ImageBuffer.from_flat(2, 2, 1, [0, 85, 170, 255])
        assert (img.width, img.height, img.channels) == (2, 2, 1)
        assert list(img.data) == [0, 85, 170, 255]
        assert img.pixels[1, 0, 0] == 170  # row-major: third sample is (row 1, col 0)

    def test_rejects_bad_channel_count(self):
        with pytest.raises(ValueError):
            ImageBuffer(np.zeros((4, 4, 2), dtype=np.uint8))

    def test_rejects_empty_dims(self):
        with pytest.raises(ValueError):
            ImageBuffer(np.zeros((0, 4, 1), dtype=np.uint8))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            ImageBuffer(np.full((2, 2, 1), 300, dtype=np.int32))

    def test_data_length_invariant(self, rng):
        img = random_image(rng, 5, 7, 3)
        assert img.data.shape[0] == img.width * img.height * img.channels


class TestPngCodec:
    def test_gray_2x2_decode(self):
        png = encode_png(ImageBuffer.from_flat(2, 2, 1, [0, 85, 170, 255]))
        img = decode_image(png)
        assert (img.width, img.height, img.channels) == (2, 2, 1)
        assert list(img.data) == [0, 85, 170, 255]

    def test_rgb_1x1_decode(self):
        png = encode_png(ImageBuffer.from_flat(1, 1, 3, [255, 0, 0]))
        img = decode_image(png)
        assert (img.width, img.height, img.channels) == (1, 1, 3)
        assert list(img.data) == [255, 0, 0]

    def test_single_pixel_roundtrip(self):
        img = ImageBuffer.from_flat(1, 1, 1, [0])
        assert decode_image(encode_png(img)) == img

    def test_2x1_rgb_roundtrip(self):
        img = ImageBuffer.from_flat(2, 1, 3, [1, 2, 3, 4, 5, 6])
        assert decode_image(encode_png(img)) == img

    def test_random_roundtrips_both_channel_counts(self, rng):
        for c in (1, 3):
            img = random_image(rng, 64, 64, c)
            assert decode_image(encode_png(img)) == img

    def test_reencode_is_stable(self, rng):
        img = random_image(rng, 16, 16, 3)
        once = decode_image(encode_png(img))
        twice = decode_image(encode_png(once))
        assert once == twice

    def test_rgba_alpha_dropped(self):
        pil = Image.new("RGBA", (2, 2), (10, 20, 30, 99))
        buf = io.BytesIO()
        pil.save(buf, format="PNG")
        img = decode_image(buf.getvalue())
        assert img.channels == 3
        assert list(img.pixels[0, 0]) == [10, 20, 30]

    def test_sixteen_bit_rejected(self):
        pil = Image.new("I;16", (2, 2))
        buf = io.BytesIO()
        pil.save(buf, format="PNG")
        with pytest.raises(UnsupportedFormatError):
            decode_image(buf.getvalue())

    def test_garbage_rejected(self):
        with pytest.raises(MalformedFileError):
            decode_image(b"definitely not an image")

    def test_truncated_png_rejected(self, rng):
        png = encode_png(random_image(rng, 32, 32, 3))
        with pytest.raises(MalformedFileError):
            decode_image(png[: len(png) // 2])


class TestGrayscale:
    @pytest.mark.parametrize(
        "rgb,expected", [((255, 255, 255), 255), ((0, 0, 0), 0), ((255, 0, 0), 76)]
    )
    def test_known_values(self, rgb, expected):
        img = ImageBuffer.from_flat(1, 1, 3, list(rgb))
        assert to_grayscale(img).pixels[0, 0, 0] == expected

    def test_idempotent(self, rng):
        img = random_image(rng, 9, 9, 3)
        once = to_grayscale(img)
        assert to_grayscale(once) == once

    def test_matches_scalar_formula(self, rng):
        img = random_image(rng, 8, 8, 3)
        gray = to_grayscale(img)
        for y in range(8):
            for x in range(8):
                r, g, b = (int(v) for v in img.pixels[y, x])
                assert gray.pixels[y, x, 0] == u8(0.299 * r + 0.587 * g + 0.114 * b)


class TestYCbCr:
    def test_white_and_black_are_achromatic(self):
        for v, y in ((255, 255), (0, 0)):
            buf = rgb_to_ycbcr(ImageBuffer.from_flat(1, 1, 3, [v, v, v]))
            assert (buf.y[0, 0], buf.cb[0, 0], buf.cr[0, 0]) == (y, 128, 128)

    def test_gray_pixels_stay_neutral(self):
        vals = np.arange(256, dtype=np.uint8).reshape(16, 16)
        img = ImageBuffer(np.stack([vals, vals, vals], axis=2))
        buf = rgb_to_ycbcr(img)
        assert np.array_equal(buf.y, vals)
        assert (buf.cb == 128).all() and (buf.cr == 128).all()

    def test_roundtrip_error_at_most_one(self, rng):
        samples = rng.integers(0, 256, size=(100, 100, 3)).astype(np.uint8)
        img = ImageBuffer(samples)
        back = ycbcr_to_rgb(rgb_to_ycbcr(img))
        err = np.abs(back.pixels.astype(int) - samples.astype(int))
        assert err.max() <= 1

    def test_forward_requires_three_channels(self, rng):
        from occusearch.errors import ShapeMismatchError

        with pytest.raises(ShapeMismatchError):
            rgb_to_ycbcr(random_image(rng, 4, 4, 1))


class TestMaskCodec:
    def test_threshold_at_128(self):
        plane = np.array([[0, 127], [128, 255]], dtype=np.uint8)
        png = encode_png(ImageBuffer(plane[:, :, np.newaxis]))
        mask = decode_mask(png)
        assert mask.valid.tolist() == [[False, False], [True, True]]

    def test_roundtrip(self, rng):
        mask = MaskImage(rng.random((13, 9)) < 0.5)
        assert decode_mask(encode_mask(mask)) == mask

    def test_all_valid_constructor(self):
        m = MaskImage.all_valid(5, 3)
        assert (m.width, m.height, m.valid_count) == (5, 3, 15)

    def test_color_mask_collapsed(self):
        img = ImageBuffer.from_flat(1, 2, 3, [255, 255, 255, 0, 0, 0])
        mask = decode_mask(encode_png(img))
        assert mask.valid.tolist() == [[True], [False]]
