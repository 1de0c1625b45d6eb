"""Neighbour-averaging fill: exactness on flats, ramps, and the maximum principle."""

from __future__ import annotations

import numpy as np
import pytest

from occusearch.errors import EmptyMaskError, InvalidParamsError, ShapeMismatchError
from occusearch.image import ImageBuffer, MaskImage
from occusearch.inpaint import InpaintRequest, inpaint, mask_coverage
from occusearch.inpaint.diffusion import diffusion_inpaint, diffusion_solve
from conftest import random_image


def _center_hole(h: int, w: int) -> MaskImage:
    valid = np.ones((h, w), dtype=bool)
    valid[h // 4 : 3 * h // 4, w // 4 : 3 * w // 4] = False
    return MaskImage(valid)


class TestRequestValidation:
    def test_dims_must_match(self, rng):
        with pytest.raises(ShapeMismatchError):
            InpaintRequest(random_image(rng, 8, 8, 3), MaskImage.all_valid(9, 8))

    def test_rejects_fully_invalid_mask(self, rng):
        with pytest.raises(EmptyMaskError):
            InpaintRequest(random_image(rng, 8, 8, 3), MaskImage(np.zeros((8, 8), dtype=bool)))

    def test_rejects_unknown_engine(self, rng):
        with pytest.raises(InvalidParamsError):
            InpaintRequest(random_image(rng, 8, 8, 3), MaskImage.all_valid(8, 8), engine="magic")

    @pytest.mark.parametrize("kwargs", [{"diffusion_tol": 0.0}, {"diffusion_iters": 0}])
    def test_rejects_bad_solver_settings(self, rng, kwargs):
        with pytest.raises(InvalidParamsError):
            InpaintRequest(random_image(rng, 8, 8, 3), MaskImage.all_valid(8, 8), **kwargs)

    def test_mask_coverage(self):
        valid = np.zeros((4, 4), dtype=bool)
        valid[:2] = True
        assert mask_coverage(MaskImage(valid)) == pytest.approx(0.5)


class TestDiffusionFill:
    def test_constant_region_fills_exactly(self):
        img = ImageBuffer.full(16, 16, 3, 93)
        out = diffusion_inpaint(InpaintRequest(img, _center_hole(16, 16)))
        assert out == img

    def test_linear_ramp_recovered_within_one_level(self):
        ramp = np.tile(np.arange(16, dtype=np.uint8) * 16, (16, 1))
        img = ImageBuffer(ramp[:, :, np.newaxis])
        mask = _center_hole(16, 16)
        out = diffusion_inpaint(InpaintRequest(img, mask, diffusion_tol=1e-9, diffusion_iters=50000))
        diff = np.abs(out.pixels.astype(int) - img.pixels.astype(int))
        assert diff.max() <= 1

    def test_maximum_principle(self, rng):
        for _ in range(20):
            img = random_image(rng, 12, 12, 3)
            mask = _center_hole(12, 12)
            out = diffusion_inpaint(InpaintRequest(img, mask))
            holes = ~mask.valid
            for c in range(3):
                chan = img.pixels[:, :, c]
                lo, hi = int(chan[mask.valid].min()), int(chan[mask.valid].max())
                filled = out.pixels[:, :, c][holes]
                assert filled.min() >= lo and filled.max() <= hi

    def test_valid_pixels_bit_exact(self, rng):
        img = random_image(rng, 16, 16, 3)
        mask = _center_hole(16, 16)
        out = diffusion_inpaint(InpaintRequest(img, mask))
        assert np.array_equal(out.pixels[mask.valid], img.pixels[mask.valid])

    def test_all_valid_mask_is_identity(self, rng):
        img = random_image(rng, 8, 8, 3)
        out = diffusion_inpaint(InpaintRequest(img, MaskImage.all_valid(8, 8)))
        assert out == img

    def test_solver_reports_shrinking_updates(self, rng):
        img = random_image(rng, 16, 16, 1)
        mask = _center_hole(16, 16)
        work, changes = diffusion_solve(
            img.pixels.astype(np.float64), mask.valid, tol=1e-6, max_iters=500
        )
        assert len(changes) >= 2
        assert changes[-1] <= changes[0]
        # once near the fixed point, updates must have dropped below tolerance
        assert changes[-1] <= 1e-6

    def test_grayscale_images_supported(self, rng):
        img = random_image(rng, 10, 10, 1)
        out = diffusion_inpaint(InpaintRequest(img, _center_hole(10, 10)))
        assert out.same_dims(img) and out.channels == 1


class TestDispatcher:
    def test_routes_by_engine(self, rng):
        img = random_image(rng, 12, 12, 3)
        mask = _center_hole(12, 12)
        diffused = inpaint(InpaintRequest(img, mask, engine="diffusion"))
        assert diffused == diffusion_inpaint(InpaintRequest(img, mask))
        networked = inpaint(InpaintRequest(img, mask, engine="pconv"))
        assert networked.same_dims(img)
        assert np.array_equal(networked.pixels[mask.valid], img.pixels[mask.valid])
