from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from occusearch.image import ImageBuffer


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def random_image(rng: np.random.Generator, h: int, w: int, c: int) -> ImageBuffer:
    return ImageBuffer(rng.integers(0, 256, size=(h, w, c)).astype(np.uint8))


def gray_plane(img: ImageBuffer) -> np.ndarray:
    assert img.channels == 1
    return img.pixels[:, :, 0]
