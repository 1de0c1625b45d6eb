"""Occlusion-tolerant product image search.

Pipeline: case-based preprocessing (color equalization or grayscale
sharpen+stretch, plus edge detection), mask-driven hole restoration
(diffusion or a partial-convolution network), histogram metadata extraction,
and nearest-centroid retrieval over a file-backed catalog. A REST service and
a CLI sit on top.
"""

from .errors import OccuSearchError
from .features import Metadata, generate_metadata, similarity
from .image import ImageBuffer, MaskImage, decode_image, decode_mask, encode_png
from .inpaint import InpaintRequest
from .preprocess import CannyParams, canny, preprocess_auto
from .retrieval import register_product, search
from .store import CatalogStore, open_store

__version__ = "0.1.0"

__all__ = [
    "OccuSearchError",
    "ImageBuffer",
    "MaskImage",
    "decode_image",
    "decode_mask",
    "encode_png",
    "CannyParams",
    "canny",
    "preprocess_auto",
    "InpaintRequest",
    "Metadata",
    "generate_metadata",
    "similarity",
    "CatalogStore",
    "open_store",
    "register_product",
    "search",
    "__version__",
]
