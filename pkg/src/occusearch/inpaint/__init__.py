"""Mask-driven image restoration: diffusion fill and the partial-conv network."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import EmptyMaskError, InvalidParamsError, ShapeMismatchError
from ..image import ImageBuffer, MaskImage
from .diffusion import DIFFUSION_MAX_ITERS, DIFFUSION_TOL, diffusion_inpaint
from .pconv import (
    FeatureMap,
    PConvLayer,
    PConvModel,
    default_model,
    load_model,
    pconv_forward,
    pconv_inpaint,
    save_model,
)
from .training import TrainResult, train_toy

__all__ = [
    "InpaintRequest",
    "mask_coverage",
    "inpaint",
    "diffusion_inpaint",
    "pconv_inpaint",
    "pconv_forward",
    "FeatureMap",
    "PConvLayer",
    "PConvModel",
    "default_model",
    "save_model",
    "load_model",
    "TrainResult",
    "train_toy",
    "DIFFUSION_TOL",
    "DIFFUSION_MAX_ITERS",
]

ENGINES = ("diffusion", "pconv")


@dataclass(frozen=True)
class InpaintRequest:
    """A damaged image, its validity mask, and the engine to repair it with."""

    image: ImageBuffer
    mask: MaskImage
    engine: str = "diffusion"
    diffusion_tol: float = DIFFUSION_TOL
    diffusion_iters: int = DIFFUSION_MAX_ITERS

    def __post_init__(self) -> None:
        if (self.image.height, self.image.width) != (self.mask.height, self.mask.width):
            raise ShapeMismatchError(
                f"image is {self.image.width}x{self.image.height}, "
                f"mask is {self.mask.width}x{self.mask.height}"
            )
        if self.mask.valid_count == 0:
            raise EmptyMaskError("mask marks every pixel as a hole")
        if self.engine not in ENGINES:
            raise InvalidParamsError(f"unknown engine {self.engine!r}")
        if self.diffusion_tol <= 0 or self.diffusion_iters < 1:
            raise InvalidParamsError("diffusion_tol must be > 0 and diffusion_iters >= 1")


def mask_coverage(mask: MaskImage) -> float:
    """Fraction of pixels marked valid, in [0, 1]."""
    return mask.valid_count / (mask.height * mask.width)


def inpaint(req: InpaintRequest, model: PConvModel | None = None) -> ImageBuffer:
    """Dispatch to the requested engine; pconv builds a default model if none given."""
    if req.engine == "diffusion":
        return diffusion_inpaint(req)
    if model is None:
        model = default_model(channels=req.image.channels)
    return pconv_inpaint(req, model)
