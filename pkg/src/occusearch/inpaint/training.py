"""Toy training loop for the restoration network.

Each step hides a random rectangle of a corpus image, runs the network on the
damaged input, and takes an SGD step on the L1 error over the hidden pixels.
This is a smoke-scale trainer meant to drive the loss down on small corpora,
not a production schedule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from ..errors import EmptyCorpusError, InvalidParamsError, ShapeMismatchError
from ..image import ImageBuffer, MaskImage
from .pconv import FeatureMap, PConvLayer, PConvModel, model_forward_t

__all__ = ["TrainResult", "train_toy", "random_rect_mask", "hole_l1_loss", "hole_l1_grads"]


@dataclass
class TrainResult:
    model: PConvModel
    epoch_losses: list[float]


def random_rect_mask(
    rng: np.random.Generator,
    width: int,
    height: int,
    min_frac: float = 0.1,
    max_frac: float = 0.3,
) -> MaskImage:
    """One axis-aligned rectangular hole covering roughly the given area share."""
    frac = rng.uniform(min_frac, max_frac)
    aspect = rng.uniform(0.5, 2.0)
    rw = int(np.clip(round((frac * width * height * aspect) ** 0.5), 1, width))
    rh = int(np.clip(round((frac * width * height / aspect) ** 0.5), 1, height))
    # keep at least one valid pixel when the rectangle would swallow the image
    if rw >= width and rh >= height:
        rw = width - 1 if width > 1 else 1
        rh = height - 1 if rw == width else rh
    x0 = int(rng.integers(0, width - rw + 1))
    y0 = int(rng.integers(0, height - rh + 1))
    valid = np.ones((height, width), dtype=bool)
    valid[y0 : y0 + rh, x0 : x0 + rw] = False
    if not valid.any():
        valid[0, 0] = True
    return MaskImage(valid)


def _hole_loss_t(
    params: list[tuple[torch.Tensor, torch.Tensor]],
    model: PConvModel,
    x: torch.Tensor,
    target: torch.Tensor,
    m: torch.Tensor,
) -> torch.Tensor:
    out, _ = model_forward_t(params, model, x, m)
    holes = m < 0.5
    return (out - target).abs()[:, holes].mean()


def _image_tensors(image: ImageBuffer, mask: MaskImage) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    target = torch.from_numpy(FeatureMap.from_image(image).values)
    m = torch.from_numpy(mask.valid.astype(np.float64))
    damaged = target * m  # hide the hole content from the network input
    return damaged, target, m


def hole_l1_loss(model: PConvModel, image: ImageBuffer, mask: MaskImage) -> float:
    """Mean absolute error over hole pixels for one damaged sample."""
    from .pconv import all_params

    if not (~mask.valid).any():
        raise InvalidParamsError("loss needs at least one hole pixel")
    damaged, target, m = _image_tensors(image, mask)
    with torch.no_grad():
        return float(_hole_loss_t(all_params(model), model, damaged, target, m))


def hole_l1_grads(
    model: PConvModel, image: ImageBuffer, mask: MaskImage
) -> tuple[float, list[tuple[np.ndarray, np.ndarray]]]:
    """Loss plus analytic (weight, bias) gradients per layer, encoder first."""
    if not (~mask.valid).any():
        raise InvalidParamsError("loss needs at least one hole pixel")
    params = [
        (torch.from_numpy(l.weight).requires_grad_(True), torch.from_numpy(l.bias).requires_grad_(True))
        for l in (*model.encoder_layers, *model.decoder_layers)
    ]
    damaged, target, m = _image_tensors(image, mask)
    loss = _hole_loss_t(params, model, damaged, target, m)
    loss.backward()
    grads = [(w.grad.numpy().copy(), b.grad.numpy().copy()) for w, b in params]
    return float(loss.detach()), grads


def _rebuild(model: PConvModel, params: list[tuple[torch.Tensor, torch.Tensor]]) -> PConvModel:
    n_enc = len(model.encoder_layers)

    def layers(src: list[PConvLayer], offset: int) -> list[PConvLayer]:
        return [
            PConvLayer(
                params[offset + i][0].detach().numpy().copy(),
                params[offset + i][1].detach().numpy().copy(),
                l.stride,
            )
            for i, l in enumerate(src)
        ]

    return PConvModel(
        layers(model.encoder_layers, 0),
        list(model.encoder_activations),
        layers(model.decoder_layers, n_enc),
        list(model.decoder_activations),
    )


def train_toy(
    model: PConvModel,
    corpus: list[ImageBuffer],
    epochs: int,
    lr: float = 0.05,
    seed: int = 0,
    hole_frac: tuple[float, float] = (0.1, 0.3),
) -> TrainResult:
    """SGD on random-rectangle holes; returns a new model and per-epoch mean loss."""
    if not corpus:
        raise EmptyCorpusError("training corpus is empty")
    if epochs < 0 or lr <= 0:
        raise InvalidParamsError("epochs must be >= 0 and lr > 0")
    first = corpus[0]
    for img in corpus:
        if img.channels != model.input_channels:
            raise ShapeMismatchError(
                f"corpus image has {img.channels} channels, model expects {model.input_channels}"
            )
        if (img.height, img.width) != (first.height, first.width):
            raise ShapeMismatchError("corpus images must share one fixed size")
    params = [
        (torch.from_numpy(l.weight.copy()).requires_grad_(True),
         torch.from_numpy(l.bias.copy()).requires_grad_(True))
        for l in (*model.encoder_layers, *model.decoder_layers)
    ]
    rng = np.random.default_rng(seed)
    epoch_losses: list[float] = []
    for _ in range(epochs):
        losses = []
        for img in corpus:
            mask = random_rect_mask(rng, img.width, img.height, *hole_frac)
            damaged, target, m = _image_tensors(img, mask)
            loss = _hole_loss_t(params, model, damaged, target, m)
            loss.backward()
            with torch.no_grad():
                for w, b in params:
                    w -= lr * w.grad
                    b -= lr * b.grad
                    w.grad.zero_()
                    b.grad.zero_()
            losses.append(float(loss.detach()))
        epoch_losses.append(float(np.mean(losses)))
    return TrainResult(_rebuild(model, params), epoch_losses)
