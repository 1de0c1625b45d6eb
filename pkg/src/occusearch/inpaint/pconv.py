"""Partial-convolution layers and the encoder/decoder restoration network.

A partial convolution computes each output only over the valid pixels in its
window, rescales by window-size/valid-count, and marks the output valid when
the window saw at least one valid pixel. Windows are clipped to the image, so
with an all-valid mask every layer reduces exactly to a plain zero-padding
convolution plus bias.

Weights live in numpy float64 arrays on the model; torch (CPU) provides the
convolution and autodiff substrate at inference and training time. Layout of
feature maps is planar: ``values[channel, row, column]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import torch
import torch.nn.functional as F

from ..errors import ShapeMismatchError
from ..image import ImageBuffer, MaskImage, round_to_u8

__all__ = [
    "FeatureMap",
    "PConvLayer",
    "PConvModel",
    "pconv_forward",
    "pconv_inpaint",
    "default_model",
    "save_model",
    "load_model",
    "MODEL_FORMAT_VERSION",
]

MODEL_FORMAT_VERSION = 1
ACTIVATIONS = ("relu", "leaky_relu", "none")
LEAKY_SLOPE = 0.2


@dataclass(frozen=True)
class FeatureMap:
    """Real-valued activation carrier, planar (channels, height, width)."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 3:
            raise ValueError(f"feature map must be (c, h, w), got shape {v.shape}")
        if not np.isfinite(v).all():
            raise ValueError("feature map values must be finite")
        object.__setattr__(self, "values", np.ascontiguousarray(v))

    @property
    def channels(self) -> int:
        return self.values.shape[0]

    @property
    def height(self) -> int:
        return self.values.shape[1]

    @property
    def width(self) -> int:
        return self.values.shape[2]

    @classmethod
    def from_image(cls, img: ImageBuffer) -> "FeatureMap":
        return cls(np.moveaxis(img.pixels.astype(np.float64), 2, 0) / 255.0)


@dataclass
class PConvLayer:
    """Weights of one partial-convolution layer."""

    weight: np.ndarray  # (out_channels, in_channels, k, k)
    bias: np.ndarray  # (out_channels,)
    stride: int = 1

    def __post_init__(self) -> None:
        self.weight = np.asarray(self.weight, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weight.ndim != 4 or self.weight.shape[2] != self.weight.shape[3]:
            raise ValueError(f"weight must be (out, in, k, k), got {self.weight.shape}")
        if self.weight.shape[2] % 2 != 1:
            raise ValueError("kernel size must be odd")
        if self.bias.shape != (self.weight.shape[0],):
            raise ValueError("bias must have one entry per output channel")
        if not (np.isfinite(self.weight).all() and np.isfinite(self.bias).all()):
            raise ValueError("weights must be finite")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")

    @property
    def out_channels(self) -> int:
        return self.weight.shape[0]

    @property
    def in_channels(self) -> int:
        return self.weight.shape[1]

    @property
    def kernel_size(self) -> int:
        return self.weight.shape[2]


@dataclass
class PConvModel:
    """Encoder/decoder topology with per-layer activation tags.

    Decoder layers run in order: nearest-neighbor upsample to the mirror
    encoder stage's size, concatenation with that stage's features (the raw
    input for the last decoder layer), then a stride-1 partial convolution.
    """

    encoder_layers: list[PConvLayer] = field(default_factory=list)
    encoder_activations: list[str] = field(default_factory=list)
    decoder_layers: list[PConvLayer] = field(default_factory=list)
    decoder_activations: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(self.encoder_layers) != len(self.encoder_activations):
            raise ValueError("one activation tag per encoder layer")
        if len(self.decoder_layers) != len(self.decoder_activations):
            raise ValueError("one activation tag per decoder layer")
        for tag in (*self.encoder_activations, *self.decoder_activations):
            if tag not in ACTIVATIONS:
                raise ValueError(f"unknown activation {tag!r}")

    @property
    def input_channels(self) -> int:
        return self.encoder_layers[0].in_channels

    @property
    def output_channels(self) -> int:
        if self.decoder_layers:
            return self.decoder_layers[-1].out_channels
        return self.encoder_layers[-1].out_channels


def _activate(x: torch.Tensor, tag: str) -> torch.Tensor:
    if tag == "relu":
        return torch.relu(x)
    if tag == "leaky_relu":
        return F.leaky_relu(x, LEAKY_SLOPE)
    return x


def pconv2d(
    x: torch.Tensor,
    mask: torch.Tensor,
    weight: torch.Tensor,
    bias: torch.Tensor,
    stride: int,
) -> tuple[torch.Tensor, torch.Tensor]:
    """One masked, renormalized convolution step on (C, H, W) tensors.

    The hole pixels are zeroed before convolving; each output is rescaled by
    in-image-window-size / valid-count and marked valid when the window held
    at least one valid pixel, else forced to exactly zero (no bias).
    """
    k = weight.shape[2]
    pad = k // 2
    raw = F.conv2d((x * mask).unsqueeze(0), weight, bias=None, stride=stride, padding=pad)[0]
    with torch.no_grad():
        ones = torch.ones(1, 1, k, k, dtype=x.dtype)
        valid = F.conv2d(mask[None, None], ones, stride=stride, padding=pad)[0, 0]
        window = F.conv2d(torch.ones_like(mask)[None, None], ones, stride=stride, padding=pad)[0, 0]
        new_mask = (valid > 0).to(x.dtype)
        factor = (window / valid.clamp(min=1.0)) * new_mask
    return raw * factor + bias.view(-1, 1, 1) * new_mask, new_mask


def _layer_tensors(layer: PConvLayer) -> tuple[torch.Tensor, torch.Tensor]:
    return torch.from_numpy(layer.weight), torch.from_numpy(layer.bias)


def model_forward_t(
    params: list[tuple[torch.Tensor, torch.Tensor]],
    model: PConvModel,
    x: torch.Tensor,
    mask: torch.Tensor,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Run the network on tensors; params are (weight, bias) pairs, encoder first."""
    n_enc = len(model.encoder_layers)
    skips: list[tuple[torch.Tensor, torch.Tensor]] = [(x, mask)]
    f, m = x, mask
    for i, layer in enumerate(model.encoder_layers):
        w, b = params[i]
        f, m = pconv2d(f, m, w, b, layer.stride)
        f = _activate(f, model.encoder_activations[i])
        skips.append((f, m))
    skips.pop()  # the deepest stage is the running value, not a skip
    for i, layer in enumerate(model.decoder_layers):
        skip_f, skip_m = skips.pop()
        size = skip_f.shape[-2:]
        f = F.interpolate(f.unsqueeze(0), size=size, mode="nearest")[0]
        m = F.interpolate(m[None, None], size=size, mode="nearest")[0, 0]
        # zero skip features where their own mask is invalid: the merged mask
        # below may be valid there, and the raw-input skip still carries hole
        # bytes that must not reach the convolution
        f = torch.cat([f, skip_f * skip_m], dim=0)
        m = torch.maximum(m, skip_m)
        w, b = params[n_enc + i]
        f, m = pconv2d(f, m, w, b, layer.stride)
        f = _activate(f, model.decoder_activations[i])
    return f, m


def all_params(model: PConvModel) -> list[tuple[torch.Tensor, torch.Tensor]]:
    return [_layer_tensors(l) for l in (*model.encoder_layers, *model.decoder_layers)]


def pconv_forward(
    layer: PConvLayer, x: FeatureMap, m: MaskImage
) -> tuple[FeatureMap, MaskImage]:
    """Apply one partial-convolution layer to a feature map and its mask."""
    if (x.height, x.width) != (m.height, m.width):
        raise ShapeMismatchError(
            f"feature map {x.height}x{x.width} vs mask {m.height}x{m.width}"
        )
    if x.channels != layer.in_channels:
        raise ShapeMismatchError(
            f"feature map has {x.channels} channels, layer expects {layer.in_channels}"
        )
    w, b = _layer_tensors(layer)
    with torch.no_grad():
        out, new_mask = pconv2d(
            torch.from_numpy(x.values), torch.from_numpy(m.valid.astype(np.float64)), w, b, layer.stride
        )
    return FeatureMap(out.numpy()), MaskImage(new_mask.numpy() > 0.5)


def pconv_inpaint(req, model: PConvModel) -> ImageBuffer:
    """Restore the request's image with the network, compositing valid pixels.

    Valid pixels are copied verbatim from the input; only hole pixels come
    from the network output, so an untrained model still returns a lawful
    image.
    """
    img = req.image
    if model.input_channels != img.channels or model.output_channels != img.channels:
        raise ShapeMismatchError(
            f"model is {model.input_channels}->{model.output_channels} channels, "
            f"image has {img.channels}"
        )
    x = torch.from_numpy(FeatureMap.from_image(img).values)
    m = torch.from_numpy(req.mask.valid.astype(np.float64))
    with torch.no_grad():
        out, _ = model_forward_t(all_params(model), model, x, m)
    restored = round_to_u8(np.moveaxis(out.numpy(), 0, 2) * 255.0)
    valid3 = req.mask.valid[:, :, np.newaxis]
    return ImageBuffer(np.where(valid3, img.pixels, restored))


def default_model(channels: int = 3, seed: int = 0) -> PConvModel:
    """Desk-scale topology: 3 stride-2 encoder stages (16/32/64) + mirror decoder.

    Weights are uniform in [-sqrt(1/fan_in), +sqrt(1/fan_in)] from a seeded
    generator, so builds are deterministic.
    """
    rng = np.random.default_rng(seed)

    def make(in_c: int, out_c: int, stride: int) -> PConvLayer:
        fan_in = in_c * 9
        bound = (1.0 / fan_in) ** 0.5
        weight = rng.uniform(-bound, bound, size=(out_c, in_c, 3, 3))
        bias = rng.uniform(-bound, bound, size=(out_c,))
        return PConvLayer(weight, bias, stride)

    widths = [16, 32, 64]
    encoder = [
        make(channels, widths[0], 2),
        make(widths[0], widths[1], 2),
        make(widths[1], widths[2], 2),
    ]
    decoder = [
        make(widths[2] + widths[1], widths[1], 1),
        make(widths[1] + widths[0], widths[0], 1),
        make(widths[0] + channels, channels, 1),
    ]
    return PConvModel(
        encoder_layers=encoder,
        encoder_activations=["relu", "relu", "relu"],
        decoder_layers=decoder,
        decoder_activations=["leaky_relu", "leaky_relu", "none"],
    )


def save_model(model: PConvModel, path) -> None:
    """Persist topology + weights to a single .npz container (bit-exact)."""
    meta = {
        "format_version": MODEL_FORMAT_VERSION,
        "encoder": [
            {"stride": l.stride, "activation": a}
            for l, a in zip(model.encoder_layers, model.encoder_activations)
        ],
        "decoder": [
            {"stride": l.stride, "activation": a}
            for l, a in zip(model.decoder_layers, model.decoder_activations)
        ],
    }
    arrays: dict[str, np.ndarray] = {"meta": np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8)}
    for prefix, layers in (("enc", model.encoder_layers), ("dec", model.decoder_layers)):
        for i, layer in enumerate(layers):
            arrays[f"{prefix}{i}_weight"] = layer.weight
            arrays[f"{prefix}{i}_bias"] = layer.bias
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_model(path) -> PConvModel:
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta"]).decode())
        if meta.get("format_version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {meta.get('format_version')}")

        def read(prefix: str, specs: list[dict]) -> tuple[list[PConvLayer], list[str]]:
            layers, acts = [], []
            for i, spec in enumerate(specs):
                layers.append(
                    PConvLayer(
                        data[f"{prefix}{i}_weight"], data[f"{prefix}{i}_bias"], spec["stride"]
                    )
                )
                acts.append(spec["activation"])
            return layers, acts

        enc, enc_a = read("enc", meta["encoder"])
        dec, dec_a = read("dec", meta["decoder"])
    return PConvModel(enc, enc_a, dec, dec_a)
