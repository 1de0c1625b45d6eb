"""Degradation benchmark: does the preprocess+restore pipeline classify
damaged queries better than feeding them in raw?

Each stored product's image gets one seeded rectangular occlusion. The raw
route extracts metadata straight from the damaged image; the pipeline route
preprocesses, fills the hole, and then extracts metadata. Both classify
against centroids built from the store. Read-only: no potentials are written.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyStoreError
from .features import generate_metadata
from .image import ImageBuffer
from .inpaint import InpaintRequest, PConvModel, inpaint
from .inpaint.training import random_rect_mask
from .preprocess import preprocess_auto
from .retrieval import build_centroids, classify_category
from .store import CatalogStore
from .synth import damage_image

__all__ = ["BenchRow", "BenchReport", "run_bench"]


@dataclass(frozen=True)
class BenchRow:
    product_id: str
    name: str
    category: str
    raw_prediction: str
    pipeline_prediction: str

    def to_dict(self) -> dict:
        return {
            "productId": self.product_id,
            "name": self.name,
            "category": self.category,
            "rawPrediction": self.raw_prediction,
            "pipelinePrediction": self.pipeline_prediction,
        }


@dataclass(frozen=True)
class BenchReport:
    corpus_size: int
    hole_frac: float
    seed: int
    engine: str
    raw_accuracy: float
    pipeline_accuracy: float
    rows: list[BenchRow]

    def to_dict(self) -> dict:
        return {
            "corpusSize": self.corpus_size,
            "holeFrac": self.hole_frac,
            "seed": self.seed,
            "engine": self.engine,
            "rawAccuracy": self.raw_accuracy,
            "pipelineAccuracy": self.pipeline_accuracy,
            "rows": [r.to_dict() for r in self.rows],
        }

    def render_table(self) -> str:
        header = f"{'name':<20} {'truth':<10} {'raw':<12} {'pipeline':<12}"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            raw = r.raw_prediction + (" " if r.raw_prediction == r.category else "*")
            pipe = r.pipeline_prediction + (" " if r.pipeline_prediction == r.category else "*")
            lines.append(f"{r.name:<20} {r.category:<10} {raw:<12} {pipe:<12}")
        lines.append("-" * len(header))
        lines.append(
            f"top-1 category accuracy: raw {self.raw_accuracy:.3f}, "
            f"pipeline {self.pipeline_accuracy:.3f} "
            f"(n={self.corpus_size}, hole={self.hole_frac:.2f}, seed={self.seed})"
        )
        return "\n".join(lines)


def run_bench(
    store: CatalogStore,
    hole_frac: float = 0.2,
    seed: int = 7,
    engine: str = "diffusion",
    model: PConvModel | None = None,
) -> BenchReport:
    products = store.list_products()
    if not products:
        raise EmptyStoreError("benchmark needs a populated store")
    centroids = build_centroids(store)
    rng = np.random.default_rng(seed)

    rows = []
    for p in products:
        img = store.get_image(p.id)
        mask = random_rect_mask(rng, img.width, img.height, hole_frac, hole_frac)
        damaged = damage_image(img, mask)

        raw_pred = classify_category(generate_metadata(damaged), centroids)

        report = preprocess_auto(damaged)
        restored = inpaint(InpaintRequest(report.output, mask, engine=engine), model)
        pipe_pred = classify_category(generate_metadata(restored), centroids)

        rows.append(BenchRow(p.id, p.name, p.category, raw_pred, pipe_pred))

    n = len(rows)
    raw_acc = sum(r.raw_prediction == r.category for r in rows) / n
    pipe_acc = sum(r.pipeline_prediction == r.category for r in rows) / n
    return BenchReport(n, hole_frac, seed, engine, raw_acc, pipe_acc, rows)
