"""Category assignment and ranked product search.

Categories are represented by centroids: the arithmetic mean of member
products' histograms. A query is classified to its nearest centroid by the
weighted histogram similarity, then ranked against that category's products
first, spilling over to the rest of the catalog when the category is smaller
than k. Every search appends the query's metadata to the store as a potential
record; nothing else is mutated.

Both registration and search push images through the same preprocessing (and
optional restoration) before metadata extraction, so an exact duplicate of a
stored product scores 1.0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyStoreError, InvalidParamsError
from .features import Metadata, generate_metadata, similarity
from .image import ImageBuffer, MaskImage
from .inpaint import InpaintRequest, PConvModel, inpaint
from .preprocess import preprocess_auto
from .store import CatalogStore, ProductRecord

__all__ = [
    "Centroid",
    "CentroidSet",
    "ProductMatch",
    "SearchResult",
    "build_centroids",
    "classify_category",
    "register_product",
    "search",
]

AUTO_CATEGORY = "auto"


@dataclass(frozen=True)
class Centroid:
    """Mean histogram vectors of a category's members (duck-types as Metadata
    for similarity scoring)."""

    color_hist: np.ndarray
    edge_hist: np.ndarray
    members: int

    def __post_init__(self) -> None:
        if self.members < 1:
            raise ValueError("centroid needs at least one member")
        if (self.color_hist < 0).any() or (self.edge_hist < 0).any():
            raise ValueError("centroid components must be non-negative")


@dataclass(frozen=True)
class CentroidSet:
    by_category: dict[str, Centroid] = field(default_factory=dict)

    @property
    def categories(self) -> list[str]:
        return sorted(self.by_category)


def build_centroids(store: CatalogStore) -> CentroidSet:
    """Per-category mean of member metadata histograms."""
    products = store.list_products()
    if not products:
        raise EmptyStoreError("store has no products to build centroids from")
    sums: dict[str, tuple[np.ndarray, np.ndarray, int]] = {}
    for p in products:
        color, edge, n = sums.get(
            p.category,
            (np.zeros_like(p.metadata.color_hist), np.zeros_like(p.metadata.edge_hist), 0),
        )
        sums[p.category] = (color + p.metadata.color_hist, edge + p.metadata.edge_hist, n + 1)
    return CentroidSet(
        {cat: Centroid(color / n, edge / n, n) for cat, (color, edge, n) in sums.items()}
    )


def classify_category(m: Metadata, centroids: CentroidSet) -> str:
    """Nearest-centroid category; ties go to the lexically smallest id."""
    if not centroids.by_category:
        raise EmptyStoreError("no centroids to classify against")
    best_cat, best_score = None, -1.0
    for cat in centroids.categories:
        score = similarity(m, centroids.by_category[cat])
        if score > best_score:
            best_cat, best_score = cat, score
    return best_cat


def register_product(
    store: CatalogStore,
    image: ImageBuffer,
    name: str,
    category: str = AUTO_CATEGORY,
) -> ProductRecord:
    """Preprocess, extract metadata, resolve the category, and store the product.

    The original image bytes are stored; metadata comes from the preprocessed
    image so queries and catalog entries live in the same feature space.
    Category "auto" classifies against existing centroids (store must be
    non-empty for that).
    """
    report = preprocess_auto(image)
    metadata = generate_metadata(report.output)
    if category == AUTO_CATEGORY:
        category = classify_category(metadata, build_centroids(store))
    rec = store.new_product(name, category, metadata)
    store.put_product(rec, image)
    return rec


@dataclass(frozen=True)
class ProductMatch:
    product: ProductRecord
    score: float  # similarity of query metadata to this product
    category_score: float  # similarity of query metadata to the product's category centroid

    def __post_init__(self) -> None:
        for s in (self.score, self.category_score):
            if not (0.0 <= s <= 1.0):
                raise ValueError(f"score {s} outside [0, 1]")


@dataclass(frozen=True)
class SearchResult:
    matches: list[ProductMatch]
    restored: ImageBuffer  # preprocessed (and inpainted, when a mask was given) query
    category: str  # category the query was classified into
    mode: str  # preprocessing route taken: "color" or "grayscale"
    metadata: Metadata  # the query metadata that was stored as a potential


def search(
    store: CatalogStore,
    image: ImageBuffer,
    mask: MaskImage | None = None,
    k: int = 5,
    engine: str = "diffusion",
    model: PConvModel | None = None,
) -> SearchResult:
    """Full query pipeline: preprocess, restore holes, classify, rank, log.

    Ranking is the classified category's products by similarity (descending,
    ties by ascending id), then the remaining catalog by global similarity.
    """
    if k < 1:
        raise InvalidParamsError(f"k must be >= 1, got {k}")
    products = store.list_products()
    if not products:
        raise EmptyStoreError("cannot search an empty store")

    report = preprocess_auto(image)
    restored = report.output
    if mask is not None:
        restored = inpaint(InpaintRequest(restored, mask, engine=engine), model)
    metadata = generate_metadata(restored)

    centroids = build_centroids(store)
    category = classify_category(metadata, centroids)
    cat_scores = {
        cat: similarity(metadata, centroid) for cat, centroid in centroids.by_category.items()
    }
    scores = {p.id: similarity(metadata, p.metadata) for p in products}

    def ranked(pool: list[ProductRecord]) -> list[ProductRecord]:
        return sorted(pool, key=lambda p: (-scores[p.id], p.id))

    in_cat = ranked([p for p in products if p.category == category])
    rest = ranked([p for p in products if p.category != category])
    chosen = (in_cat + rest)[:k]

    matches = [ProductMatch(p, scores[p.id], cat_scores[p.category]) for p in chosen]
    store.put_potential(metadata, matched_product=matches[0].product.id)
    return SearchResult(matches, restored, category, report.mode, metadata)
