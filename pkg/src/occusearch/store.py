"""Durable product catalog on plain files.

Layout under the store root:

    categories.json     {"version": 1, "categories": [{"id", "name", "centroid"}]}
    products.jsonl      one product record per line, append-only
    potentials.jsonl    one stored query record per line, append-only
    images/<id>.png     original product images, bit-exact
    .lock               advisory single-owner lock

Appends are flushed and fsynced before the call returns, so a crash can lose
at most the line being written; a truncated final line is detected and ignored
on open. Anything malformed before the final line means real corruption and
refuses to open. One process owns a store at a time via flock on .lock;
within the owning process a single mutex serializes writers while readers get
snapshot copies.
"""

from __future__ import annotations

import fcntl
import json
import os
import secrets
import threading
import time
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from .errors import (
    DuplicateIdError,
    NotFoundError,
    StoreCorruptError,
    StoreLockedError,
    UnknownCategoryError,
)
from .features import Metadata, metadata_from_dict, metadata_to_dict
from .image import ImageBuffer, decode_image, encode_png

__all__ = [
    "ProductRecord",
    "CategoryRecord",
    "PotentialRecord",
    "CatalogStore",
    "open_store",
    "STORE_VERSION",
]

STORE_VERSION = 1


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass(frozen=True)
class ProductRecord:
    id: str
    name: str
    category: str
    metadata: Metadata
    image_path: str
    registered_at: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "category": self.category,
            "metadata": metadata_to_dict(self.metadata),
            "imagePath": self.image_path,
            "registeredAt": self.registered_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProductRecord":
        return cls(
            id=d["id"],
            name=d["name"],
            category=d["category"],
            metadata=metadata_from_dict(d["metadata"]),
            image_path=d["imagePath"],
            registered_at=d["registeredAt"],
        )


@dataclass(frozen=True)
class CategoryRecord:
    id: str
    name: str
    centroid: dict | None = None  # optional {"colorHist": [...], "edgeHist": [...]}

    def to_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "centroid": self.centroid}

    @classmethod
    def from_dict(cls, d: dict) -> "CategoryRecord":
        return cls(id=d["id"], name=d["name"], centroid=d.get("centroid"))


@dataclass(frozen=True)
class PotentialRecord:
    id: str
    metadata: Metadata
    matched_product: str | None
    stored_at: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "metadata": metadata_to_dict(self.metadata),
            "matchedProduct": self.matched_product,
            "storedAt": self.stored_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PotentialRecord":
        return cls(
            id=d["id"],
            metadata=metadata_from_dict(d["metadata"]),
            matched_product=d.get("matchedProduct"),
            stored_at=d["storedAt"],
        )


def _read_jsonl(path: Path) -> list[dict]:
    """Parse a JSONL file, ignoring a truncated final line only."""
    if not path.exists():
        return []
    raw = path.read_text(encoding="utf-8")
    lines = raw.split("\n")
    records: list[dict] = []
    for i, line in enumerate(lines):
        if line.strip() == "":
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError:
            rest = "\n".join(lines[i + 1 :])
            if rest.strip() == "":
                break  # partial final write, tolerated
            raise StoreCorruptError(f"{path.name}: malformed record at line {i + 1}")
    return records


class CatalogStore:
    """Single-owner catalog; use open_store() or CatalogStore.open()."""

    def __init__(self) -> None:
        raise TypeError("use CatalogStore.open(root)")

    @classmethod
    def open(cls, root, create: bool = True) -> "CatalogStore":
        self = object.__new__(cls)
        self._root = Path(root)
        self._mutex = threading.Lock()
        self._last_ns = 0
        if not self._root.exists():
            if not create:
                raise NotFoundError(f"store root {self._root} does not exist")
            self._root.mkdir(parents=True)
        (self._root / "images").mkdir(exist_ok=True)

        self._lock_fh = open(self._root / ".lock", "w")
        try:
            fcntl.flock(self._lock_fh, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError:
            self._lock_fh.close()
            raise StoreLockedError(f"store {self._root} is owned by another process")

        cat_path = self._root / "categories.json"
        if cat_path.exists():
            try:
                doc = json.loads(cat_path.read_text(encoding="utf-8"))
            except json.JSONDecodeError:
                raise StoreCorruptError("categories.json is not valid JSON")
            if doc.get("version") != STORE_VERSION:
                raise StoreCorruptError(f"unsupported store version {doc.get('version')}")
            self._categories = {
                c["id"]: CategoryRecord.from_dict(c) for c in doc.get("categories", [])
            }
        else:
            self._categories = {}
            self._write_categories()

        self._products: dict[str, ProductRecord] = {}
        for d in _read_jsonl(self._root / "products.jsonl"):
            rec = ProductRecord.from_dict(d)
            if rec.id in self._products:
                raise StoreCorruptError(f"duplicate product id {rec.id}")
            self._products[rec.id] = rec
        self._potentials: list[PotentialRecord] = [
            PotentialRecord.from_dict(d) for d in _read_jsonl(self._root / "potentials.jsonl")
        ]

        self._products_fh = open(self._root / "products.jsonl", "a", encoding="utf-8")
        self._potentials_fh = open(self._root / "potentials.jsonl", "a", encoding="utf-8")
        self._closed = False
        return self

    # -- lifecycle ---------------------------------------------------------

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        self._products_fh.close()
        self._potentials_fh.close()
        fcntl.flock(self._lock_fh, fcntl.LOCK_UN)
        self._lock_fh.close()

    def __enter__(self) -> "CatalogStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    @property
    def root(self) -> Path:
        return self._root

    # -- internals ---------------------------------------------------------

    def _check_open(self) -> None:
        if self._closed:
            raise StoreCorruptError("store is closed")

    def _make_id(self) -> str:
        # nanosecond prefix keeps ids lexically sortable; the counter guard
        # makes them strictly increasing even within one tick
        ns = time.time_ns()
        if ns <= self._last_ns:
            ns = self._last_ns + 1
        self._last_ns = ns
        return f"{ns:020d}-{secrets.token_hex(4)}"

    def _append(self, fh, obj: dict) -> None:
        fh.write(json.dumps(obj, separators=(",", ":")) + "\n")
        fh.flush()
        os.fsync(fh.fileno())

    def _write_categories(self) -> None:
        doc = {
            "version": STORE_VERSION,
            "categories": [self._categories[k].to_dict() for k in sorted(self._categories)],
        }
        tmp = self._root / "categories.json.tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self._root / "categories.json")

    # -- categories --------------------------------------------------------

    def list_categories(self) -> list[CategoryRecord]:
        self._check_open()
        with self._mutex:
            return [self._categories[k] for k in sorted(self._categories)]

    def category_exists(self, category_id: str) -> bool:
        self._check_open()
        with self._mutex:
            return category_id in self._categories

    def ensure_category(self, category_id: str, name: str | None = None) -> CategoryRecord:
        """Create the category if missing; an existing one is returned unchanged."""
        if not category_id:
            raise UnknownCategoryError("category id must be non-empty")
        self._check_open()
        with self._mutex:
            if category_id not in self._categories:
                self._categories[category_id] = CategoryRecord(category_id, name or category_id)
                self._write_categories()
            return self._categories[category_id]

    # -- products ----------------------------------------------------------

    def new_product(self, name: str, category: str, metadata: Metadata) -> ProductRecord:
        """Assemble a record with a fresh id; nothing is stored yet."""
        pid = self._make_id()
        return ProductRecord(
            id=pid,
            name=name,
            category=category,
            metadata=metadata.with_category(category),
            image_path=f"images/{pid}.png",
            registered_at=_now_iso(),
        )

    def put_product(self, rec: ProductRecord, image: ImageBuffer) -> str:
        self._check_open()
        rel = Path(rec.image_path)
        if rel.is_absolute() or ".." in rel.parts:
            raise ValueError(f"image_path must stay inside the store: {rec.image_path}")
        if rec.metadata.category != rec.category:
            rec = replace(rec, metadata=rec.metadata.with_category(rec.category))
        with self._mutex:
            if rec.category not in self._categories:
                raise UnknownCategoryError(f"category {rec.category!r} does not exist")
            if rec.id in self._products:
                raise DuplicateIdError(f"product id {rec.id} already stored")
            img_file = self._root / rel
            img_file.parent.mkdir(parents=True, exist_ok=True)
            with open(img_file, "wb") as fh:
                fh.write(encode_png(image))
                fh.flush()
                os.fsync(fh.fileno())
            self._append(self._products_fh, rec.to_dict())
            self._products[rec.id] = rec
        return rec.id

    def get_product(self, product_id: str) -> ProductRecord:
        self._check_open()
        with self._mutex:
            rec = self._products.get(product_id)
        if rec is None:
            raise NotFoundError(f"no product with id {product_id}")
        return rec

    def list_products(self) -> list[ProductRecord]:
        self._check_open()
        with self._mutex:
            return [self._products[k] for k in sorted(self._products)]

    def list_by_category(self, category_id: str) -> list[ProductRecord]:
        self._check_open()
        with self._mutex:
            return [self._products[k] for k in sorted(self._products)
                    if self._products[k].category == category_id]

    @property
    def product_count(self) -> int:
        with self._mutex:
            return len(self._products)

    def image_bytes(self, product_id: str) -> bytes:
        rec = self.get_product(product_id)
        path = self._root / rec.image_path
        if not path.exists():
            raise StoreCorruptError(f"image file missing for product {product_id}")
        return path.read_bytes()

    def get_image(self, product_id: str) -> ImageBuffer:
        return decode_image(self.image_bytes(product_id))

    # -- potentials --------------------------------------------------------

    def put_potential(self, metadata: Metadata, matched_product: str | None = None) -> str:
        self._check_open()
        with self._mutex:
            rec = PotentialRecord(
                id=self._make_id(),
                metadata=metadata,
                matched_product=matched_product,
                stored_at=_now_iso(),
            )
            self._append(self._potentials_fh, rec.to_dict())
            self._potentials.append(rec)
        return rec.id

    def list_potentials(self) -> list[PotentialRecord]:
        self._check_open()
        with self._mutex:
            return list(self._potentials)


def open_store(root, create: bool = True) -> CatalogStore:
    return CatalogStore.open(root, create=create)
