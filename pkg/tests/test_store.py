"""Catalog persistence: append-only records, crash tolerance, and locking."""

from __future__ import annotations

import numpy as np
import pytest

from occusearch.errors import (
    DuplicateIdError,
    NotFoundError,
    StoreCorruptError,
    StoreLockedError,
    UnknownCategoryError,
)
from occusearch.features import generate_metadata
from occusearch.store import CatalogStore, open_store
from conftest import random_image


@pytest.fixture
def store(tmp_path):
    with open_store(tmp_path / "catalog") as s:
        yield s


def _add(store: CatalogStore, rng, name: str, category: str = "widgets"):
    store.ensure_category(category)
    img = random_image(rng, 12, 12, 3)
    meta = generate_metadata(img).with_category(category)
    rec = store.new_product(name, category, meta)
    store.put_product(rec, img)
    return rec, img


class TestBasicRoundTrip:
    def test_product_round_trip(self, store, rng):
        rec, img = _add(store, rng, "alpha")
        got = store.get_product(rec.id)
        assert got.name == "alpha"
        assert got.category == "widgets"
        assert got.id == rec.id
        assert np.allclose(got.metadata.color_hist, rec.metadata.color_hist)
        assert store.get_image(rec.id) == img

    def test_image_bytes_match_file_on_disk(self, store, rng):
        rec, _ = _add(store, rng, "alpha")
        on_disk = (store.root / rec.image_path).read_bytes()
        assert store.image_bytes(rec.id) == on_disk

    def test_ids_are_unique_and_sortable_by_time(self, store, rng):
        recs = [_add(store, rng, f"p{i}")[0] for i in range(10)]
        ids = [r.id for r in recs]
        assert len(set(ids)) == 10
        assert ids == sorted(ids)  # creation order is reflected in the ids

    def test_missing_product_raises(self, store):
        with pytest.raises(NotFoundError):
            store.get_product("nope")
        with pytest.raises(NotFoundError):
            store.image_bytes("nope")

    def test_duplicate_id_rejected(self, store, rng):
        rec, img = _add(store, rng, "alpha")
        with pytest.raises(DuplicateIdError):
            store.put_product(rec, img)

    def test_unknown_category_rejected(self, store, rng):
        img = random_image(rng, 8, 8, 3)
        meta = generate_metadata(img)
        rec = store.new_product("ghost", "no-such-category", meta)
        with pytest.raises(UnknownCategoryError):
            store.put_product(rec, img)

    def test_category_listing(self, store, rng):
        _add(store, rng, "a", "widgets")
        _add(store, rng, "b", "gadgets")
        assert sorted(c.id for c in store.list_categories()) == ["gadgets", "widgets"]


class TestListing:
    def test_list_by_category_partitions_catalog(self, store, rng):
        for i in range(4):
            _add(store, rng, f"w{i}", "widgets")
        for i in range(3):
            _add(store, rng, f"g{i}", "gadgets")
        widgets = store.list_by_category("widgets")
        gadgets = store.list_by_category("gadgets")
        assert len(widgets) == 4 and len(gadgets) == 3
        all_ids = {p.id for p in store.list_products()}
        assert {p.id for p in widgets} | {p.id for p in gadgets} == all_ids
        assert not ({p.id for p in widgets} & {p.id for p in gadgets})

    def test_listings_sorted_by_id(self, store, rng):
        for i in range(5):
            _add(store, rng, f"p{i}")
        ids = [p.id for p in store.list_products()]
        assert ids == sorted(ids)

    def test_product_count(self, store, rng):
        assert store.product_count == 0
        _add(store, rng, "one")
        _add(store, rng, "two")
        assert store.product_count == 2


class TestReopen:
    def test_reopen_sees_same_catalog(self, tmp_path, rng):
        root = tmp_path / "catalog"
        with open_store(root) as store:
            recs = [_add(store, rng, f"p{i}")[0] for i in range(5)]
            pid = store.put_potential(recs[0].metadata, matched_product=recs[0].id)
        with open_store(root, create=False) as store:
            assert store.product_count == 5
            for rec in recs:
                got = store.get_product(rec.id)
                assert (got.name, got.category) == (rec.name, rec.category)
            pots = store.list_potentials()
            assert [p.id for p in pots] == [pid]
            assert pots[0].matched_product == recs[0].id

    def test_truncated_final_line_tolerated(self, tmp_path, rng):
        root = tmp_path / "catalog"
        with open_store(root) as store:
            _add(store, rng, "kept")
            _add(store, rng, "casualty")
        products = root / "products.jsonl"
        raw = products.read_bytes()
        products.write_bytes(raw[: len(raw) - 7])  # cut mid-record, no newline
        with open_store(root, create=False) as store:
            assert store.product_count == 1
            assert store.list_products()[0].name == "kept"

    def test_corruption_before_final_line_raises(self, tmp_path, rng):
        root = tmp_path / "catalog"
        with open_store(root) as store:
            _add(store, rng, "a")
            _add(store, rng, "b")
        products = root / "products.jsonl"
        lines = products.read_bytes().splitlines(keepends=True)
        lines[0] = b'{"broken": \n'
        products.write_bytes(b"".join(lines))
        with pytest.raises(StoreCorruptError):
            open_store(root, create=False)

    def test_missing_image_file_detected(self, tmp_path, rng):
        root = tmp_path / "catalog"
        with open_store(root) as store:
            rec, _ = _add(store, rng, "a")
        (root / rec.image_path).unlink()
        with open_store(root, create=False) as store:
            with pytest.raises(StoreCorruptError):
                store.image_bytes(rec.id)

    def test_missing_root_without_create_raises(self, tmp_path):
        with pytest.raises(NotFoundError):
            open_store(tmp_path / "absent", create=False)


class TestLocking:
    def test_second_open_is_refused(self, tmp_path):
        root = tmp_path / "catalog"
        with open_store(root):
            with pytest.raises(StoreLockedError):
                open_store(root)

    def test_lock_released_on_close(self, tmp_path):
        root = tmp_path / "catalog"
        with open_store(root):
            pass
        with open_store(root):
            pass  # no error: first handle released the lock

    def test_closed_store_rejects_operations(self, tmp_path):
        store = open_store(tmp_path / "catalog")
        store.close()
        with pytest.raises(StoreCorruptError):
            store.list_products()


class TestPotentials:
    def test_each_put_appends_one(self, store, rng):
        rec, img = _add(store, rng, "a")
        n0 = len(store.list_potentials())
        store.put_potential(rec.metadata, matched_product=rec.id)
        store.put_potential(rec.metadata, matched_product=None)
        pots = store.list_potentials()
        assert len(pots) == n0 + 2
        assert pots[-1].matched_product is None
