"""REST facade over the search pipeline and catalog store.

Endpoints (see docs/api.md for the field-level contract):

    POST /api/v1/search              multipart image [+ mask, k, engine]
    POST /api/v1/products            multipart image + name + category|"auto"
    POST /api/v1/restore             multipart image + mask [+ engine]
    GET  /api/v1/products/{id}       stored record
    GET  /api/v1/products/{id}/image stored PNG bytes
    GET  /api/v1/categories          known categories
    GET  /healthz                    liveness

Every failure returns an ApiError JSON body {"code", "message", "httpStatus"}
with code drawn from a closed set: malformed_image, dim_mismatch, empty_store,
unknown_category, not_found, internal.
"""

from __future__ import annotations

import base64
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, File, Form, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles

from . import retrieval
from .errors import (
    EmptyMaskError,
    EmptyStoreError,
    InvalidParamsError,
    InvalidSigmaError,
    MalformedFileError,
    NotFoundError,
    OccuSearchError,
    ShapeMismatchError,
    UnknownCategoryError,
    UnsupportedFormatError,
)
from .image import ImageBuffer, decode_image, decode_mask, encode_png
from .inpaint import ENGINES, InpaintRequest, default_model, inpaint, load_model
from .preprocess import edge_map_to_image, preprocess_auto
from .store import open_store

__all__ = ["create_app", "MAX_UPLOAD_BYTES", "MAX_DIMENSION"]

MAX_UPLOAD_BYTES = 16 * 1024 * 1024
MAX_DIMENSION = 4096

_ERROR_MAP = [
    (ShapeMismatchError, 400, "dim_mismatch"),
    ((MalformedFileError, UnsupportedFormatError), 400, "malformed_image"),
    ((InvalidParamsError, InvalidSigmaError, EmptyMaskError), 400, "malformed_image"),
    (EmptyStoreError, 409, "empty_store"),
    (UnknownCategoryError, 422, "unknown_category"),
    (NotFoundError, 404, "not_found"),
]


def _api_error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "httpStatus": status},
    )


def _map_error(exc: Exception) -> JSONResponse:
    for types, status, code in _ERROR_MAP:
        if isinstance(exc, types):
            return _api_error(status, code, str(exc))
    return _api_error(500, "internal", "internal error")


def _b64_png(img: ImageBuffer) -> str:
    return base64.b64encode(encode_png(img)).decode("ascii")


async def _read_upload(file: UploadFile, what: str) -> bytes:
    data = await file.read()
    if not data:
        raise MalformedFileError(f"{what} upload is empty")
    if len(data) > MAX_UPLOAD_BYTES:
        raise MalformedFileError(f"{what} exceeds the {MAX_UPLOAD_BYTES}-byte cap")
    return data


def _decode_capped(data: bytes) -> ImageBuffer:
    img = decode_image(data)
    if img.width > MAX_DIMENSION or img.height > MAX_DIMENSION:
        raise MalformedFileError(
            f"image is {img.width}x{img.height}, cap is {MAX_DIMENSION}x{MAX_DIMENSION}"
        )
    return img


def _check_engine(engine: str) -> str:
    if engine not in ENGINES:
        raise InvalidParamsError(f"unknown engine {engine!r}")
    return engine


def create_app(
    store_root,
    model_path=None,
    default_engine: str = "diffusion",
    ui_dir=None,
) -> FastAPI:
    """Build the application with its store opened; the store closes on shutdown."""
    _check_engine(default_engine)
    store = open_store(store_root)
    pconv_model = load_model(model_path) if model_path else None

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        store.close()

    app = FastAPI(title="occusearch", version="0.1.0", lifespan=lifespan)
    app.state.store = store

    def model_for(img: ImageBuffer):
        if pconv_model is not None and pconv_model.input_channels == img.channels:
            return pconv_model
        return default_model(channels=img.channels)

    @app.exception_handler(OccuSearchError)
    async def on_domain_error(request, exc: OccuSearchError):
        return _map_error(exc)

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request, exc: RequestValidationError):
        return _api_error(400, "malformed_image", "invalid or missing form fields")

    @app.exception_handler(Exception)
    async def on_unexpected(request, exc: Exception):
        return _map_error(exc)

    @app.get("/healthz", response_class=PlainTextResponse)
    async def healthz() -> str:
        return "ok"

    @app.post("/api/v1/search")
    async def search_endpoint(
        image: UploadFile = File(...),
        mask: UploadFile | None = File(None),
        k: int = Form(5),
        engine: str | None = Form(None),
    ):
        img = _decode_capped(await _read_upload(image, "image"))
        mask_img = None
        if mask is not None:
            mask_img = decode_mask(await _read_upload(mask, "mask"))
            if (mask_img.height, mask_img.width) != (img.height, img.width):
                raise ShapeMismatchError(
                    f"mask is {mask_img.width}x{mask_img.height}, "
                    f"image is {img.width}x{img.height}"
                )
        eng = _check_engine(engine) if engine else default_engine
        result = retrieval.search(
            store, img, mask=mask_img, k=k, engine=eng, model=model_for(img)
        )
        return {
            "restoredImage": _b64_png(result.restored),
            "preprocMode": result.mode,
            "category": result.category,
            "matches": [
                {
                    "productId": m.product.id,
                    "name": m.product.name,
                    "category": m.product.category,
                    "score": m.score,
                    "categoryScore": m.category_score,
                    "imageUrl": f"/api/v1/products/{m.product.id}/image",
                }
                for m in result.matches
            ],
        }

    @app.post("/api/v1/products", status_code=201)
    async def register_endpoint(
        image: UploadFile = File(...),
        name: str = Form(...),
        category: str = Form(...),
    ):
        img = _decode_capped(await _read_upload(image, "image"))
        if not name.strip():
            raise InvalidParamsError("product name must be non-empty")
        rec = retrieval.register_product(store, img, name, category)
        return rec.to_dict()

    @app.post("/api/v1/restore")
    async def restore_endpoint(
        image: UploadFile = File(...),
        mask: UploadFile = File(...),
        engine: str | None = Form(None),
    ):
        img = _decode_capped(await _read_upload(image, "image"))
        mask_img = decode_mask(await _read_upload(mask, "mask"))
        if (mask_img.height, mask_img.width) != (img.height, img.width):
            raise ShapeMismatchError(
                f"mask is {mask_img.width}x{mask_img.height}, image is {img.width}x{img.height}"
            )
        eng = _check_engine(engine) if engine else default_engine
        report = preprocess_auto(img)
        restored = inpaint(
            InpaintRequest(report.output, mask_img, engine=eng), model_for(report.output)
        )
        return {
            "preprocessed": _b64_png(report.output),
            "restored": _b64_png(restored),
            "edges": _b64_png(edge_map_to_image(report.edges)),
            "preprocMode": report.mode,
        }

    @app.get("/api/v1/products/{product_id}")
    async def get_product_endpoint(product_id: str):
        return store.get_product(product_id).to_dict()

    @app.get("/api/v1/products/{product_id}/image")
    async def get_product_image_endpoint(product_id: str):
        return Response(content=store.image_bytes(product_id), media_type="image/png")

    @app.get("/api/v1/categories")
    async def categories_endpoint():
        counts: dict[str, int] = {}
        for p in store.list_products():
            counts[p.category] = counts.get(p.category, 0) + 1
        return [
            {"id": c.id, "name": c.name, "productCount": counts.get(c.id, 0)}
            for c in store.list_categories()
        ]

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
