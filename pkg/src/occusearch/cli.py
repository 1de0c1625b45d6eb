"""Command-line entry point: run pipeline stages standalone, bulk-index a
directory, query a store, benchmark degradation handling, train the toy
restoration model, and launch the HTTP service.

Exit codes: 0 success, 1 pipeline failure (one-line message on stderr),
2 usage error (argparse).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .bench import run_bench
from .errors import MalformedFileError, OccuSearchError
from .features import generate_metadata, metadata_to_dict
from .image import decode_image, decode_mask, encode_png, to_grayscale
from .inpaint import (
    InpaintRequest,
    default_model,
    inpaint,
    load_model,
    save_model,
    train_toy,
)
from .preprocess import CannyParams, canny, edge_map_to_image, preprocess_auto
from .retrieval import register_product, search
from .store import open_store
from .synth import write_corpus

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".gif"}


def _read_image(path: str):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise MalformedFileError(f"cannot read {path}: {exc.strerror}")
    return decode_image(data)


def _write_image(path: str, img) -> None:
    Path(path).write_bytes(encode_png(img))


def _maybe_model(path: str | None):
    return load_model(path) if path else None


def _corpus_files(root: Path) -> list[Path]:
    return sorted(p for p in root.rglob("*") if p.suffix.lower() in IMAGE_SUFFIXES)


# -- subcommand bodies -------------------------------------------------------


def _cmd_preprocess(args) -> int:
    report = preprocess_auto(_read_image(args.input), mode=args.mode)
    _write_image(args.output, report.output)
    print(f"{args.output}: mode={report.mode} steps={','.join(report.steps)}")
    return 0


def _cmd_inpaint(args) -> int:
    img = _read_image(args.input)
    mask = decode_mask(Path(args.mask).read_bytes())
    req = InpaintRequest(img, mask, engine=args.engine)
    _write_image(args.output, inpaint(req, _maybe_model(args.model)))
    print(f"{args.output}: engine={args.engine}")
    return 0


def _cmd_edges(args) -> int:
    img = _read_image(args.input)
    params = CannyParams(sigma=args.sigma, t_low=args.tlow, t_high=args.thigh)
    edge = canny(img, params)
    _write_image(args.output, edge_map_to_image(edge))
    print(f"{args.output}: {edge.edge_count} edge pixels")
    return 0


def _cmd_metadata(args) -> int:
    meta = generate_metadata(_read_image(args.input))
    print(json.dumps(metadata_to_dict(meta), indent=2))
    return 0


def _cmd_index(args) -> int:
    root = Path(args.directory)
    if not root.is_dir():
        raise MalformedFileError(f"{root} is not a directory")
    with open_store(args.store) as store:
        count = 0
        for cat_dir in sorted(p for p in root.iterdir() if p.is_dir()):
            store.ensure_category(cat_dir.name)
            for f in _corpus_files(cat_dir):
                register_product(store, decode_image(f.read_bytes()), f.stem, cat_dir.name)
                count += 1
        n_cats = len(store.list_categories())
    print(f"indexed {count} products across {n_cats} categories into {args.store}")
    return 0


def _cmd_search(args) -> int:
    img = _read_image(args.input)
    mask = decode_mask(Path(args.mask).read_bytes()) if args.mask else None
    with open_store(args.store) as store:
        result = search(store, img, mask=mask, k=args.k,
                        engine=args.engine, model=_maybe_model(args.model))
    if args.restored_out:
        _write_image(args.restored_out, result.restored)
    print(json.dumps({
        "category": result.category,
        "preprocMode": result.mode,
        "matches": [
            {
                "productId": m.product.id,
                "name": m.product.name,
                "category": m.product.category,
                "score": m.score,
            }
            for m in result.matches
        ],
    }, indent=2))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, _, port = args.addr.rpartition(":")
    app = create_app(
        args.store,
        model_path=args.model,
        default_engine=args.engine,
        ui_dir=args.ui,
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def _cmd_bench(args) -> int:
    with open_store(args.store) as store:
        report = run_bench(store, hole_frac=args.hole_frac, seed=args.seed,
                           engine=args.engine, model=_maybe_model(args.model))
    print(json.dumps(report.to_dict(), indent=2))
    print(report.render_table(), file=sys.stderr)
    return 0


def _cmd_train_toy(args) -> int:
    files = _corpus_files(Path(args.corpus))
    if not files:
        raise MalformedFileError(f"no images under {args.corpus}")
    corpus = [decode_image(f.read_bytes()) for f in files]
    model = default_model(channels=corpus[0].channels, seed=args.seed)
    result = train_toy(model, corpus, epochs=args.epochs, lr=args.lr, seed=args.seed)
    save_model(result.model, args.out)
    for i, loss in enumerate(result.epoch_losses):
        print(f"epoch {i + 1:3d}  loss {loss:.6f}")
    print(f"saved model to {args.out}")
    return 0


def _cmd_demo_corpus(args) -> int:
    n = write_corpus(args.directory, seed=args.seed)
    print(f"wrote {n} images under {args.directory}")
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="occusearch",
        description="Occlusion-tolerant product image search: preprocessing, "
        "inpainting, and histogram retrieval over a file-backed catalog.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="enhance an image (case-based color/gray routing)")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--mode", choices=["auto", "color", "gray"], default="auto")
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("inpaint", help="fill the mask's hole pixels")
    p.add_argument("input")
    p.add_argument("mask", help="grayscale PNG, >=128 valid, <128 hole")
    p.add_argument("output")
    p.add_argument("--engine", choices=["diffusion", "pconv"], default="diffusion")
    p.add_argument("--model", default=None, help="trained pconv model (.npz)")
    p.set_defaults(func=_cmd_inpaint)

    p = sub.add_parser("edges", help="detect edges (two-threshold tracking)")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--tlow", type=float, default=80.0)
    p.add_argument("--thigh", type=float, default=140.0)
    p.add_argument("--sigma", type=float, default=1.4)
    p.set_defaults(func=_cmd_edges)

    p = sub.add_parser("metadata", help="print histogram metadata for an image as JSON")
    p.add_argument("input")
    p.set_defaults(func=_cmd_metadata)

    p = sub.add_parser("index", help="register every image under <dir>/<category>/*")
    p.add_argument("directory")
    p.add_argument("--store", required=True)
    p.set_defaults(func=_cmd_index)

    p = sub.add_parser("search", help="rank catalog products against a query image")
    p.add_argument("input")
    p.add_argument("--store", required=True)
    p.add_argument("--mask", default=None)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--engine", choices=["diffusion", "pconv"], default="diffusion")
    p.add_argument("--model", default=None)
    p.add_argument("--restored-out", default=None, help="also write the restored query PNG")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--addr", default=os.environ.get("OCCU_ADDR", "127.0.0.1:8010"))
    p.add_argument("--store", default=os.environ.get("OCCU_STORE", "./catalog"))
    p.add_argument("--model", default=os.environ.get("OCCU_MODEL") or None)
    p.add_argument("--engine", default=os.environ.get("OCCU_ENGINE", "diffusion"),
                   choices=["diffusion", "pconv"])
    p.add_argument("--ui", default=os.environ.get("OCCU_UI") or None,
                   help="directory with the built web UI (served at /)")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("bench", help="compare raw vs pipeline classification on damaged queries")
    p.add_argument("--store", required=True)
    p.add_argument("--hole-frac", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--engine", choices=["diffusion", "pconv"], default="diffusion")
    p.add_argument("--model", default=None)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("train-toy", help="train the restoration network on a small corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_train_toy)

    p = sub.add_parser("demo-corpus", help="write the seeded 4-category demo corpus")
    p.add_argument("directory")
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=_cmd_demo_corpus)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OccuSearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
