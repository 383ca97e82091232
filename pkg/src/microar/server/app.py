"""FastAPI wiring for the story repository.

Endpoints (all under one app):
  POST /stories                      publish a `.mar` package
  GET  /stories?page=&page_size=&creator=
  GET  /stories/{id}                 package bytes; counts a view
  GET  /stories/{id}/meta            listing without counting a view
  GET  /stories/{id}/lineage         root..id chain of listings
  GET  /stats                        corpus usage report
  POST /assets                       store an asset blob
  GET  /assets/{key}                 asset bytes
  GET  /assets?q=&limit=             ranked search

Configuration comes from the environment: MICROAR_DATA_DIR,
MICROAR_BIND (host:port), MICROAR_PAGE_SIZE_CAP. Identity is a bare
`creator` header trusted as-is — fine for a study-scale deployment,
not for production.
"""

from __future__ import annotations

import logging
import os
import time
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Header, Query, Request, Response
from fastapi.responses import JSONResponse

from .. import catalog as catalog_mod
from ..canonical import canonical_dumps
from ..model import Aabb
from ..package import MEDIA_TYPE
from .storage import (
    CreatorMismatchError,
    InvalidPackageError,
    StoryStore,
    UnknownParentError,
    UnknownStoryError,
)

DEFAULT_PAGE_SIZE_CAP = 100

log = logging.getLogger("microar.server")


def create_app(data_dir: Optional[str] = None, page_size_cap: int = DEFAULT_PAGE_SIZE_CAP) -> FastAPI:
    root = Path(data_dir or os.environ.get("MICROAR_DATA_DIR", "microar-data"))
    store = StoryStore(root)
    assets = catalog_mod.AssetCatalog(root / "assets")
    app = FastAPI(title="microar repository", version="0.1.0")
    app.state.store = store
    app.state.assets = assets

    @app.middleware("http")
    async def request_log(request: Request, call_next):
        started = time.perf_counter()
        response = await call_next(request)
        log.info(
            canonical_dumps(
                {
                    "duration_ms": round((time.perf_counter() - started) * 1000, 3),
                    "method": request.method,
                    "path": request.url.path,
                    "status": response.status_code,
                }
            )
        )
        return response

    def error(status: int, code: str, detail: str, **extra) -> JSONResponse:
        return JSONResponse({"error": code, "detail": detail, **extra}, status_code=status)

    @app.post("/stories")
    async def publish_story(request: Request, creator: Optional[str] = Header(default=None)):
        data = await request.body()
        if creator is None:
            return error(401, "missing_creator", "the creator header is required to publish")
        try:
            story_id, created = store.publish(data, expected_creator=creator)
        except InvalidPackageError as exc:
            return error(
                422,
                "invalid_package",
                str(exc),
                violations=[{"path": v.path, "rule": v.rule, "detail": v.detail} for v in exc.violations],
            )
        except UnknownParentError as exc:
            return error(409, "broken_lineage", str(exc))
        except CreatorMismatchError as exc:
            return error(403, "creator_mismatch", str(exc))
        return JSONResponse({"story_id": story_id, "created": created}, status_code=201 if created else 200)

    @app.get("/stories/{story_id}")
    def fetch_story(story_id: str):
        try:
            data = store.fetch(story_id)
        except UnknownStoryError as exc:
            return error(404, "not_found", str(exc))
        return Response(content=data, media_type=MEDIA_TYPE)

    @app.get("/stories/{story_id}/meta")
    def fetch_meta(story_id: str):
        try:
            listing = store.meta(story_id)
        except UnknownStoryError as exc:
            return error(404, "not_found", str(exc))
        return JSONResponse(listing.to_dict())

    @app.get("/stories/{story_id}/lineage")
    def get_lineage(story_id: str):
        try:
            chain = store.lineage(story_id)
        except UnknownStoryError as exc:
            return error(404, "not_found", str(exc))
        except Exception as exc:  # broken/cyclic chains are unreachable via publish
            return error(500, "lineage_integrity", str(exc))
        return JSONResponse({"lineage": [l.to_dict() for l in chain]})

    @app.get("/stories")
    def list_stories(
        page: int = Query(default=1),
        page_size: int = Query(default=20),
        creator: Optional[str] = Query(default=None),
    ):
        if page < 1:
            return error(400, "bad_page", "page must be >= 1")
        if not 1 <= page_size <= page_size_cap:
            return error(400, "bad_page_size", f"page_size must be in [1, {page_size_cap}]")
        listings, total = store.list_stories(page, page_size, creator)
        return JSONResponse(
            {
                "page": page,
                "page_size": page_size,
                "total": total,
                "stories": [l.to_dict() for l in listings],
            }
        )

    @app.get("/stats")
    def get_stats():
        report = store.stats().to_canonical_json()
        return Response(content=report, media_type="application/json")

    @app.post("/assets")
    async def put_asset(
        request: Request,
        display_name: str = Query(default=""),
        tags: str = Query(default=""),
        bounds_um: Optional[str] = Query(default=None),
    ):
        if not display_name:
            return error(400, "bad_request", "display_name query parameter is required")
        data = await request.body()
        bounds = None
        if bounds_um:
            try:
                values = [int(v) for v in bounds_um.split(",")]
                if len(values) != 6:
                    raise ValueError("expected 6 comma-separated integers")
                bounds = Aabb(
                    tuple(v / 10**6 for v in values[:3]),
                    tuple(v / 10**6 for v in values[3:]),
                )
            except ValueError as exc:
                return error(400, "bad_bounds", str(exc))
        tag_list = [t for t in (t.strip() for t in tags.split(",")) if t]
        try:
            existed = len(assets)
            key = assets.put_asset(data, display_name, tag_list, bounds)
            created = len(assets) != existed
        except catalog_mod.CatalogError as exc:
            return error(400, "bad_asset", str(exc))
        return JSONResponse({"asset_key": key, "created": created}, status_code=201 if created else 200)

    @app.get("/assets/{key}")
    def get_asset(key: str):
        try:
            blob = assets.get_asset(key)
        except catalog_mod.AssetNotFoundError as exc:
            return error(404, "not_found", str(exc))
        return Response(content=blob, media_type="application/octet-stream")

    @app.get("/assets")
    def search_assets(q: Optional[str] = Query(default=None), limit: int = Query(default=10)):
        if q is None:
            return error(400, "bad_query", "the q query parameter is required")
        if limit < 1:
            return error(400, "bad_query", "limit must be positive")
        records = assets.search(q, limit)
        return JSONResponse(
            {
                "results": [
                    {
                        "asset_key": r.asset_key,
                        "blob_size": r.blob_size,
                        "bounds_um": catalog_mod._bounds_to_um(r.bounds),
                        "display_name": r.display_name,
                        "tags": list(r.tags),
                    }
                    for r in records
                ]
            }
        )

    return app


def main() -> None:
    import uvicorn

    logging.basicConfig(level=logging.INFO, format="%(message)s")
    bind = os.environ.get("MICROAR_BIND", "127.0.0.1:8037")
    host, _, port = bind.rpartition(":")
    cap = int(os.environ.get("MICROAR_PAGE_SIZE_CAP", DEFAULT_PAGE_SIZE_CAP))
    uvicorn.run(create_app(page_size_cap=cap), host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
