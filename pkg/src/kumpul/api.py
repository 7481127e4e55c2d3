"""HTTP service under /v1: sources, jobs, datasets, results, static UI.

Thin veneer over the coordinator and store: every state change flows
through job submission; no endpoint runs work inline. Workers execute
separately (see `kumpul serve` / `kumpul worker`).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from fastapi import Depends, FastAPI, Header, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .analysis import analyzer_catalog
from .collection import connector_catalog
from .coordinator import JOB_TYPES, Coordinator
from .errors import ConflictError, NotFoundError, ValidationError
from .executors import validate_payload
from .store import Store

DEFAULT_PORT = 8080
PAGE_SIZE_LIMIT = 1000


@dataclass(frozen=True)
class ApiConfig:
    host: str = "127.0.0.1"
    port: int = DEFAULT_PORT
    static_path: Optional[str] = None
    page_size_limit: int = PAGE_SIZE_LIMIT
    auth_token: Optional[str] = None

    def __post_init__(self) -> None:
        if not 0 < self.port < 65536:
            raise ValidationError("port must be in 1..65535")
        if self.page_size_limit > PAGE_SIZE_LIMIT:
            raise ValidationError(f"page size limit capped at {PAGE_SIZE_LIMIT}")


class SubmitJobBody(BaseModel):
    job_type: str
    payload: dict[str, Any] = {}


def create_app(store: Store, config: ApiConfig = ApiConfig()) -> FastAPI:
    app = FastAPI(title="kumpul", version="0.1.0", docs_url=None, redoc_url=None)
    coordinator = Coordinator(store, validator=validate_payload)

    def require_auth(authorization: Optional[str] = Header(None)) -> None:
        if config.auth_token is None:
            return
        if authorization != f"Bearer {config.auth_token}":
            raise _Unauthorized()

    class _Unauthorized(Exception):
        pass

    @app.exception_handler(_Unauthorized)
    async def _unauthorized(_req: Request, _exc: _Unauthorized) -> JSONResponse:
        return JSONResponse(status_code=401, content={"error": "missing or bad auth token"})

    @app.exception_handler(ValidationError)
    async def _validation(_req: Request, exc: ValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"error": str(exc), "fields": exc.fields}
        )

    @app.exception_handler(NotFoundError)
    async def _not_found(_req: Request, exc: NotFoundError) -> JSONResponse:
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(ConflictError)
    async def _conflict(_req: Request, exc: ConflictError) -> JSONResponse:
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def _bad_body(_req: Request, exc: RequestValidationError) -> JSONResponse:
        fields = {
            ".".join(str(p) for p in err.get("loc", ())): err.get("msg", "invalid")
            for err in exc.errors()
        }
        return JSONResponse(
            status_code=400, content={"error": "invalid request body", "fields": fields}
        )

    # -- service -------------------------------------------------------------

    @app.get("/v1/health")
    async def health() -> dict[str, str]:
        return {"status": "ok"}

    @app.get("/health", include_in_schema=False)
    async def health_alias() -> dict[str, str]:
        # unversioned liveness alias for probes; /v1/health is canonical
        return {"status": "ok"}

    @app.get("/v1/sources", dependencies=[Depends(require_auth)])
    async def sources() -> dict[str, Any]:
        return {"sources": connector_catalog()}

    @app.get("/v1/analyzers", dependencies=[Depends(require_auth)])
    async def analyzers() -> dict[str, Any]:
        return {"analyzers": analyzer_catalog()}

    # -- jobs ----------------------------------------------------------------

    @app.post("/v1/jobs", status_code=201, dependencies=[Depends(require_auth)])
    async def submit_job(
        body: SubmitJobBody,
        idempotency_key: Optional[str] = Header(None, alias="Idempotency-Key"),
    ) -> dict[str, str]:
        job_id = coordinator.submit_job(
            body.job_type, body.payload, idempotency_key=idempotency_key
        )
        return {"job_id": job_id}

    @app.get("/v1/jobs", dependencies=[Depends(require_auth)])
    async def list_jobs(
        response: Response,
        status: Optional[str] = Query(None),
        type: Optional[str] = Query(None),
        offset: int = Query(0, ge=0),
        limit: int = Query(50, ge=1),
        page: Optional[int] = Query(None, ge=0),
    ) -> dict[str, Any]:
        if type is not None and type not in JOB_TYPES:
            raise ValidationError(f"unknown job type {type!r}", {"type": "invalid"})
        limit = min(limit, config.page_size_limit)
        if page is not None:
            offset = page * limit
        jobs, total = coordinator.list_jobs(status, type, offset, limit)
        response.headers["X-Total-Count"] = str(total)
        return {"jobs": [j.to_dict() for j in jobs], "total": total}

    @app.get("/v1/jobs/{job_id}", dependencies=[Depends(require_auth)])
    async def get_job(job_id: str) -> dict[str, Any]:
        return coordinator.get_job(job_id).to_dict()

    @app.post("/v1/jobs/{job_id}/cancel", dependencies=[Depends(require_auth)])
    async def cancel_job(job_id: str) -> dict[str, str]:
        coordinator.cancel_job(job_id)
        return {"job_id": job_id, "status": "cancelled"}

    @app.get("/v1/jobs/{job_id}/result", dependencies=[Depends(require_auth)])
    async def job_result(job_id: str) -> Any:
        job = coordinator.get_job(job_id)
        if job.status != "completed":
            raise NotFoundError(f"no result yet: job {job_id!r} is {job.status}")
        return store.get_result(job_id)

    # -- datasets ---------------------------------------------------------------

    @app.get("/v1/datasets", dependencies=[Depends(require_auth)])
    async def list_datasets(response: Response) -> dict[str, Any]:
        datasets = store.list_datasets()
        response.headers["X-Total-Count"] = str(len(datasets))
        return {"datasets": [d.to_dict() for d in datasets]}

    @app.get("/v1/datasets/{dataset_id}", dependencies=[Depends(require_auth)])
    async def get_dataset(dataset_id: str) -> dict[str, Any]:
        return store.get_dataset(dataset_id).to_dict()

    @app.get("/v1/datasets/{dataset_id}/records", dependencies=[Depends(require_auth)])
    async def dataset_records(
        dataset_id: str,
        response: Response,
        offset: int = Query(0, ge=0),
        limit: int = Query(100, ge=0),
    ) -> dict[str, Any]:
        limit = min(limit, config.page_size_limit)
        meta = store.get_dataset(dataset_id)
        records = store.read_records(dataset_id, offset=offset, limit=limit)
        response.headers["X-Total-Count"] = str(meta.record_count)
        return {"records": [r.to_dict() for r in records], "total": meta.record_count}

    @app.get("/v1/datasets/{dataset_id}/lineage", dependencies=[Depends(require_auth)])
    async def dataset_lineage(dataset_id: str) -> dict[str, Any]:
        return store.get_lineage(dataset_id)

    if config.static_path and Path(config.static_path).is_dir():
        app.mount("/", StaticFiles(directory=config.static_path, html=True), name="ui")

    return app


def serve(store: Store, config: ApiConfig = ApiConfig()) -> None:
    """Run the API in the current process (blocking)."""
    import uvicorn

    uvicorn.run(create_app(store, config), host=config.host, port=config.port)
