"""HTTP facade over the graph, catalog, metadata, similarity and comparison.

Plain JSON over HTTP; errors are ``{"error": code, "message": text}``.
Writes require the ``X-Curator`` header, whose value becomes the
provenance ``created_by``. All mutations are funneled through
:meth:`ApplicationState.commit`, so acknowledged writes are durable and
reads never observe half-applied batches.
"""

from __future__ import annotations

import logging
import socket
from dataclasses import dataclass
from pathlib import Path

from fastapi import Body, FastAPI, Header, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import comparison as comparison_mod
from . import metadata as metadata_mod
from .errors import ScholarGraphError
from .graph_store import Node, NodeKind, Statement, format_timestamp
from .persistence import ApplicationState

log = logging.getLogger(__name__)


@dataclass
class ServiceConfig:
    data_dir: Path
    port: int = 8080
    host: str = "127.0.0.1"
    metadata_base_url: str | None = None  # live Crossref-compatible endpoint
    fixture_dir: Path | None = None  # offline fixtures (default: packaged)
    metadata_timeout: float = 10.0
    similarity_depth: int = 2
    cors_origin: str = "*"

    def metadata_source(self) -> metadata_mod.MetadataSource:
        if self.metadata_base_url:
            return metadata_mod.MetadataSource(
                base_url=self.metadata_base_url, timeout=self.metadata_timeout
            )
        fixture_dir = self.fixture_dir or metadata_mod.default_fixture_dir()
        return metadata_mod.MetadataSource(
            fixture_dir=Path(fixture_dir), timeout=self.metadata_timeout
        )


class BadRequest(ScholarGraphError):
    code = "MalformedRequest"


class MissingCuratorToken(ScholarGraphError):
    code = "MissingCuratorToken"


_STATUS_BY_CODE = {
    "MalformedRequest": 400,
    "EmptyLabel": 400,
    "ClassesOnNonResource": 400,
    "KindViolation": 400,
    "NotAResource": 400,
    "TooFewContributions": 400,
    "InvalidDoi": 400,
    "MalformedRecord": 400,
    "ForwardReference": 400,
    "MissingCuratorToken": 401,
    "ReservedKey": 403,
    "UnknownNode": 404,
    "UnknownStatement": 404,
    "NotAPaper": 404,
    "NotAContribution": 404,
    "NotFound": 404,
    "UnknownField": 404,
    "DuplicateTriple": 409,
    "IdCollision": 409,
    "ValidationFailed": 422,
    "UnknownNodeReference": 422,
    "MalformedDocument": 502,
    "UpstreamError": 502,
    "IndexStale": 503,
    "StorageFailure": 503,
    "DirectoryLocked": 503,
    "SinkFailure": 503,
    "CorruptLog": 503,
    "Timeout": 504,
}

# submission problems are 422 regardless of the code's default mapping
_INGEST_OVERRIDES = {"UnknownField": 422, "UnknownNodeReference": 422}


def _error_payload(exc: ScholarGraphError) -> dict:
    payload = {"error": exc.code, "message": exc.message}
    report = getattr(exc, "report", None)
    if report is not None:
        payload["report"] = report.to_dict()
    return payload


def _node_dict(node: Node) -> dict:
    return {
        "id": node.id,
        "kind": node.kind.value,
        "label": node.label,
        "classes": sorted(node.classes),
    }


def _statement_dict(stmt: Statement) -> dict:
    return {
        "id": stmt.id,
        "subject": stmt.subject,
        "predicate": stmt.predicate,
        "object": stmt.object,
        "annotations": dict(stmt.annotations),
        "created_at": format_timestamp(stmt.provenance.created_at),
        "created_by": stmt.provenance.created_by,
    }


def _require_curator(value: str | None) -> str:
    if not value:
        raise MissingCuratorToken("write requests need the X-Curator header")
    return value


def create_app(state: ApplicationState, config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="scholargraph", docs_url=None, redoc_url=None)
    if config.cors_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[config.cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )
    source = config.metadata_source()

    @app.exception_handler(ScholarGraphError)
    async def domain_error(request: Request, exc: ScholarGraphError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        if request.url.path == "/api/papers" and request.method == "POST":
            status = _INGEST_OVERRIDES.get(exc.code, status)
        return JSONResponse(status_code=status, content=_error_payload(exc))

    @app.exception_handler(RequestValidationError)
    async def body_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": "MalformedRequest", "message": str(exc.errors()[:1])},
        )

    @app.get("/health")
    def health() -> dict:
        return {
            "status": "ok",
            "statements": state.store.statement_count,
            "nodes": state.store.node_count,
            "sequence": state.sequence,
        }

    # -- nodes -----------------------------------------------------------------

    @app.post("/api/nodes", status_code=201)
    def create_node(
        payload: dict = Body(...), x_curator: str | None = Header(default=None)
    ) -> dict:
        _require_curator(x_curator)
        kind_raw = payload.get("kind")
        label = payload.get("label")
        classes = payload.get("classes", [])
        try:
            kind = NodeKind(kind_raw)
        except ValueError:
            raise BadRequest(f"unknown node kind {kind_raw!r}") from None
        if not isinstance(label, str):
            raise BadRequest("label must be a string")
        if not isinstance(classes, list) or not all(
            isinstance(c, str) for c in classes
        ):
            raise BadRequest("classes must be a list of strings")
        node_id = state.write_create_node(kind, label, classes)
        return _node_dict(state.store.get_node(node_id))

    @app.get("/api/nodes")
    def find_nodes(q: str = "", kind: str | None = None, limit: int = 10) -> list:
        node_kind = None
        if kind:
            try:
                node_kind = NodeKind(kind)
            except ValueError:
                raise BadRequest(f"unknown node kind {kind!r}") from None
        if limit < 1:
            raise BadRequest("limit must be >= 1")
        return [_node_dict(n) for n in state.store.find_nodes(q, node_kind, limit)]

    # -- statements -------------------------------------------------------------

    @app.post("/api/statements", status_code=201)
    def add_statement(
        payload: dict = Body(...), x_curator: str | None = Header(default=None)
    ) -> dict:
        curator = _require_curator(x_curator)
        for field_name in ("subject", "predicate", "object"):
            if not isinstance(payload.get(field_name), str):
                raise BadRequest(f"{field_name} must be a node id string")
        sid = state.write_add_statement(
            payload["subject"], payload["predicate"], payload["object"], curator
        )
        return _statement_dict(state.store.get_statement(sid))

    @app.get("/api/statements")
    def query_statements(
        subject: str | None = None,
        predicate: str | None = None,
        object: str | None = None,
    ) -> list:
        return [
            _statement_dict(s)
            for s in state.store.query_statements(subject, predicate, object)
        ]

    @app.delete("/api/statements/{statement_id}", status_code=204)
    def delete_statement(
        statement_id: str, x_curator: str | None = Header(default=None)
    ) -> Response:
        _require_curator(x_curator)
        state.write_delete_statement(statement_id)
        return Response(status_code=204)

    @app.put("/api/statements/{statement_id}/annotations/{key}")
    def annotate_statement(
        statement_id: str,
        key: str,
        payload: dict = Body(...),
        x_curator: str | None = Header(default=None),
    ) -> dict:
        _require_curator(x_curator)
        value = payload.get("value")
        if not isinstance(value, str):
            raise BadRequest("value must be a string")
        stmt = state.write_annotate_statement(statement_id, key, value)
        return _statement_dict(stmt)

    # -- metadata ----------------------------------------------------------------

    @app.get("/api/metadata/doi/{doi:path}")
    def fetch_metadata(doi: str) -> dict:
        normalized = metadata_mod.normalize_doi(doi)
        return metadata_mod.fetch_metadata(normalized, source).to_dict()

    # -- papers ---------------------------------------------------------------------

    @app.post("/api/papers", status_code=201)
    def ingest_paper(
        payload: dict = Body(...), x_curator: str | None = Header(default=None)
    ) -> dict:
        curator = _require_curator(x_curator)
        body = dict(payload)
        body["submitted_by"] = curator
        paper_id = state.write_ingest_paper(body)
        return state.catalog.get_paper(paper_id).to_dict()

    @app.get("/api/papers/{paper_id}")
    def get_paper(paper_id: str) -> dict:
        return state.catalog.get_paper(paper_id).to_dict()

    @app.get("/api/papers")
    def list_papers(field: str | None = None, descendants: bool = False) -> list:
        if field is None:
            return state.catalog.list_papers()
        return state.catalog.list_papers_by_field(field, include_descendants=descendants)

    @app.get("/api/fields")
    def research_fields() -> list:
        return state.taxonomy.to_tree()

    # -- similarity / comparison --------------------------------------------------

    @app.get("/api/contributions/{contribution_id}/similar")
    def similar(contribution_id: str, k: int = 5) -> list:
        if k < 1:
            raise BadRequest("k must be >= 1")
        return state.similar_items(contribution_id, k)

    @app.get("/api/comparison")
    def comparison(contributions: str = "", format: str = "json") -> Response:
        ids = [part for part in contributions.split(",") if part]
        table = state.comparison_table(ids)
        if format == "csv":
            return Response(
                content=comparison_mod.render_csv(table), media_type="text/csv"
            )
        if format != "json":
            raise BadRequest(f"unknown format {format!r}")
        return JSONResponse(content=table.to_dict())

    # -- admin ------------------------------------------------------------------------

    @app.post("/api/admin/compact")
    def compact(x_curator: str | None = Header(default=None)) -> dict:
        _require_curator(x_curator)
        stats = state.compact()
        return {
            "snapshot_records": stats.snapshot_records,
            "covered_sequence": stats.covered_sequence,
        }

    return app


def check_port_free(host: str, port: int) -> None:
    from .errors import PortInUse

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        raise PortInUse(f"cannot bind {host}:{port}: {exc}") from exc
    finally:
        probe.close()


def serve(config: ServiceConfig) -> None:
    """Restore state from the data directory and serve until interrupted."""
    import uvicorn

    check_port_free(config.host, config.port)
    state = ApplicationState(
        config.data_dir, similarity_depth=config.similarity_depth
    )
    try:
        app = create_app(state, config)
        log.info(
            "serving on %s:%s (data dir %s, %d statements)",
            config.host,
            config.port,
            config.data_dir,
            state.store.statement_count,
        )
        uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    finally:
        state.close()
