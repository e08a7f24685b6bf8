"""HTTP JSON API over the analysis pipeline and the document store."""

import shutil
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from scistory import entities, service
from scistory.analytics import LEVELS, PARAGRAPH, SENTENCE
from scistory.config import PipelineConfig
from scistory.errors import (
    EmptyCollectionError,
    EmptyDocumentError,
    NotFoundError,
    ParameterError,
    SchemaError,
    ScistoryError,
)
from scistory.repository import Repository
from scistory.storyline import layout_to_json


class DocumentUpload(BaseModel):
    text: str | None = None
    structured: dict | None = None
    title: str = ""
    pub_date: str = ""


class GazetteerUpdate(BaseModel):
    canonical: str
    aliases: list[str] = Field(default_factory=list)


def _writable_gazetteer(config: PipelineConfig, data_dir: Path) -> Path:
    """Copy the seed gazetteer into the store on first use so edits persist."""
    target = data_dir / "gazetteer.json"
    if not target.exists():
        shutil.copyfile(config.gazetteer_path, target)
    return target


def create_app(
    data_dir,
    config: PipelineConfig | None = None,
    static_dir: Path | None = None,
) -> FastAPI:
    config = config or PipelineConfig()
    data_dir = Path(data_dir)
    repo = Repository(data_dir)
    config.gazetteer_path = _writable_gazetteer(config, data_dir)
    pipeline = service.Pipeline(config)

    app = FastAPI(title="scistory", version="0.1.0")

    @app.exception_handler(ScistoryError)
    async def engine_error(request: Request, exc: ScistoryError):
        status = 500
        if isinstance(exc, NotFoundError):
            status = 404
        elif isinstance(exc, (SchemaError, ParameterError, EmptyDocumentError)):
            status = 400
        elif isinstance(exc, EmptyCollectionError):
            status = 409
        return JSONResponse(status_code=status,
                            content={"error": type(exc).__name__, "detail": str(exc)})

    @app.post("/api/documents")
    def upload(body: DocumentUpload):
        if body.text is not None and len(body.text.encode("utf-8")) > config.max_text_bytes:
            raise HTTPException(status_code=413, detail="text exceeds the size cap")
        meta = {"title": body.title, "pub_date": body.pub_date}
        if body.structured is not None:
            record = pipeline.analyze_document(body.structured, "structured", meta, repo)
        elif body.text is not None:
            record = pipeline.analyze_document(body.text, "plain", meta, repo)
        else:
            raise HTTPException(status_code=400, detail="provide 'text' or 'structured'")
        return {"doc_id": record.doc_id}

    @app.get("/api/documents")
    def index():
        return [row.__dict__ for row in repo.list()]

    @app.get("/api/documents/{doc_id}/storyline")
    def storyline(
        doc_id: str,
        granularity: str = Query(default=PARAGRAPH),
        entities: str | None = Query(default=None),
    ):
        record = repo.load(doc_id)
        subset = [e for e in entities.split(",") if e] if entities else None
        full = service.storyline_layout(
            record, granularity, subset, top_k=config.top_k_entities
        )
        return layout_to_json(full)

    @app.get("/api/documents/{doc_id}/text")
    def text(doc_id: str):
        return service.document_text_payload(repo.load(doc_id))

    @app.get("/api/documents/{doc_id}/entities")
    def ranking(doc_id: str, top_k: int | None = Query(default=None)):
        return service.entity_ranking_payload(repo.load(doc_id), top_k)

    @app.get("/api/documents/{doc_id}/cooccurrence")
    def cooccurrence(doc_id: str, level: str = Query(default=SENTENCE)):
        if level not in LEVELS:
            raise HTTPException(status_code=400, detail=f"unknown level {level!r}")
        record = repo.load(doc_id)
        return service.graph_payload(record.graphs[level])

    @app.get("/api/collection/evolution")
    def evolution():
        return service.collection_views(repo)["evolution"]

    @app.get("/api/collection/communities")
    def communities():
        return service.collection_views(repo)["communities"]

    @app.post("/api/gazetteer")
    def add_entity(body: GazetteerUpdate):
        gaz = entities.load_gazetteer(config.gazetteer_path)
        alias_pool = [body.canonical, *body.aliases]
        existing = gaz.resolve_name(body.canonical)
        if existing is not None:
            entry = gaz.entry(existing)
            merged = list(entry.aliases) + [
                a for a in alias_pool if a not in entry.aliases
            ]
            updated = entities.GazetteerEntry(entry.entity_id, entry.canonical,
                                              tuple(merged))
            rows = [updated if e.entity_id == entry.entity_id else e for e in gaz.entries]
        else:
            base = "-".join(body.canonical.lower().split())[:32] or "entity"
            taken = {e.entity_id for e in gaz.entries}
            entity_id = base
            suffix = 2
            while entity_id in taken:
                entity_id = f"{base}-{suffix}"
                suffix += 1
            updated = entities.GazetteerEntry(entity_id, body.canonical, tuple(alias_pool))
            rows = list(gaz.entries) + [updated]
        entities.save_gazetteer(entities.Gazetteer(entries=rows), config.gazetteer_path)
        pipeline.reload_gazetteer()
        return {
            "id": updated.entity_id,
            "canonical": updated.canonical,
            "aliases": list(updated.aliases),
        }

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="frontend")

    return app
