"""File-backed store: one JSON record per analyzed document plus index.json.

Writes go through a store-level lock and a write-temp-then-rename step, so
a crash never leaves a half-written index. Reads are lock-free.
"""

import json
import os
import re
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from filelock import FileLock

from scistory.analytics import CoocGraph
from scistory.entities import EntityMention, EntityRecord, EntityTable
from scistory.errors import ConsistencyError, MigrationError, NotFoundError, StoreError
from scistory.textproc.model import Document, Paragraph, Section, Sentence, Token

RECORD_SCHEMA_VERSION = 1

DATA_DIR_ENV = "SCISTORY_DATA"


@dataclass(frozen=True)
class SentencePrediction:
    sentence_index: int
    label: str
    confidence: float


@dataclass
class AnalysisRecord:
    doc_id: str
    document: Document
    entity_table: EntityTable
    mentions: list[EntityMention]
    predictions: list[SentencePrediction]
    graphs: dict[str, CoocGraph]  # keyed by level
    config_fingerprint: str
    created_at: str = ""

    @property
    def title(self) -> str:
        return self.document.title

    @property
    def pub_date(self) -> str:
        return self.document.pub_date

    def canonical(self, entity_id: str) -> str:
        row = self.entity_table.get(entity_id)
        return row.canonical if row else entity_id

    def validate(self) -> None:
        sentence_ids = {s.sentence_index for s in self.document.sentences()}
        for m in self.mentions:
            if m.sentence_index not in sentence_ids:
                raise ConsistencyError(f"mention points at missing sentence {m.sentence_index}")
        if len(self.predictions) != len(sentence_ids):
            raise ConsistencyError(
                f"{len(self.predictions)} predictions for {len(sentence_ids)} sentences"
            )


@dataclass(frozen=True)
class IndexRow:
    doc_id: str
    title: str
    pub_date: str
    color_index: int
    record_path: str


# --- JSON mapping -----------------------------------------------------------------

def _document_to_json(doc: Document) -> dict:
    return {
        "id": doc.id,
        "title": doc.title,
        "pub_date": doc.pub_date,
        "sections": [
            {"title": s.title, "kind": s.kind, "range": [s.paragraph_start, s.paragraph_end]}
            for s in doc.sections
        ],
        "paragraphs": [
            {
                "index": p.index,
                "text": p.text,
                "sentences": [
                    {
                        "paragraph_index": s.paragraph_index,
                        "sentence_index": s.sentence_index,
                        "start": s.char_start,
                        "end": s.char_end,
                        "text": s.text,
                        "tokens": [
                            [t.surface, t.pos, t.stem, t.char_start, t.char_end]
                            for t in s.tokens
                        ],
                    }
                    for s in p.sentences
                ],
            }
            for p in doc.paragraphs
        ],
    }


def _document_from_json(data: dict) -> Document:
    paragraphs = []
    for p in data["paragraphs"]:
        sentences = [
            Sentence(
                paragraph_index=s["paragraph_index"],
                sentence_index=s["sentence_index"],
                char_start=s["start"],
                char_end=s["end"],
                text=s["text"],
                tokens=tuple(Token(*t) for t in s["tokens"]),
            )
            for s in p["sentences"]
        ]
        paragraphs.append(Paragraph(index=p["index"], text=p["text"], sentences=sentences))
    sections = [
        Section(title=s["title"], kind=s["kind"],
                paragraph_start=s["range"][0], paragraph_end=s["range"][1])
        for s in data["sections"]
    ]
    return Document(id=data["id"], title=data["title"], pub_date=data["pub_date"],
                    sections=sections, paragraphs=paragraphs)


def _graph_to_json(graph: CoocGraph) -> dict:
    return {
        "level": graph.level,
        "nodes": [{"id": n, "weight": w} for n, w in sorted(graph.nodes.items())],
        "edges": [
            {"a": a, "b": b, "weight": w} for (a, b), w in sorted(graph.edges.items())
        ],
    }


def _graph_from_json(data: dict) -> CoocGraph:
    graph = CoocGraph(level=data["level"])
    for node in data["nodes"]:
        graph.nodes[node["id"]] = node["weight"]
    for edge in data["edges"]:
        graph.edges[(edge["a"], edge["b"])] = edge["weight"]
    return graph


def record_to_json(record: AnalysisRecord) -> dict:
    return {
        "schema_version": RECORD_SCHEMA_VERSION,
        "doc_id": record.doc_id,
        "created_at": record.created_at,
        "config_fingerprint": record.config_fingerprint,
        "document": _document_to_json(record.document),
        "entity_table": [
            {
                "entity_id": r.entity_id,
                "canonical": r.canonical,
                "mention_count": r.mention_count,
                "first_sentence_index": r.first_sentence_index,
            }
            for r in record.entity_table
        ],
        "mentions": [
            [m.entity_id, m.paragraph_index, m.sentence_index, m.char_start, m.char_end, m.surface]
            for m in record.mentions
        ],
        "predictions": [
            [p.sentence_index, p.label, p.confidence] for p in record.predictions
        ],
        "graphs": {level: _graph_to_json(g) for level, g in sorted(record.graphs.items())},
    }


def record_from_json(data: dict) -> AnalysisRecord:
    version = data.get("schema_version")
    if version != RECORD_SCHEMA_VERSION:
        raise MigrationError(
            f"record schema version {version!r} is not supported (expected {RECORD_SCHEMA_VERSION})"
        )
    mentions = [EntityMention(*m) for m in data["mentions"]]
    by_entity: dict[str, list[EntityMention]] = {}
    for m in mentions:
        by_entity.setdefault(m.entity_id, []).append(m)
    table = EntityTable(
        rows=[
            EntityRecord(
                entity_id=r["entity_id"],
                canonical=r["canonical"],
                mention_count=r["mention_count"],
                first_sentence_index=r["first_sentence_index"],
                mentions=by_entity.get(r["entity_id"], []),
            )
            for r in data["entity_table"]
        ]
    )
    return AnalysisRecord(
        doc_id=data["doc_id"],
        document=_document_from_json(data["document"]),
        entity_table=table,
        mentions=mentions,
        predictions=[SentencePrediction(*p) for p in data["predictions"]],
        graphs={level: _graph_from_json(g) for level, g in data["graphs"].items()},
        config_fingerprint=data["config_fingerprint"],
        created_at=data["created_at"],
    )


# --- the store -----------------------------------------------------------------------

def _slugify(text: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")
    return slug[:48] or "document"


class Repository:
    def __init__(self, data_dir):
        self.root = Path(data_dir)
        self.docs_dir = self.root / "docs"
        self.index_path = self.root / "index.json"
        self._lock = FileLock(str(self.root / ".store.lock"))
        try:
            self.docs_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StoreError(f"cannot create store at {self.root}: {exc}") from exc

    # index helpers ----------------------------------------------------------

    def _read_index(self) -> list[IndexRow]:
        if not self.index_path.exists():
            return []
        try:
            with open(self.index_path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise StoreError(f"cannot read index: {exc}") from exc
        return [IndexRow(**row) for row in data]

    def _write_index(self, rows: list[IndexRow]) -> None:
        payload = [row.__dict__ for row in rows]
        self._atomic_write(self.index_path, json.dumps(payload, indent=1))

    def _atomic_write(self, path: Path, text: str) -> None:
        try:
            fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=".tmp-")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except OSError as exc:
            raise StoreError(f"write failed for {path}: {exc}") from exc

    # public API ---------------------------------------------------------------

    def save(self, record: AnalysisRecord) -> str:
        record.validate()
        with self._lock:
            rows = self._read_index()
            taken = {row.doc_id for row in rows}
            base = record.doc_id or _slugify(f"{record.title}-{record.pub_date}")
            doc_id = base
            suffix = 2
            while doc_id in taken:
                doc_id = f"{base}-{suffix}"
                suffix += 1
            record.doc_id = doc_id
            record.document.id = doc_id
            if not record.created_at:
                record.created_at = datetime.now(timezone.utc).isoformat()
            path = self.docs_dir / f"{doc_id}.json"
            self._atomic_write(path, json.dumps(record_to_json(record), ensure_ascii=False))
            rows.append(
                IndexRow(
                    doc_id=doc_id,
                    title=record.title,
                    pub_date=record.pub_date,
                    color_index=len(rows),
                    record_path=str(path.relative_to(self.root)),
                )
            )
            self._write_index(rows)
        return doc_id

    def load(self, doc_id: str) -> AnalysisRecord:
        rows = {row.doc_id: row for row in self._read_index()}
        if doc_id not in rows:
            raise NotFoundError(f"no document {doc_id!r} in the store")
        path = self.root / rows[doc_id].record_path
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except FileNotFoundError as exc:
            raise NotFoundError(f"record file missing for {doc_id!r}") from exc
        except json.JSONDecodeError as exc:
            raise StoreError(f"record for {doc_id!r} is corrupted: {exc}") from exc
        except OSError as exc:
            raise StoreError(f"cannot read record for {doc_id!r}: {exc}") from exc
        return record_from_json(data)

    def list(self) -> list[IndexRow]:
        rows = self._read_index()
        rows.sort(key=lambda r: (r.pub_date, r.doc_id))
        return rows

    def delete(self, doc_id: str) -> None:
        with self._lock:
            rows = self._read_index()
            keep = [row for row in rows if row.doc_id != doc_id]
            if len(keep) == len(rows):
                raise NotFoundError(f"no document {doc_id!r} in the store")
            path = self.root / next(r.record_path for r in rows if r.doc_id == doc_id)
            self._write_index(keep)
            try:
                path.unlink(missing_ok=True)
            except OSError as exc:
                raise StoreError(f"cannot delete record file: {exc}") from exc


def default_data_dir() -> Path:
    return Path(os.environ.get(DATA_DIR_ENV, Path.home() / ".scistory"))
