"""Pipeline orchestration: parse, classify, recognize, aggregate, persist,
and the computations behind every API payload."""

from scistory import analytics, comparative, entities, storyline
from scistory.analytics import PARAGRAPH, SENTENCE
from scistory.config import PipelineConfig
from scistory.errors import (
    AnalysisError,
    ConfigurationError,
    EmptyCollectionError,
    ParameterError,
    ScistoryError,
)
from scistory.repository import AnalysisRecord, Repository, SentencePrediction
from scistory.textproc.parse import parse_document


class Pipeline:
    """Loads the model and gazetteer once; analyzes documents on demand."""

    def __init__(self, config: PipelineConfig | None = None):
        self.config = config or PipelineConfig()
        self.config.validate()
        try:
            self.model = comparative.load_model(self.config.model_path)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigurationError(f"cannot load model: {exc}") from exc
        try:
            self.gazetteer = entities.load_gazetteer(self.config.gazetteer_path)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigurationError(f"cannot load gazetteer: {exc}") from exc

    def reload_gazetteer(self) -> None:
        self.gazetteer = entities.load_gazetteer(self.config.gazetteer_path)

    def analyze_document(self, raw, format: str, meta: dict,
                         repo: Repository | None = None) -> AnalysisRecord:
        """Full pipeline run; persists the record when a repository is given."""
        def stage(name, fn, *args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except ScistoryError:
                raise
            except Exception as exc:  # pragma: no cover - defensive
                raise AnalysisError(name, exc) from exc

        document = stage("parse", parse_document, raw, format, meta)

        def classify():
            out = []
            for s in document.sentences():
                p = comparative.predict(self.model, list(s.tokens))
                out.append(SentencePrediction(s.sentence_index, p.label, p.confidence))
            return out

        predictions = stage("classify", classify)
        mentions = stage("recognize", entities.recognize, document, self.gazetteer)
        table = stage("consolidate", entities.consolidate, mentions, self.gazetteer)
        graphs = {
            level: stage("cooccurrence", analytics.cooccurrence, [mentions], level)
            for level in (SENTENCE, PARAGRAPH)
        }
        record = AnalysisRecord(
            doc_id=document.id if meta.get("id") else "",
            document=document,
            entity_table=table,
            mentions=mentions,
            predictions=predictions,
            graphs=graphs,
            config_fingerprint=self.config.fingerprint(),
        )
        if repo is not None:
            stage("persist", repo.save, record)
        return record


def storyline_layout(
    record: AnalysisRecord,
    granularity: str,
    entity_subset: list[str] | None = None,
    top_k: int = 30,
) -> storyline.StorylineLayout:
    """Scenes, communities, and slots for one stored document."""
    scenes = storyline.build_scenes(record, granularity)
    if entity_subset is not None:
        known = {row.entity_id for row in record.entity_table}
        unknown = sorted(set(entity_subset) - known)
        if unknown:
            raise ParameterError(f"unknown entities in subset: {unknown}")
        chosen = set(entity_subset)
    else:
        chosen = {row.entity_id
                  for row in analytics.frequency_ranking(record.entity_table, top_k)}
    for scene in scenes:
        scene.entity_ids = scene.entity_ids & chosen

    partition = _partition_for(record.graphs[SENTENCE], chosen)
    full = storyline.layout(scenes, record.entity_table, partition)
    full.section_separators = storyline.section_boundaries(
        record.document, scenes, full.config
    )
    return full


def _partition_for(graph: analytics.CoocGraph, chosen: set[str]) -> dict[str, int]:
    sub = analytics.CoocGraph(level=graph.level)
    for node, weight in graph.nodes.items():
        if node in chosen:
            sub.nodes[node] = weight
    for (a, b), w in graph.edges.items():
        if a in chosen and b in chosen:
            sub.edges[(a, b)] = w
    if not sub.nodes:
        return {}
    return analytics.louvain(sub)


def graph_payload(graph: analytics.CoocGraph) -> dict:
    """Graph JSON with per-node community assignment."""
    partition = (
        analytics.louvain(graph) if graph.nodes else {}
    )
    return {
        "level": graph.level,
        "nodes": [
            {"id": n, "weight": w, "community": partition.get(n, 0)}
            for n, w in sorted(graph.nodes.items())
        ],
        "edges": [
            {"a": a, "b": b, "weight": w}
            for (a, b), w in sorted(graph.edges.items())
        ],
    }


def document_text_payload(record: AnalysisRecord) -> dict:
    """Paragraph texts with sentence spans, predictions, and inline mentions."""
    confidence = {p.sentence_index: p for p in record.predictions}
    paragraphs = []
    for paragraph in record.document.paragraphs:
        sentence_rows = []
        for s in paragraph.sentences:
            p = confidence[s.sentence_index]
            sentence_rows.append(
                {
                    "index": s.sentence_index,
                    "start": s.char_start,
                    "end": s.char_end,
                    "label": p.label,
                    "confidence": p.confidence,
                }
            )
        mention_rows = [
            {
                "entity": m.entity_id,
                "canonical": record.canonical(m.entity_id),
                "sentence_index": m.sentence_index,
                "start": m.char_start,
                "end": m.char_end,
                "surface": m.surface,
            }
            for m in record.mentions
            if m.paragraph_index == paragraph.index
        ]
        paragraphs.append(
            {
                "index": paragraph.index,
                "text": paragraph.text,
                "sentences": sentence_rows,
                "mentions": mention_rows,
            }
        )
    sections = [
        {"title": s.title, "kind": s.kind, "range": [s.paragraph_start, s.paragraph_end]}
        for s in record.document.sections
    ]
    return {
        "doc_id": record.doc_id,
        "title": record.title,
        "pub_date": record.pub_date,
        "sections": sections,
        "paragraphs": paragraphs,
    }


def entity_ranking_payload(record: AnalysisRecord, top_k: int | None = None) -> list:
    return [
        {
            "entity": row.entity_id,
            "canonical": row.canonical,
            "count": row.mention_count,
            "first_sentence_index": row.first_sentence_index,
        }
        for row in analytics.frequency_ranking(record.entity_table, top_k)
    ]


def collection_views(repo: Repository) -> dict:
    """Evolution data and the merged-community graph for the whole store."""
    rows = repo.list()
    if not rows:
        raise EmptyCollectionError("no documents in the store")
    records = [repo.load(row.doc_id) for row in rows]
    evo = analytics.evolution(records)
    doc_colors = {row.doc_id: row.color_index for row in rows}
    merged = analytics.cooccurrence([r.mentions for r in records], SENTENCE)
    return {
        "evolution": {
            "nodes": [
                {
                    "entity": n.entity_id,
                    "canonical": n.canonical,
                    "origin_doc": n.origin_doc_id,
                    "origin_date": n.origin_date,
                    "origin_color_index": doc_colors.get(n.origin_doc_id, 0),
                    "x": n.x_rank,
                }
                for n in evo.nodes
            ],
            "arcs": [
                {"a": a, "b": b, "weight": w} for (a, b), w in sorted(evo.arcs.items())
            ],
        },
        "communities": graph_payload(merged),
    }
