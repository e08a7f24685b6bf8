import json
from importlib import resources
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from scistory.analytics import PARAGRAPH, SENTENCE
from scistory.config import PipelineConfig
from scistory.errors import (
    ConfigurationError,
    EmptyCollectionError,
    EmptyDocumentError,
    ParameterError,
)
from scistory.repository import Repository
from scistory.service import (
    Pipeline,
    collection_views,
    storyline_layout,
)
from scistory.webapp import create_app


def sample_doc(name):
    path = Path(str(resources.files("scistory.data") / "sample_docs" / f"{name}.json"))
    return json.loads(path.read_text())


@pytest.fixture(scope="module")
def pipeline():
    return Pipeline(PipelineConfig())


@pytest.fixture()
def repo(tmp_path):
    return Repository(tmp_path / "store")


@pytest.fixture(scope="module")
def populated(tmp_path_factory, pipeline):
    root = tmp_path_factory.mktemp("collection")
    repo = Repository(root)
    for name in ("lsi_1999", "plsi_2001", "lda_2003"):
        pipeline.analyze_document(sample_doc(name), "structured", {}, repo)
    return repo


# --- pipeline ---------------------------------------------------------------------

def test_analyze_document_produces_consistent_record(pipeline, repo):
    record = pipeline.analyze_document(sample_doc("plsi_2001"), "structured", {}, repo)
    record.validate()
    assert record.doc_id
    assert len(record.entity_table) >= 2
    assert any(p.confidence > 0.5 for p in record.predictions)
    assert set(record.graphs) == {SENTENCE, PARAGRAPH}


def test_analyze_empty_document_errors(pipeline, repo):
    with pytest.raises(EmptyDocumentError):
        pipeline.analyze_document("   \n\n ", "plain", {"title": "x"}, repo)


def test_missing_model_is_configuration_error(tmp_path):
    config = PipelineConfig(model_path=tmp_path / "missing.json")
    with pytest.raises(ConfigurationError):
        Pipeline(config)


def test_analyze_deterministic_modulo_timestamp(pipeline, tmp_path):
    from scistory.repository import record_to_json

    r1 = pipeline.analyze_document(sample_doc("lsi_1999"), "structured", {})
    r2 = pipeline.analyze_document(sample_doc("lsi_1999"), "structured", {})
    a, b = record_to_json(r1), record_to_json(r2)
    a.pop("created_at"), b.pop("created_at")
    a["document"].pop("id"), b["document"].pop("id")
    a.pop("doc_id"), b.pop("doc_id")
    assert a == b


def test_storyline_layout_granularities(pipeline, repo):
    pipeline.analyze_document(sample_doc("plsi_2001"), "structured", {}, repo)
    record = repo.load(repo.list()[0].doc_id)
    para = storyline_layout(record, PARAGRAPH)
    sent = storyline_layout(record, SENTENCE)
    assert len(sent.scenes) >= len(para.scenes)


def test_storyline_subset_filters_lifelines(pipeline, repo):
    pipeline.analyze_document(sample_doc("plsi_2001"), "structured", {}, repo)
    record = repo.load(repo.list()[0].doc_id)
    full = storyline_layout(record, PARAGRAPH, entity_subset=["plsi"])
    assert [l.entity_id for l in full.lifelines] == ["plsi"]
    with pytest.raises(ParameterError):
        storyline_layout(record, PARAGRAPH, entity_subset=["nonexistent-entity"])


def test_collection_views_empty_store(repo):
    with pytest.raises(EmptyCollectionError):
        collection_views(repo)


def test_collection_views_single_document_one_color(pipeline, repo):
    pipeline.analyze_document(sample_doc("lsi_1999"), "structured", {}, repo)
    views = collection_views(repo)
    colors = {n["origin_color_index"] for n in views["evolution"]["nodes"]}
    assert colors == {0}


def test_collection_views(populated):
    views = collection_views(populated)
    dates = [n["origin_date"] for n in views["evolution"]["nodes"]]
    assert dates == sorted(dates)
    assert views["communities"]["nodes"]
    node_ids = {n["id"] for n in views["communities"]["nodes"]}
    for arc in views["evolution"]["arcs"]:
        assert arc["a"] in node_ids and arc["b"] in node_ids


# --- HTTP API ----------------------------------------------------------------------

@pytest.fixture()
def client(tmp_path):
    app = create_app(tmp_path / "store")
    return TestClient(app)


@pytest.fixture(scope="module")
def loaded_client(tmp_path_factory):
    app = create_app(tmp_path_factory.mktemp("api-store"))
    client = TestClient(app)
    for name in ("lsi_1999", "plsi_2001", "lda_2003"):
        response = client.post("/api/documents", json={"structured": sample_doc(name)})
        assert response.status_code == 200, response.text
    return client


def load_schema(name):
    return json.loads(
        Path(str(resources.files("scistory.schemas") / f"{name}.schema.json")).read_text()
    )


def validate(payload, schema_name):
    import jsonschema

    jsonschema.validate(payload, load_schema(schema_name))


def test_upload_plain_text(client):
    response = client.post(
        "/api/documents",
        json={"text": "Abstract\n\nLSI helps retrieval. pLSI is better than LSI.",
              "title": "T", "pub_date": "2020-01-01"},
    )
    assert response.status_code == 200
    doc_id = response.json()["doc_id"]
    index = client.get("/api/documents").json()
    assert [row["doc_id"] for row in index] == [doc_id]
    validate(index, "collection_index")


def test_upload_requires_content(client):
    assert client.post("/api/documents", json={"title": "T"}).status_code == 400


def test_upload_size_cap(client):
    big = "word " * 250_000
    response = client.post("/api/documents", json={"text": big})
    assert response.status_code == 413


def test_upload_bad_structured(client):
    response = client.post("/api/documents", json={"structured": {"sections": "nope"}})
    assert response.status_code == 400
    assert "sections" in response.json()["detail"]


def test_storyline_endpoint_and_schema(loaded_client):
    index = loaded_client.get("/api/documents").json()
    doc_id = index[0]["doc_id"]
    for granularity in (PARAGRAPH, SENTENCE):
        payload = loaded_client.get(
            f"/api/documents/{doc_id}/storyline", params={"granularity": granularity}
        ).json()
        validate(payload, "storyline")
        assert payload["granularity"] == granularity


def test_storyline_entity_filter(loaded_client):
    index = loaded_client.get("/api/documents").json()
    doc_id = next(r["doc_id"] for r in index if "probabilistic" in r["title"].lower())
    payload = loaded_client.get(
        f"/api/documents/{doc_id}/storyline", params={"entities": "plsi,lsi"}
    ).json()
    assert {l["entity"] for l in payload["lifelines"]} == {"plsi", "lsi"}
    bad = loaded_client.get(
        f"/api/documents/{doc_id}/storyline", params={"entities": "ghost"}
    )
    assert bad.status_code == 400


def test_unknown_document_404(loaded_client):
    assert loaded_client.get("/api/documents/ghost/storyline").status_code == 404


def test_text_endpoint(loaded_client):
    doc_id = loaded_client.get("/api/documents").json()[0]["doc_id"]
    payload = loaded_client.get(f"/api/documents/{doc_id}/text").json()
    validate(payload, "document_text")
    paragraph = payload["paragraphs"][0]
    for mention in paragraph["mentions"]:
        start, end = mention["start"], mention["end"]
        sentence = next(
            s for s in paragraph["sentences"] if s["index"] == mention["sentence_index"]
        )
        text = paragraph["text"][sentence["start"]:sentence["end"]]
        assert text[start:end] == mention["surface"]


def test_entities_endpoint(loaded_client):
    doc_id = loaded_client.get("/api/documents").json()[0]["doc_id"]
    payload = loaded_client.get(f"/api/documents/{doc_id}/entities").json()
    validate(payload, "entity_ranking")
    counts = [row["count"] for row in payload]
    assert counts == sorted(counts, reverse=True)
    top1 = loaded_client.get(
        f"/api/documents/{doc_id}/entities", params={"top_k": 1}
    ).json()
    assert len(top1) == 1


def test_cooccurrence_endpoint(loaded_client):
    doc_id = loaded_client.get("/api/documents").json()[0]["doc_id"]
    for level in (SENTENCE, PARAGRAPH):
        payload = loaded_client.get(
            f"/api/documents/{doc_id}/cooccurrence", params={"level": level}
        ).json()
        validate(payload, "graph")
    assert loaded_client.get(
        f"/api/documents/{doc_id}/cooccurrence", params={"level": "book"}
    ).status_code == 400


def test_collection_endpoints(loaded_client):
    evolution = loaded_client.get("/api/collection/evolution").json()
    validate(evolution, "evolution")
    dates = [n["origin_date"] for n in evolution["nodes"]]
    assert dates == sorted(dates)
    communities = loaded_client.get("/api/collection/communities").json()
    validate(communities, "graph")


def test_collection_empty_store_conflict(client):
    assert client.get("/api/collection/evolution").status_code == 409


def test_gazetteer_update_roundtrip(tmp_path):
    app = create_app(tmp_path / "store")
    client = TestClient(app)
    response = client.post(
        "/api/gazetteer",
        json={"canonical": "neural topic model", "aliases": ["NTM"]},
    )
    assert response.status_code == 200
    entry = response.json()
    assert entry["canonical"] == "neural topic model"
    upload = client.post(
        "/api/documents",
        json={"text": "Intro\n\nThe NTM improves topics. A neural topic model is flexible.",
              "title": "N", "pub_date": "2024-01-01"},
    )
    doc_id = upload.json()["doc_id"]
    ranking = client.get(f"/api/documents/{doc_id}/entities").json()
    assert any(row["entity"] == entry["id"] and row["count"] == 2 for row in ranking)


# --- CLI ---------------------------------------------------------------------------

def run_cli(args):
    from scistory.cli import main

    return main(args)


def test_cli_train_and_analyze_and_export(tmp_path, capsys):
    corpus = resources.files("scistory.data") / "labeled_corpus.tsv"
    model_out = tmp_path / "model.json"
    assert run_cli(["train", "--corpus", str(corpus), "--out", str(model_out),
                    "--folds", "3"]) == 0
    out = capsys.readouterr().out
    assert "accuracy" in out and model_out.exists()

    doc = tmp_path / "doc.json"
    doc.write_text(json.dumps(sample_doc("lsi_1999")))
    store = tmp_path / "store"
    assert run_cli(["analyze", str(doc), "--format", "structured",
                    "--data", str(store), "--model", str(model_out)]) == 0
    doc_id = capsys.readouterr().out.strip()

    assert run_cli(["export", doc_id, "--what", "storyline", "--data", str(store)]) == 0
    payload = json.loads(capsys.readouterr().out)
    validate(payload, "storyline")

    assert run_cli(["export", doc_id, "--what", "graph", "--data", str(store)]) == 0
    validate(json.loads(capsys.readouterr().out), "graph")


def test_cli_exit_codes(tmp_path, capsys):
    assert run_cli(["export", "ghost", "--data", str(tmp_path / "empty")]) == 3
    capsys.readouterr()
    missing = tmp_path / "nope.txt"
    assert run_cli(["analyze", str(missing), "--data", str(tmp_path / "s")]) == 4
    capsys.readouterr()
    with pytest.raises(SystemExit) as exc:
        run_cli(["unknown-command"])
    assert exc.value.code == 2
