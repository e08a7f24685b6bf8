import random
import string

import pytest

from scistory.errors import EmptyDocumentError, SchemaError
from scistory.textproc import (
    annotate,
    parse_document,
    segment_sentences,
    tokenize,
    validate_document,
)
from scistory.textproc.tagger import PTB_TAGS


# --- segment_sentences ----------------------------------------------------------

def test_two_sentences_with_exact_offsets():
    assert segment_sentences("A is good. B is better.") == [(0, 10), (11, 23)]


def test_abbreviation_does_not_split():
    spans = segment_sentences("See Fig. 3 for details.")
    assert spans == [(0, 23)]


def test_multiword_abbreviation():
    spans = segment_sentences("As shown by Smith et al. The result holds.")
    assert len(spans) == 1 or spans[0][1] > 24  # "et al." guarded


def test_empty_paragraph():
    assert segment_sentences("") == []
    assert segment_sentences("   \t ") == []


def test_decimal_numbers_not_split():
    spans = segment_sentences("Accuracy is 0.84 overall. The std is 0.02 here.")
    assert len(spans) == 2


def test_question_and_exclamation():
    spans = segment_sentences("Why does it work? It uses structure! Simple.")
    assert len(spans) == 3


def test_spans_ordered_and_non_overlapping():
    text = "First sentence here. Second one follows. Third ends it."
    spans = segment_sentences(text)
    assert spans == sorted(spans)
    for (a0, a1), (b0, b1) in zip(spans, spans[1:]):
        assert a1 <= b0
    # concatenation of spans plus the whitespace between them restores the text
    rebuilt = "".join(
        text[s:e] + text[e:spans[i + 1][0] if i + 1 < len(spans) else len(text)]
        for i, (s, e) in enumerate(spans)
    )
    assert rebuilt == text


# --- tokenize / annotate -----------------------------------------------------------

def test_annotate_spec_example():
    tokens = annotate("X outperforms Y")
    assert len(tokens) == 3
    assert tokens[1].surface == "outperforms"
    assert tokens[1].stem == "outperform"


def test_annotate_stem_fixpoint():
    tokens = annotate("run")
    assert tokens[0].stem == "run"
    assert tokens[0].pos in PTB_TAGS


def test_annotate_connected():
    tokens = annotate("connected")
    assert tokens[0].stem == "connect"


def test_tokens_cover_non_whitespace():
    text = "The model's F1 (0.84) beats 10,000 runs!"
    tokens = tokenize(text)
    rebuilt = "".join(t[0] for t in tokens)
    assert rebuilt == text.replace(" ", "")


def test_token_offsets_slice_back():
    text = "State-of-the-art systems, like ours, vary."
    for token in annotate(text):
        assert text[token.char_start:token.char_end] == token.surface


def test_tags_are_penn_treebank():
    text = "We trained 3 larger models quickly, and they won easily (see Table 2)."
    for token in annotate(text):
        assert token.pos in PTB_TAGS, token


def test_annotate_deterministic():
    text = "Our unfamiliar zorblex quantifier outperforms strange baselines."
    assert annotate(text) == annotate(text)


# --- parse_document -----------------------------------------------------------------

def test_plain_parse_with_headings():
    doc = parse_document(
        "Abstract\n\nWe propose X.\n\n1. Introduction\n\nX is new.",
        "plain",
        {"title": "T", "pub_date": "2020-01-01"},
    )
    assert [(s.kind, s.paragraph_start, s.paragraph_end) for s in doc.sections] == [
        ("abstract", 0, 1),
        ("introduction", 1, 2),
    ]
    assert [p.text for p in doc.paragraphs] == ["We propose X.", "X is new."]
    assert sum(len(p.sentences) for p in doc.paragraphs) == 2
    validate_document(doc)


def test_empty_document_error():
    with pytest.raises(EmptyDocumentError):
        parse_document("", "plain", {"title": "t"})


def test_structured_identity_pass_through():
    doc = parse_document(
        {"title": "t", "pub_date": "2020-01-01",
         "sections": [{"title": "S", "paragraphs": ["A."]}]},
        "structured",
    )
    assert len(doc.paragraphs) == 1
    assert len(doc.paragraphs[0].sentences) == 1
    validate_document(doc)


def test_structured_schema_error_names_path():
    with pytest.raises(SchemaError) as exc:
        parse_document(
            {"title": "t", "sections": [{"title": "S", "paragraphs": ["ok", 7]}]},
            "structured",
        )
    assert "sections[0].paragraphs[1]" in str(exc.value)


def test_unknown_format():
    with pytest.raises(SchemaError):
        parse_document("text", "pdf", {})


def test_body_before_heading_gets_implicit_section():
    doc = parse_document(
        "Opening remark without heading.\n\nConclusion\n\nDone here.",
        "plain", {"title": "t", "pub_date": ""},
    )
    assert doc.sections[0].kind == "other"
    assert doc.sections[1].kind == "conclusion"
    validate_document(doc)


def test_control_characters_stripped_and_whitespace_normalized():
    doc = parse_document(
        "Heading Words\n\nOne\x07 line   with\todd spacing.",
        "plain", {"title": "t", "pub_date": ""},
    )
    assert doc.paragraphs[0].text == "One line with odd spacing."


def test_offsets_in_unicode_scalars():
    doc = parse_document(
        "Résumé naïve café. Ünïcode wörks fine.",
        "plain", {"title": "t", "pub_date": ""},
    )
    validate_document(doc)
    sentence = doc.paragraphs[0].sentences[0]
    assert doc.paragraphs[0].text[sentence.char_start:sentence.char_end] == sentence.text


def test_round_trip_on_random_documents():
    rng = random.Random(404)
    for _ in range(20):
        paragraphs = []
        for _ in range(rng.randint(1, 5)):
            sentences = []
            for _ in range(rng.randint(1, 6)):
                words = [
                    "".join(rng.choice(string.ascii_lowercase)
                            for _ in range(rng.randint(2, 9)))
                    for _ in range(rng.randint(2, 12))
                ]
                words[0] = words[0].capitalize()
                sentences.append(" ".join(words) + rng.choice([".", "?", "!"]))
            paragraphs.append(" ".join(sentences))
        doc = parse_document("\n\n".join(paragraphs), "plain",
                             {"title": "r", "pub_date": ""})
        validate_document(doc)
        assert doc.raw_text == "\n\n".join(p.text for p in doc.paragraphs)
