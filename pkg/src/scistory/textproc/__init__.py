"""Raw text to offset-tracked sections, paragraphs, sentences, and tagged tokens."""

from scistory.textproc.model import (
    Document,
    Paragraph,
    Section,
    Sentence,
    Token,
    validate_document,
)
from scistory.textproc.parse import parse_document
from scistory.textproc.segment import segment_sentences
from scistory.textproc.stemmer import stem
from scistory.textproc.tagger import annotate, tokenize

__all__ = [
    "Document",
    "Section",
    "Paragraph",
    "Sentence",
    "Token",
    "annotate",
    "parse_document",
    "segment_sentences",
    "stem",
    "tokenize",
    "validate_document",
]
