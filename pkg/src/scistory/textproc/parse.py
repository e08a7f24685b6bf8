"""Document assembly: plain text or structured JSON into the offset hierarchy."""

import re
import unicodedata
import uuid

from scistory.errors import EmptyDocumentError, SchemaError
from scistory.textproc.model import Document, Paragraph, Section, Sentence
from scistory.textproc.segment import segment_sentences
from scistory.textproc.tagger import annotate

# canonical section titles -> kind; matched case-insensitively after numbering
_KIND_BY_TITLE = {
    "abstract": "abstract",
    "introduction": "introduction",
    "related work": "related_work",
    "previous work": "related_work",
    "prior work": "related_work",
    "background": "related_work",
    "method": "method",
    "methods": "method",
    "methodology": "method",
    "approach": "method",
    "system design": "method",
    "proposed method": "method",
    "model": "method",
    "experiment": "experiment",
    "experiments": "experiment",
    "experimental results": "experiment",
    "evaluation": "experiment",
    "results": "experiment",
    "case study": "experiment",
    "discussion": "discussion",
    "analysis": "discussion",
    "conclusion": "conclusion",
    "conclusions": "conclusion",
    "summary": "conclusion",
    "future work": "conclusion",
    "concluding remarks": "conclusion",
    "references": "references",
    "bibliography": "references",
}

_NUMBERING = re.compile(r"^(?:[0-9]+[.)]?|[IVXLC]+\.)(?:[0-9.]*)\s+")


def section_kind(title: str) -> str:
    bare = _NUMBERING.sub("", title.strip()).strip().lower().rstrip(".")
    return _KIND_BY_TITLE.get(bare, "other")


def _clean_line(line: str) -> str:
    kept = []
    for ch in line:
        if unicodedata.category(ch) == "Cc" and ch not in "\t":
            continue
        kept.append(ch)
    return "".join(kept)


def _normalize_paragraph(lines: list[str]) -> str:
    return re.sub(r"\s+", " ", " ".join(lines)).strip()


def _looks_like_heading(block_lines: list[str]) -> bool:
    if len(block_lines) != 1:
        return False
    line = block_lines[0].strip()
    if not line or line.endswith((".", "!", "?", ":", ";", ",")):
        return False
    bare = _NUMBERING.sub("", line).strip()
    if bare.lower().rstrip(".") in _KIND_BY_TITLE:
        return True
    tokens = bare.split()
    if not tokens or len(tokens) >= 8:
        return False
    if not tokens[0][0].isupper():
        return False
    # Title Case: every long word capitalized
    return all(t[0].isupper() or len(t) <= 3 for t in tokens if t[0].isalpha())


def _annotate_paragraphs(
    texts: list[str], lexicon=None, abbreviations=None
) -> list[Paragraph]:
    paragraphs = []
    sentence_counter = 0
    for index, text in enumerate(texts):
        sentences = []
        for start, end in segment_sentences(text, abbreviations):
            chunk = text[start:end]
            sentences.append(
                Sentence(
                    paragraph_index=index,
                    sentence_index=sentence_counter,
                    char_start=start,
                    char_end=end,
                    text=chunk,
                    tokens=tuple(annotate(chunk, lexicon)),
                )
            )
            sentence_counter += 1
        paragraphs.append(Paragraph(index=index, text=text, sentences=sentences))
    return paragraphs


def _parse_plain(raw: str) -> tuple[list[tuple[str, str]], list[str]]:
    """Split into (section title, kind) markers and paragraph texts."""
    lines = [_clean_line(l) for l in raw.replace("\r\n", "\n").replace("\r", "\n").split("\n")]
    blocks: list[list[str]] = []
    current: list[str] = []
    for line in lines:
        if line.strip():
            current.append(line)
        elif current:
            blocks.append(current)
            current = []
    if current:
        blocks.append(current)

    sections: list[tuple[str, str]] = []  # (title, kind)
    section_sizes: list[int] = []
    paragraphs: list[str] = []
    for block in blocks:
        if _looks_like_heading(block):
            title = _NUMBERING.sub("", block[0].strip()).strip()
            sections.append((title, section_kind(title)))
            section_sizes.append(0)
            continue
        if not sections:
            sections.append(("", "other"))
            section_sizes.append(0)
        paragraphs.append(_normalize_paragraph(block))
        section_sizes[-1] += 1

    markers = []
    start = 0
    for (title, kind), size in zip(sections, section_sizes):
        markers.append((title, kind, start, start + size))
        start += size
    return markers, paragraphs


def _require(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise SchemaError(f"{path}: {message}")


def _parse_structured(data) -> tuple[list, list[str]]:
    _require(isinstance(data, dict), "$", "expected an object")
    sections_in = data.get("sections")
    _require(isinstance(sections_in, list), "sections", "expected a list")
    markers = []
    paragraphs: list[str] = []
    for si, section in enumerate(sections_in):
        path = f"sections[{si}]"
        _require(isinstance(section, dict), path, "expected an object")
        title = section.get("title", "")
        _require(isinstance(title, str), f"{path}.title", "expected a string")
        paras = section.get("paragraphs")
        _require(isinstance(paras, list), f"{path}.paragraphs", "expected a list")
        start = len(paragraphs)
        for pi, text in enumerate(paras):
            _require(isinstance(text, str), f"{path}.paragraphs[{pi}]", "expected a string")
            normalized = _normalize_paragraph([_clean_line(text)])
            if normalized:
                paragraphs.append(normalized)
        markers.append((title, section_kind(title), start, len(paragraphs)))
    return markers, paragraphs


def parse_document(
    raw,
    format: str = "plain",
    meta: dict | None = None,
    lexicon=None,
    abbreviations=None,
) -> Document:
    """Build a Document from plain text or the structured JSON shape.

    ``meta`` supplies {"title", "pub_date"}; a structured payload may carry
    both fields itself, with ``meta`` taking precedence.
    """
    meta = dict(meta or {})
    if format == "plain":
        if not isinstance(raw, str):
            raise SchemaError("$: plain format expects a string")
        if not raw.strip():
            raise EmptyDocumentError("document text is empty")
        markers, texts = _parse_plain(raw)
    elif format == "structured":
        markers, texts = _parse_structured(raw)
        if not texts:
            raise EmptyDocumentError("document has no paragraph text")
        # meta overrides the payload's own fields only when non-empty
        if not meta.get("title"):
            meta["title"] = raw.get("title", "")
        if not meta.get("pub_date"):
            meta["pub_date"] = raw.get("pub_date", "")
    else:
        raise SchemaError(f"format: unknown format {format!r}")

    if not texts:
        raise EmptyDocumentError("document has no paragraph text")

    paragraphs = _annotate_paragraphs(texts, lexicon, abbreviations)
    sections = [
        Section(title=title, kind=kind, paragraph_start=start, paragraph_end=end)
        for title, kind, start, end in markers
    ]
    title = meta.get("title") or ""
    doc_id = meta.get("id") or uuid.uuid4().hex[:12]
    return Document(
        id=doc_id,
        title=title,
        pub_date=meta.get("pub_date") or "",
        sections=sections,
        paragraphs=paragraphs,
    )
