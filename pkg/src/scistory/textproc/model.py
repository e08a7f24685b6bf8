"""Offset-tracked document hierarchy.

Offsets are counted in Unicode scalar values. Sentence offsets are relative
to their paragraph; token offsets are relative to their sentence. The raw
document text is the paragraph texts joined by blank lines, so every level
can be sliced back out of its parent exactly.
"""

from dataclasses import dataclass, field

SECTION_KINDS = (
    "abstract",
    "introduction",
    "related_work",
    "method",
    "experiment",
    "discussion",
    "conclusion",
    "references",
    "other",
)

PARAGRAPH_SEPARATOR = "\n\n"


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str
    stem: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class Sentence:
    paragraph_index: int
    sentence_index: int  # document-global
    char_start: int  # within paragraph
    char_end: int
    text: str
    tokens: tuple[Token, ...]


@dataclass
class Paragraph:
    index: int
    text: str
    sentences: list[Sentence] = field(default_factory=list)


@dataclass
class Section:
    title: str
    kind: str
    paragraph_start: int  # half-open range into the document paragraph list
    paragraph_end: int


@dataclass
class Document:
    id: str
    title: str
    pub_date: str
    sections: list[Section]
    paragraphs: list[Paragraph]

    @property
    def raw_text(self) -> str:
        return PARAGRAPH_SEPARATOR.join(p.text for p in self.paragraphs)

    def sentences(self):
        for paragraph in self.paragraphs:
            yield from paragraph.sentences

    def sentence(self, sentence_index: int) -> Sentence:
        for s in self.sentences():
            if s.sentence_index == sentence_index:
                return s
        raise IndexError(f"no sentence with index {sentence_index}")

    def section_of_paragraph(self, paragraph_index: int) -> Section | None:
        for section in self.sections:
            if section.paragraph_start <= paragraph_index < section.paragraph_end:
                return section
        return None


def validate_document(doc: Document) -> None:
    """Assert the offset invariants; raises AssertionError on violation."""
    # sections partition the paragraph list
    cursor = 0
    for section in doc.sections:
        assert section.kind in SECTION_KINDS, section.kind
        assert section.paragraph_start == cursor, (section, cursor)
        assert section.paragraph_end >= section.paragraph_start
        cursor = section.paragraph_end
    assert cursor == len(doc.paragraphs)

    expected_sentence_index = 0
    for pi, paragraph in enumerate(doc.paragraphs):
        assert paragraph.index == pi
        prev_end = 0
        for sentence in paragraph.sentences:
            assert sentence.paragraph_index == pi
            assert sentence.sentence_index == expected_sentence_index
            expected_sentence_index += 1
            assert sentence.char_start >= prev_end
            assert paragraph.text[sentence.char_start:sentence.char_end] == sentence.text
            prev_end = sentence.char_end
            t_prev = 0
            for token in sentence.tokens:
                assert token.char_start >= t_prev
                assert sentence.text[token.char_start:token.char_end] == token.surface
                t_prev = token.char_end
