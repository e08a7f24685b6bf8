"""Entity recognition against a gazetteer, plus the block/offset machinery
used when recognition is delegated to a remote linking service.

Matching is leftmost-longest over normalized token n-grams. Normalization
is lowercase + Porter stem per token, except short all-caps acronyms, which
must match case-sensitively so that stems do not collide (LSI vs "lsi").
"""

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Protocol

from scistory.errors import (
    BlockRangeError,
    ConsistencyError,
    CrossBoundaryError,
    OversizeSentenceError,
    ParameterError,
)
from scistory.textproc.model import Document, Sentence
from scistory.textproc.stemmer import stem
from scistory.textproc.tagger import tokenize

_ACRONYM = re.compile(r"[A-Z][A-Z0-9]{0,5}$")

BLOCK_SEPARATOR = "\n"
DEFAULT_BLOCK_CHARS = 10_000


@dataclass(frozen=True)
class GazetteerEntry:
    entity_id: str
    canonical: str
    aliases: tuple[str, ...]


@dataclass
class Gazetteer:
    entries: list[GazetteerEntry]

    def __post_init__(self):
        ids = [e.entity_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ParameterError("duplicate entity ids in gazetteer")
        self._by_id = {e.entity_id: e for e in self.entries}
        self._index: dict[tuple[str, ...], str] = {}
        self._max_len = 0
        for entry in self.entries:
            for alias in (*entry.aliases, entry.canonical):
                key = normalize_phrase(alias)
                if not key:
                    continue
                self._index.setdefault(key, entry.entity_id)
                self._max_len = max(self._max_len, len(key))

    def entry(self, entity_id: str) -> GazetteerEntry:
        if entity_id not in self._by_id:
            raise ConsistencyError(f"unknown entity id {entity_id!r}")
        return self._by_id[entity_id]

    def canonical(self, entity_id: str) -> str:
        return self.entry(entity_id).canonical

    def lookup(self, key: tuple[str, ...]) -> str | None:
        return self._index.get(key)

    def resolve_name(self, name: str) -> str | None:
        """Entity id whose alias closure contains the (normalized) name."""
        return self._index.get(normalize_phrase(name))


@dataclass(frozen=True)
class EntityMention:
    entity_id: str
    paragraph_index: int
    sentence_index: int
    char_start: int  # within sentence
    char_end: int
    surface: str


@dataclass(frozen=True)
class BlockSegment:
    sentence_index: int
    paragraph_index: int
    block_start: int
    block_end: int


@dataclass(frozen=True)
class Block:
    text: str
    segments: tuple[BlockSegment, ...]


@dataclass
class EntityRecord:
    entity_id: str
    canonical: str
    mention_count: int
    first_sentence_index: int
    mentions: list[EntityMention] = field(default_factory=list)


@dataclass
class EntityTable:
    rows: list[EntityRecord]  # ordered: count desc, first occurrence asc

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def get(self, entity_id: str) -> EntityRecord | None:
        for row in self.rows:
            if row.entity_id == entity_id:
                return row
        return None


def normalize_token(surface: str) -> str:
    if _ACRONYM.fullmatch(surface):
        return surface
    return stem(surface)


def normalize_phrase(phrase: str) -> tuple[str, ...]:
    return tuple(normalize_token(w) for w, _, _ in tokenize(phrase))


# --- gazetteer I/O -----------------------------------------------------------

def load_gazetteer(path) -> Gazetteer:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    entries = [
        GazetteerEntry(
            entity_id=item["id"],
            canonical=item["canonical"],
            aliases=tuple(item.get("aliases", ())),
        )
        for item in data
    ]
    return Gazetteer(entries=entries)


def save_gazetteer(gaz: Gazetteer, path) -> None:
    data = [
        {"id": e.entity_id, "canonical": e.canonical, "aliases": list(e.aliases)}
        for e in gaz.entries
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1, ensure_ascii=False)


@lru_cache(maxsize=1)
def default_gazetteer() -> Gazetteer:
    return load_gazetteer(resources.files("scistory.data") / "gazetteer.json")


# --- recognition ----------------------------------------------------------------

def recognize(doc: Document, gaz: Gazetteer) -> list[EntityMention]:
    """Leftmost-longest, non-overlapping alias matches over every sentence."""
    mentions = []
    for sentence in doc.sentences():
        keys = [normalize_token(t.surface) for t in sentence.tokens]
        i = 0
        while i < len(keys):
            hit = None
            limit = min(gaz._max_len, len(keys) - i)
            for n in range(limit, 0, -1):
                entity_id = gaz.lookup(tuple(keys[i:i + n]))
                if entity_id is not None:
                    hit = (entity_id, n)
                    break
            if hit is None:
                i += 1
                continue
            entity_id, n = hit
            start = sentence.tokens[i].char_start
            end = sentence.tokens[i + n - 1].char_end
            mentions.append(
                EntityMention(
                    entity_id=entity_id,
                    paragraph_index=sentence.paragraph_index,
                    sentence_index=sentence.sentence_index,
                    char_start=start,
                    char_end=end,
                    surface=sentence.text[start:end],
                )
            )
            i += n
    return mentions


def consolidate(mentions: list[EntityMention], gaz: Gazetteer) -> EntityTable:
    """Group mentions per entity; rank by count desc, first occurrence asc."""
    grouped: dict[str, list[EntityMention]] = {}
    for mention in mentions:
        gaz.entry(mention.entity_id)  # raises ConsistencyError when unknown
        grouped.setdefault(mention.entity_id, []).append(mention)
    rows = []
    for entity_id, group in grouped.items():
        group.sort(key=lambda m: (m.sentence_index, m.char_start))
        rows.append(
            EntityRecord(
                entity_id=entity_id,
                canonical=gaz.canonical(entity_id),
                mention_count=len(group),
                first_sentence_index=group[0].sentence_index,
                mentions=group,
            )
        )
    rows.sort(key=lambda r: (-r.mention_count, r.first_sentence_index, r.entity_id))
    return EntityTable(rows=rows)


# --- block batching for remote linkers ---------------------------------------------

def make_blocks(doc: Document, max_chars: int = DEFAULT_BLOCK_CHARS) -> list[Block]:
    """Greedy packing of sentences into blocks of at most max_chars characters.

    Sentences are joined with a newline that counts against the budget; no
    sentence is ever split across blocks.
    """
    sentences = list(doc.sentences())
    for sentence in sentences:
        if len(sentence.text) > max_chars:
            raise OversizeSentenceError(
                f"sentence {sentence.sentence_index} has {len(sentence.text)} chars,"
                f" exceeding the block budget of {max_chars}"
            )
    blocks: list[Block] = []
    parts: list[str] = []
    segments: list[BlockSegment] = []
    cursor = 0

    def flush():
        nonlocal parts, segments, cursor
        if segments:
            blocks.append(Block(text=BLOCK_SEPARATOR.join(parts), segments=tuple(segments)))
        parts, segments, cursor = [], [], 0

    for sentence in sentences:
        needed = len(sentence.text) + (1 if segments else 0)
        if segments and cursor + needed > max_chars:
            flush()
            needed = len(sentence.text)
        start = cursor + (1 if segments else 0)
        segments.append(
            BlockSegment(
                sentence_index=sentence.sentence_index,
                paragraph_index=sentence.paragraph_index,
                block_start=start,
                block_end=start + len(sentence.text),
            )
        )
        parts.append(sentence.text)
        cursor = start + len(sentence.text)
    flush()
    return blocks


def remap(block: Block, block_offset: int, length: int) -> dict:
    """Map a span inside a block back to sentence-relative offsets."""
    if length < 0 or block_offset < 0 or block_offset + length > len(block.text):
        raise BlockRangeError(
            f"span [{block_offset}, {block_offset + length}) outside block of"
            f" {len(block.text)} chars"
        )
    end = block_offset + length
    for segment in block.segments:
        if segment.block_start <= block_offset < segment.block_end:
            if end > segment.block_end:
                raise CrossBoundaryError(
                    f"span [{block_offset}, {end}) crosses the boundary of the"
                    f" segment ending at {segment.block_end}"
                )
            return {
                "paragraph_index": segment.paragraph_index,
                "sentence_index": segment.sentence_index,
                "char_start": block_offset - segment.block_start,
                "char_end": end - segment.block_start,
            }
    raise CrossBoundaryError(
        f"offset {block_offset} falls on a separator, not inside a sentence segment"
    )


class RemoteLinker(Protocol):
    """Minimal contract for an external entity-linking service."""

    def link(self, text: str) -> list[dict]:
        """Return [{"offset": int, "length": int, "canonical": str}, ...]."""
        ...


def recognize_remote(
    doc: Document,
    linker: RemoteLinker,
    gaz: Gazetteer,
    max_chars: int = DEFAULT_BLOCK_CHARS,
) -> list[EntityMention]:
    """Recognition via a remote linker, reusing the batching and remapping.

    Results whose canonical name resolves to no gazetteer entry, or that
    straddle a sentence boundary, are dropped.
    """
    mentions = []
    for block in make_blocks(doc, max_chars):
        for result in linker.link(block.text):
            entity_id = gaz.resolve_name(result["canonical"])
            if entity_id is None:
                continue
            try:
                where = remap(block, result["offset"], result["length"])
            except (CrossBoundaryError, BlockRangeError):
                continue
            mentions.append(
                EntityMention(
                    entity_id=entity_id,
                    paragraph_index=where["paragraph_index"],
                    sentence_index=where["sentence_index"],
                    char_start=where["char_start"],
                    char_end=where["char_end"],
                    surface=block.text[result["offset"]:result["offset"] + result["length"]],
                )
            )
    mentions.sort(key=lambda m: (m.sentence_index, m.char_start))
    return mentions
