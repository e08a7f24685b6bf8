"""Rule-based sentence segmentation.

Deterministic by design: terminals are . ! ?, guarded by a bundled
abbreviation list, single-initial detection, and a decimal-number guard.
Spans are half-open offsets into the paragraph text, excluding the
whitespace between sentences.
"""

import re
from functools import lru_cache
from importlib import resources

_TERMINAL_RUN = re.compile(r"[.!?]+[\"'”’)\]]*")
_WORD_BEFORE = re.compile(r"(\S+)$")


@lru_cache(maxsize=1)
def default_abbreviations() -> frozenset[str]:
    path = resources.files("scistory.data") / "abbreviations.txt"
    return load_abbreviations(path)


def load_abbreviations(path) -> frozenset[str]:
    entries = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip().lower()
            if line and not line.startswith("#"):
                entries.add(line)
    return frozenset(entries)


def _ends_with_abbreviation(prefix: str, abbreviations: frozenset[str]) -> bool:
    """True when the text before the boundary candidate ends in a guarded form."""
    tail = prefix.lower()
    for abbr in abbreviations:
        if tail.endswith(abbr):
            before = tail[: -len(abbr)]
            if not before or not (before[-1].isalnum() or before[-1] in ".'-"):
                return True
    word = _WORD_BEFORE.search(prefix)
    if word:
        w = word.group(1)
        # single capital initial, e.g. "Q." in an author name
        if len(w) == 2 and w[0].isupper() and w.endswith("."):
            return True
    return False


def segment_sentences(paragraph_text: str, abbreviations: frozenset[str] | None = None) -> list[tuple[int, int]]:
    """Return (char_start, char_end) spans of sentences within the paragraph."""
    abbreviations = abbreviations if abbreviations is not None else default_abbreviations()
    text = paragraph_text
    if not text.strip():
        return []

    boundaries = []
    for match in _TERMINAL_RUN.finditer(text):
        end = match.end()
        if end >= len(text):
            continue  # text end closes the final span anyway
        run = match.group()
        if "." in run and "!" not in run and "?" not in run and len(run.rstrip("\"'”’)]")) == 1:
            prefix = text[: match.start() + 1]
            if _ends_with_abbreviation(prefix, abbreviations):
                continue
            # decimal guard: 0.84 etc. (also not followed by whitespace)
            if text[match.start() + 1: match.start() + 2].isdigit():
                continue
        following = text[end:]
        stripped = following.lstrip()
        if len(stripped) == len(following):
            continue  # terminal not followed by whitespace: mid-token
        if stripped and not (stripped[0].isupper() or stripped[0].isdigit() or stripped[0] in "\"'“‘([•-–—"):
            continue
        boundaries.append(end)

    spans = []
    cursor = 0
    for boundary in boundaries + [len(text)]:
        chunk = text[cursor:boundary]
        lead = len(chunk) - len(chunk.lstrip())
        start = cursor + lead
        end = cursor + len(chunk.rstrip())
        if end > start:
            spans.append((start, end))
        cursor = boundary
    return spans
