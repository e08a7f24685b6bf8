"""Tokenizer and lexicon + suffix-rule POS tagger emitting Penn Treebank tags.

The tagger is deliberately small: a bundled lexicon resolves closed-class
and common academic words, capitalized unknowns become NNP, and suffix
rules cover regular morphology. Unknown residue defaults to NN. Swap in a
different tagger by passing ``tagger=`` to :func:`annotate`.
"""

import re
from functools import lru_cache
from importlib import resources

from scistory.textproc.stemmer import stem as porter_stem
from scistory.textproc.model import Token

PTB_TAGS = frozenset(
    """CC CD DT EX FW IN JJ JJR JJS LS MD NN NNS NNP NNPS PDT POS PRP PRP$
    RB RBR RBS RP SYM TO UH VB VBD VBG VBN VBP VBZ WDT WP WP$ WRB
    . , : ( ) `` '' $ #""".split()
)

_TOKEN_RE = re.compile(
    r"\d+(?:[.,]\d+)*"               # numbers incl. decimals, versions, 10,000
    r"|[A-Za-z][A-Za-z0-9]*(?:['-][A-Za-z0-9]+)*"  # words, hyphenated words
    r"|\S"                           # anything else, one char at a time
)

_PUNCT_TAGS = {
    ".": ".", "!": ".", "?": ".",
    ",": ",",
    ";": ":", ":": ":", "-": ":", "–": ":", "—": ":",
    "(": "(", "[": "(", "{": "(",
    ")": ")", "]": ")", "}": ")",
    '"': "''", "'": "''", "`": "``", "“": "``", "”": "''", "‘": "``", "’": "''",
    "$": "$", "#": "#",
}

_NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ism", "ance", "ence", "ship", "hood")
_ADJ_SUFFIXES = ("ous", "ive", "ic", "able", "ible", "ful", "less", "al", "ary")


@lru_cache(maxsize=1)
def default_lexicon() -> dict[str, str]:
    path = resources.files("scistory.data") / "pos_lexicon.tsv"
    return load_lexicon(path)


def load_lexicon(path) -> dict[str, str]:
    lexicon: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            word, tag = line.split("\t")
            lexicon.setdefault(word, tag)
    return lexicon


def tokenize(text: str) -> list[tuple[str, int, int]]:
    """Split into maximal word/number/punctuation units with offsets."""
    return [(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def _adjective_base(lexicon: dict[str, str], base: str) -> bool:
    candidates = [base, base + "e"]
    if len(base) >= 2 and base[-1] == base[-2]:
        candidates.append(base[:-1])  # bigg -> big
    if base.endswith("i"):
        candidates.append(base[:-1] + "y")  # happi -> happy
    return any(lexicon.get(c) == "JJ" for c in candidates)


def _tag_word(word: str, lexicon: dict[str, str]) -> str:
    if word in _PUNCT_TAGS:
        return _PUNCT_TAGS[word]
    if re.fullmatch(r"\d+(?:[.,]\d+)*", word):
        return "CD"
    lower = word.lower()
    if lower in lexicon:
        return lexicon[lower]
    if word[0].isupper():
        return "NNP"
    if not word.isalpha() and "-" not in word and "'" not in word:
        return "SYM"
    if lower.endswith("s") and not lower.endswith(("ss", "us", "is")) and len(lower) > 2:
        base = lower[:-1]
        base_tag = lexicon.get(base)
        if base_tag == "VB":
            return "VBZ"
        if base_tag in ("NN", "JJ"):
            return "NNS"
        if base.endswith("ie"):  # studies -> study
            if lexicon.get(base[:-2] + "y") == "VB":
                return "VBZ"
        if base.endswith("e") and lexicon.get(base[:-1]) == "VB":  # matches -> match
            return "VBZ"
        return "NNS"
    if lower.endswith("ing") and len(lower) > 4:
        return "VBG"
    if lower.endswith("ed") and len(lower) > 3:
        return "VBN"
    if lower.endswith("ly") and len(lower) > 3:
        return "RB"
    if lower.endswith("est") and len(lower) > 4 and _adjective_base(lexicon, lower[:-3]):
        return "JJS"
    if lower.endswith("er") and len(lower) > 3 and _adjective_base(lexicon, lower[:-2]):
        return "JJR"
    for suffix in _NOUN_SUFFIXES:
        if lower.endswith(suffix):
            return "NN"
    for suffix in _ADJ_SUFFIXES:
        if lower.endswith(suffix):
            return "JJ"
    return "NN"


def annotate(sentence_text: str, lexicon: dict[str, str] | None = None, tagger=None) -> list[Token]:
    """Tokenize, POS tag, and stem one sentence."""
    lexicon = lexicon if lexicon is not None else default_lexicon()
    pieces = tokenize(sentence_text)
    if tagger is not None:
        tags = tagger([p[0] for p in pieces])
    else:
        tags = [_tag_word(word, lexicon) for word, _, _ in pieces]
    return [
        Token(surface=word, pos=tag, stem=porter_stem(word), char_start=start, char_end=end)
        for (word, start, end), tag in zip(pieces, tags)
    ]
