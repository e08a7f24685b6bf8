"""Comparative-sentence classification.

Pipeline: keyword matching over stems/POS classes, a POS window of radius 3
around each match as a candidate sequence, PrefixSpan mining of class
sequential features (support >= 0.1, class confidence >= 0.6), and a
Bernoulli naive Bayes classifier over the binary feature vector. Sentences
without any keyword match bypass the classifier entirely.
"""

import json
import math
import random
import statistics
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from scistory.errors import ParameterError, TrainingDataError
from scistory.seqmine import Pattern, contains, prefixspan
from scistory.textproc.model import Token
from scistory.textproc.stemmer import stem
from scistory.textproc.tagger import annotate

COMPARATIVE = "comparative"
NON_COMPARATIVE = "non_comparative"
CLASSES = (COMPARATIVE, NON_COMPARATIVE)

POS_CLASSES = ("JJR", "JJS", "RBR", "RBS")
CATEGORIES = ("adjectival_adverbial", "single_verb", "phrase", "other")
REQUIRED_FORMS = ("fail", "gain", "over", "contrast")


@dataclass(frozen=True)
class KeywordEntry:
    category: str
    form: tuple[str, ...]  # stems of the phrase, or ("POS:JJR",)

    @property
    def is_pos_class(self) -> bool:
        return len(self.form) == 1 and self.form[0].startswith("POS:")


@dataclass(frozen=True)
class KeywordLexicon:
    entries: tuple[KeywordEntry, ...]

    def __post_init__(self):
        seen = set()
        for entry in self.entries:
            if entry.category not in CATEGORIES:
                raise ParameterError(f"unknown keyword category {entry.category!r}")
            if entry.form in seen:
                raise ParameterError(f"duplicate keyword form {entry.form!r}")
            seen.add(entry.form)
        stems = {e.form[0] for e in self.entries if len(e.form) == 1}
        missing = [f for f in REQUIRED_FORMS if f not in stems]
        if missing:
            raise ParameterError(f"lexicon is missing required keywords: {missing}")


@dataclass(frozen=True)
class KeywordMatch:
    entry_index: int
    token_start: int
    token_end: int  # half-open


@dataclass(frozen=True)
class CandidateSequence:
    items: Pattern
    keyword_position: int
    sentence_index: int
    entry_index: int
    label: str | None = None


@dataclass(frozen=True)
class ClassSequentialFeature:
    pattern: Pattern
    support_ratio: float
    confidence: float
    majority_class: str


@dataclass
class BayesModel:
    features: list[ClassSequentialFeature]
    log_priors: dict[str, float]
    log_likelihoods: list[dict[str, float]]  # per feature: log P(f=1 | class)
    radius: int
    lexicon: KeywordLexicon


@dataclass(frozen=True)
class Prediction:
    label: str
    confidence: float  # posterior of the comparative class


# --- lexicon loading -------------------------------------------------------

def _stem_form(form: str) -> tuple[str, ...]:
    if form.startswith("POS:"):
        tag = form[4:]
        if tag not in POS_CLASSES:
            raise ParameterError(f"unsupported POS class {form!r}")
        return (form,)
    return tuple(stem(w) for w in form.split())


def load_lexicon(path) -> KeywordLexicon:
    entries = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            category, form = line.split("\t")
            entries.append(KeywordEntry(category=category, form=_stem_form(form)))
    return KeywordLexicon(entries=tuple(entries))


@lru_cache(maxsize=1)
def default_lexicon() -> KeywordLexicon:
    return load_lexicon(resources.files("scistory.data") / "comparative_lexicon.tsv")


# --- matching and candidate extraction --------------------------------------

def match_keywords(tokens: list[Token], lexicon: KeywordLexicon) -> list[KeywordMatch]:
    """Non-overlapping matches; phrases beat single words, longest first."""
    phrase_entries = sorted(
        (i for i, e in enumerate(lexicon.entries) if not e.is_pos_class and len(e.form) > 1),
        key=lambda i: -len(lexicon.entries[i].form),
    )
    stem_entries = {
        e.form[0]: i
        for i, e in enumerate(lexicon.entries)
        if not e.is_pos_class and len(e.form) == 1
    }
    pos_entries = {e.form[0][4:]: i for i, e in enumerate(lexicon.entries) if e.is_pos_class}

    matches = []
    pos = 0
    stems = [t.stem for t in tokens]
    while pos < len(tokens):
        matched = None
        for ei in phrase_entries:
            form = lexicon.entries[ei].form
            if tuple(stems[pos:pos + len(form)]) == form:
                matched = KeywordMatch(ei, pos, pos + len(form))
                break
        if matched is None and stems[pos] in stem_entries:
            matched = KeywordMatch(stem_entries[stems[pos]], pos, pos + 1)
        if matched is None and tokens[pos].pos in pos_entries:
            matched = KeywordMatch(pos_entries[tokens[pos].pos], pos, pos + 1)
        if matched is None:
            pos += 1
        else:
            matches.append(matched)
            pos = matched.token_end
    return matches


def extract_candidate(
    tokens: list[Token],
    match: KeywordMatch,
    radius: int = 3,
    sentence_index: int = -1,
    label: str | None = None,
) -> CandidateSequence:
    """POS window around the keyword; the keyword itemset carries stem + tag.

    Multi-token (phrase) matches contribute one itemset holding the joined
    stem and the POS tag of the phrase's last token.
    """
    before = tokens[max(0, match.token_start - radius):match.token_start]
    after = tokens[match.token_end:match.token_end + radius]
    keyword_stem = " ".join(t.stem for t in tokens[match.token_start:match.token_end])
    keyword_pos = tokens[match.token_end - 1].pos
    items = (
        [(t.pos,) for t in before]
        + [tuple(sorted({keyword_stem, keyword_pos}))]
        + [(t.pos,) for t in after]
    )
    return CandidateSequence(
        items=tuple(items),
        keyword_position=len(before),
        sentence_index=sentence_index,
        entry_index=match.entry_index,
        label=label,
    )


def sentence_candidates(
    tokens: list[Token],
    lexicon: KeywordLexicon,
    radius: int = 3,
    sentence_index: int = -1,
    label: str | None = None,
) -> list[CandidateSequence]:
    return [
        extract_candidate(tokens, m, radius, sentence_index, label)
        for m in match_keywords(tokens, lexicon)
    ]


# --- feature mining ----------------------------------------------------------

def anchor_symbols(lexicon: KeywordLexicon) -> frozenset[str]:
    """Symbols that tie a pattern to a keyword: stems and POS-class tags."""
    symbols = set()
    for entry in lexicon.entries:
        if entry.is_pos_class:
            symbols.add(entry.form[0][4:])
        else:
            symbols.add(" ".join(entry.form))
    return frozenset(symbols)


def mine_features(
    labeled: list[CandidateSequence],
    min_sup: float = 0.1,
    min_conf: float = 0.6,
    max_len: int | None = None,
    anchors: frozenset[str] | None = None,
) -> list[ClassSequentialFeature]:
    """Frequent candidate-subsequences kept by support and class confidence.

    When ``anchors`` is given, a pattern must mention a keyword stem or a
    comparative POS-class tag somewhere; pure POS-shape subsequences are
    discarded. They carry no keyword context and, being heavily correlated,
    only destabilize the downstream Bayes model.
    """
    if not labeled:
        raise TrainingDataError("no candidate sequences to mine")
    if any(c.label is None for c in labeled):
        raise TrainingDataError("all candidate sequences must carry a label")
    frequent = prefixspan([c.items for c in labeled], min_sup, max_len=max_len)
    features = []
    for fp in frequent:
        if anchors is not None and not any(
            symbol in anchors for itemset in fp.pattern for symbol in itemset
        ):
            continue
        class_counts = {c: 0 for c in CLASSES}
        for candidate in labeled:
            if contains(candidate.items, fp.pattern):
                class_counts[candidate.label] += 1
        total = sum(class_counts.values())
        best = max(CLASSES, key=lambda c: class_counts[c])
        confidence = class_counts[best] / total
        if confidence >= min_conf:
            features.append(
                ClassSequentialFeature(
                    pattern=fp.pattern,
                    support_ratio=fp.support_ratio,
                    confidence=confidence,
                    majority_class=best,
                )
            )
    return features


def featurize(
    candidates_of_sentence: list[CandidateSequence],
    features: list[ClassSequentialFeature],
) -> list[int]:
    bits = []
    for feature in features:
        hit = any(contains(c.items, feature.pattern) for c in candidates_of_sentence)
        bits.append(1 if hit else 0)
    return bits


# --- training / prediction ----------------------------------------------------

@dataclass
class LabeledSentence:
    label: str
    text: str
    tokens: list[Token] = field(default_factory=list)


def load_corpus(path) -> list[LabeledSentence]:
    """TSV corpus: comp|noncomp<TAB>sentence text."""
    label_map = {"comp": COMPARATIVE, "noncomp": NON_COMPARATIVE}
    sentences = []
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            try:
                label, text = line.split("\t", 1)
            except ValueError:
                raise TrainingDataError(f"line {ln}: expected label<TAB>text") from None
            if label not in label_map:
                raise TrainingDataError(f"line {ln}: unknown label {label!r}")
            sentences.append(LabeledSentence(label=label_map[label], text=text))
    return sentences


def _annotated(corpus: list[LabeledSentence]) -> list[LabeledSentence]:
    for sentence in corpus:
        if not sentence.tokens:
            sentence.tokens = annotate(sentence.text)
    return corpus


def train(
    corpus: list[LabeledSentence],
    lexicon: KeywordLexicon | None = None,
    radius: int = 3,
    min_sup: float = 0.1,
    min_conf: float = 0.6,
) -> BayesModel:
    """Mine class sequential features and fit Bernoulli NB with Laplace alpha=1.

    The classifier only ever sees keyword-bearing sentences (keyword-free
    ones are gated to non-comparative before it runs), so the priors and
    likelihoods are fitted on the keyword-bearing subset of the corpus.
    """
    lexicon = lexicon or default_lexicon()
    if not corpus:
        raise TrainingDataError("empty corpus")
    if any(sum(1 for s in corpus if s.label == c) == 0 for c in CLASSES):
        raise TrainingDataError("corpus must contain both classes")

    _annotated(corpus)
    per_sentence = [
        sentence_candidates(s.tokens, lexicon, radius, i, s.label)
        for i, s in enumerate(corpus)
    ]
    all_candidates = [c for group in per_sentence for c in group]
    if not all_candidates:
        raise TrainingDataError("no sentence in the corpus matches any keyword")
    features = mine_features(
        all_candidates,
        min_sup,
        min_conf,
        max_len=2 * radius + 1,
        anchors=anchor_symbols(lexicon),
    )

    gated = [
        (sentence, candidates)
        for sentence, candidates in zip(corpus, per_sentence)
        if candidates
    ]
    by_class = {c: sum(1 for s, _ in gated if s.label == c) for c in CLASSES}
    n = len(gated)
    log_priors = {c: math.log((by_class[c] + 1) / (n + len(CLASSES))) for c in CLASSES}
    ones = [{c: 0 for c in CLASSES} for _ in features]
    for sentence, candidates in gated:
        for j, bit in enumerate(featurize(candidates, features)):
            if bit:
                ones[j][sentence.label] += 1
    log_likelihoods = [
        {c: math.log((ones[j][c] + 1) / (by_class[c] + 2)) for c in CLASSES}
        for j in range(len(features))
    ]
    return BayesModel(
        features=features,
        log_priors=log_priors,
        log_likelihoods=log_likelihoods,
        radius=radius,
        lexicon=lexicon,
    )


def predict(model: BayesModel, tokens: list[Token]) -> Prediction:
    """Keyword gate, then naive Bayes posterior over the feature bits."""
    candidates = sentence_candidates(tokens, model.lexicon, model.radius)
    if not candidates:
        return Prediction(label=NON_COMPARATIVE, confidence=0.0)
    bits = featurize(candidates, model.features)
    scores = {}
    for cls in CLASSES:
        total = model.log_priors[cls]
        for j, bit in enumerate(bits):
            log_p1 = model.log_likelihoods[j][cls]
            total += log_p1 if bit else math.log1p(-math.exp(log_p1))
        scores[cls] = total
    top = max(scores.values())
    norm = sum(math.exp(v - top) for v in scores.values())
    posterior_comp = math.exp(scores[COMPARATIVE] - top) / norm
    label = COMPARATIVE if posterior_comp > 0.5 else NON_COMPARATIVE
    return Prediction(label=label, confidence=posterior_comp)


def predict_text(model: BayesModel, text: str) -> Prediction:
    return predict(model, annotate(text))


# --- cross validation ----------------------------------------------------------

def stratified_folds(labels: list[str], folds: int, seed: int = 0) -> list[list[int]]:
    """Seeded shuffle within each class, then round-robin into folds."""
    if folds < 2:
        raise ParameterError("folds must be >= 2")
    if len(labels) < folds:
        raise ParameterError("corpus smaller than fold count")
    rng = random.Random(seed)
    assignment: list[list[int]] = [[] for _ in range(folds)]
    cursor = 0
    for cls in sorted(set(labels)):
        indices = [i for i, lab in enumerate(labels) if lab == cls]
        rng.shuffle(indices)
        for idx in indices:
            assignment[cursor % folds].append(idx)
            cursor += 1
    return [sorted(fold) for fold in assignment]


def cross_validate(
    corpus: list[LabeledSentence],
    folds: int = 5,
    seed: int = 0,
    lexicon: KeywordLexicon | None = None,
    radius: int = 3,
    min_sup: float = 0.1,
    min_conf: float = 0.6,
) -> dict:
    """Stratified k-fold accuracy; features re-mined on each training split."""
    lexicon = lexicon or default_lexicon()
    _annotated(corpus)
    fold_indices = stratified_folds([s.label for s in corpus], folds, seed)
    per_fold = []
    for held_out in fold_indices:
        held = set(held_out)
        training = [s for i, s in enumerate(corpus) if i not in held]
        model = train(training, lexicon, radius, min_sup, min_conf)
        correct = sum(
            1 for i in held_out if predict(model, corpus[i].tokens).label == corpus[i].label
        )
        per_fold.append(correct / len(held_out))
    return {
        "mean_accuracy": statistics.fmean(per_fold),
        "std": statistics.stdev(per_fold) if len(per_fold) > 1 else 0.0,
        "per_fold": per_fold,
    }


# --- serialization ---------------------------------------------------------------

MODEL_SCHEMA_VERSION = 1


def model_to_json(model: BayesModel) -> dict:
    return {
        "schema_version": MODEL_SCHEMA_VERSION,
        "radius": model.radius,
        "lexicon": [
            {"category": e.category, "form": list(e.form)} for e in model.lexicon.entries
        ],
        "features": [
            {
                "pattern": [list(itemset) for itemset in f.pattern],
                "support_ratio": f.support_ratio,
                "confidence": f.confidence,
                "majority_class": f.majority_class,
            }
            for f in model.features
        ],
        "log_priors": dict(model.log_priors),
        "log_likelihoods": [dict(d) for d in model.log_likelihoods],
    }


def model_from_json(data: dict) -> BayesModel:
    if data.get("schema_version") != MODEL_SCHEMA_VERSION:
        raise ParameterError(f"unsupported model schema version {data.get('schema_version')!r}")
    lexicon = KeywordLexicon(
        entries=tuple(
            KeywordEntry(category=e["category"], form=tuple(e["form"]))
            for e in data["lexicon"]
        )
    )
    features = [
        ClassSequentialFeature(
            pattern=tuple(tuple(itemset) for itemset in f["pattern"]),
            support_ratio=f["support_ratio"],
            confidence=f["confidence"],
            majority_class=f["majority_class"],
        )
        for f in data["features"]
    ]
    return BayesModel(
        features=features,
        log_priors={c: float(v) for c, v in data["log_priors"].items()},
        log_likelihoods=[{c: float(v) for c, v in d.items()} for d in data["log_likelihoods"]],
        radius=data["radius"],
        lexicon=lexicon,
    )


def save_model(model: BayesModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(model), fh, indent=1)


def load_model(path) -> BayesModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_json(json.load(fh))
