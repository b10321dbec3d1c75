"""Deterministic text normalization, tokenization, n-grams and TF-IDF.

Every classifier and the HAC baseline build on these primitives, so the
normalization rules are versioned: models persist NORMALIZER_VERSION and
refuse to run against text normalized differently.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

# Bump whenever normalize()/tokenize() semantics change.
NORMALIZER_VERSION = "sg-norm-1"

_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_MENTION_RE = re.compile(r"@\w+")
_HASHTAG_RE = re.compile(r"#(\w+)")
_PUNCT_RE = re.compile(r"([^\w\s])")
_SENTINEL_RE = re.compile(r"(<url>|<user>)")
_WS_RE = re.compile(r"\s+")


def normalize(text: str) -> str:
    """Canonical form of a post's text.

    Lowercase, URLs -> ``<url>``, @-mentions -> ``<user>``, ``#`` stripped
    from hashtags, punctuation space-separated (sentinels kept intact),
    whitespace collapsed. Idempotent.
    """
    text = text.lower()
    text = _URL_RE.sub("<url>", text)
    text = _MENTION_RE.sub("<user>", text)
    text = _HASHTAG_RE.sub(r"\1", text)
    parts = []
    for chunk in _SENTINEL_RE.split(text):
        if chunk in ("<url>", "<user>"):
            parts.append(chunk)
        else:
            parts.append(_PUNCT_RE.sub(r" \1 ", chunk))
    text = "".join(parts)
    return _WS_RE.sub(" ", text).strip()


def tokenize(text: str) -> list[str]:
    """Split normalized text into word tokens.

    Whitespace-delimited; punctuation becomes its own token (normalize
    already guarantees this, so on normalized input this is a plain split).
    """
    parts = []
    for chunk in _SENTINEL_RE.split(text):
        if chunk in ("<url>", "<user>"):
            parts.append(chunk)
        else:
            parts.append(_PUNCT_RE.sub(r" \1 ", chunk))
    return "".join(parts).split()


@dataclass(frozen=True)
class TokenSet:
    """Set views of one post's normalized text.

    Char n-grams are taken over the normalized string with spaces retained;
    word n-grams over the token list.
    """

    word_unigrams: frozenset[str]
    word_bigrams: frozenset[tuple[str, str]]
    char_unigrams: frozenset[str]
    char_bigrams: frozenset[str]


def token_sets(text: str) -> TokenSet:
    """Build all four n-gram sets from raw text (normalizes internally)."""
    norm = normalize(text)
    tokens = tokenize(norm)
    return TokenSet(
        word_unigrams=frozenset(tokens),
        word_bigrams=frozenset(zip(tokens, tokens[1:])),
        char_unigrams=frozenset(norm),
        char_bigrams=frozenset(norm[i : i + 2] for i in range(len(norm) - 1)),
    )


@dataclass
class Vocabulary:
    """Document frequencies over a tokenized corpus."""

    df: dict[str, int]
    n_docs: int

    def idf(self, term: str) -> float:
        # smoothed so unseen terms are well-defined and ubiquitous terms
        # do not vanish: ln((1+N)/(1+df)) + 1
        return math.log((1 + self.n_docs) / (1 + self.df.get(term, 0))) + 1.0


def build_vocabulary(docs: list[list[str]]) -> Vocabulary:
    """Count document frequency (documents containing, not occurrences)."""
    if not docs:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    df: dict[str, int] = {}
    for doc in docs:
        for term in set(doc):
            df[term] = df.get(term, 0) + 1
    return Vocabulary(df=df, n_docs=len(docs))


@dataclass
class TfIdfVector:
    """Sparse TF-IDF weights with a cached Euclidean norm."""

    weights: dict[str, float]
    norm: float = field(default=0.0)

    def __post_init__(self):
        if not self.norm:
            self.norm = math.sqrt(sum(w * w for w in self.weights.values()))


def tfidf(doc: list[str], vocab: Vocabulary) -> TfIdfVector:
    """weight(t) = raw count of t in doc * smoothed idf(t)."""
    counts: dict[str, int] = {}
    for term in doc:
        counts[term] = counts.get(term, 0) + 1
    weights = {t: c * vocab.idf(t) for t, c in counts.items()}
    return TfIdfVector(weights=weights)


def cosine(a: TfIdfVector, b: TfIdfVector) -> float:
    """dot(a, b) / (|a| |b|); 0 when either vector is zero.

    Summed in sorted-term order so the result is exactly symmetric.
    """
    if a.norm == 0.0 or b.norm == 0.0:
        return 0.0
    dot = 0.0
    for term in sorted(a.weights.keys() & b.weights.keys()):
        dot += a.weights[term] * b.weights[term]
    return dot / (a.norm * b.norm)
