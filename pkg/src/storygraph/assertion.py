"""Assertion detector: keep only posts that state something.

Featurizes a post with indicator n-grams plus three surface cues and
classifies it with the linear model; posts judged non-assertions are
discarded from the pipeline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import linear_model, textkit
from .corpus import Corpus
from .linear_model import FeatureVector, LinearModel
from .textkit import NORMALIZER_VERSION

ASSERTION_MODEL_FORMAT = "storygraph-assertion/1"

# surface cues appended after the n-gram dictionary, in this order
SURFACE_FEATURES = ("has_question_mark", "has_exclamation", "has_url")


class AssertionError_(Exception):
    """Named with a trailing underscore to avoid shadowing the builtin."""


@dataclass
class AssertionFeaturizer:
    """Frozen n-gram dictionary: word uni/bigrams and char bigrams -> id."""

    feature_ids: dict[str, int]
    normalizer_version: str = NORMALIZER_VERSION

    @property
    def dim(self) -> int:
        return len(self.feature_ids) + len(SURFACE_FEATURES)


def _ngram_keys(text: str) -> list[str]:
    ts = textkit.token_sets(text)
    keys = [f"w1:{t}" for t in sorted(ts.word_unigrams)]
    keys += [f"w2:{a} {b}" for a, b in sorted(ts.word_bigrams)]
    keys += [f"c2:{g}" for g in sorted(ts.char_bigrams)]
    return keys


def fit_featurizer(texts: list[str]) -> AssertionFeaturizer:
    """Assign dense contiguous ids in first-seen order. Deterministic."""
    if not texts:
        raise AssertionError_("cannot fit a featurizer on no texts")
    ids: dict[str, int] = {}
    for text in texts:
        for key in _ngram_keys(text):
            if key not in ids:
                ids[key] = len(ids)
    return AssertionFeaturizer(feature_ids=ids)


def featurize(featurizer: AssertionFeaturizer, text: str) -> FeatureVector:
    """Binary presence features; n-grams unseen at fit time map to nothing."""
    vec: FeatureVector = {}
    for key in _ngram_keys(text):
        fid = featurizer.feature_ids.get(key)
        if fid is not None:
            vec[fid] = 1.0
    norm = textkit.normalize(text)
    base = len(featurizer.feature_ids)
    if "?" in norm:
        vec[base] = 1.0
    if "!" in norm:
        vec[base + 1] = 1.0
    if "<url>" in norm:
        vec[base + 2] = 1.0
    return vec


def load_labeled_texts(path: str | Path) -> list[tuple[str, int]]:
    """JSONL {text, label in {assertion, other}} -> (text, +1/-1) pairs."""
    pairs = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        label = 1 if record["label"] == "assertion" else -1
        pairs.append((record["text"], label))
    return pairs


def train_assertion_model(
    labeled: list[tuple[str, int]],
    lam: float = 1e-4,
    epochs: int = 20,
    seed: int = 0,
) -> tuple[LinearModel, AssertionFeaturizer]:
    featurizer = fit_featurizer([text for text, _ in labeled])
    data = [(featurize(featurizer, text), y) for text, y in labeled]
    model = linear_model.train(data, lam=lam, epochs=epochs, seed=seed)
    return model, featurizer


def filter_assertions(
    model: LinearModel, featurizer: AssertionFeaturizer, corpus: Corpus
) -> tuple[Corpus, int]:
    """Keep posts classified +1, in order; return (kept, dropped_count)."""
    if model.normalizer_version != featurizer.normalizer_version:
        raise AssertionError_(
            "model/featurizer normalizer mismatch: "
            f"{model.normalizer_version!r} vs {featurizer.normalizer_version!r}"
        )
    if featurizer.normalizer_version != NORMALIZER_VERSION:
        raise AssertionError_(
            f"model built for normalizer {featurizer.normalizer_version!r}, "
            f"library provides {NORMALIZER_VERSION!r}"
        )
    kept = [
        p
        for p in corpus.posts
        if linear_model.predict(model, featurize(featurizer, p.text)) == 1
    ]
    dropped = len(corpus.posts) - len(kept)
    return Corpus(posts=kept, source_uri=corpus.source_uri), dropped


# --- persistence -----------------------------------------------------------

def save_assertion_model(
    model: LinearModel, featurizer: AssertionFeaturizer, path: str | Path
):
    doc = {
        "format": ASSERTION_MODEL_FORMAT,
        "featurizer": {
            "normalizer_version": featurizer.normalizer_version,
            "feature_ids": featurizer.feature_ids,
        },
        "linear": linear_model.model_to_dict(model),
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_assertion_model(path: str | Path) -> tuple[LinearModel, AssertionFeaturizer]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != ASSERTION_MODEL_FORMAT:
        raise AssertionError_(f"not an assertion model file: {path}")
    featurizer = AssertionFeaturizer(
        feature_ids={k: int(v) for k, v in doc["featurizer"]["feature_ids"].items()},
        normalizer_version=doc["featurizer"]["normalizer_version"],
    )
    return linear_model.model_from_dict(doc["linear"]), featurizer
