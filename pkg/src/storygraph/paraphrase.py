"""Pairwise paraphrase judgement from n-gram overlap features.

Six set-size features per pair (unions/intersections of word unigrams and
char bigrams, plus the two word-set sizes) feed the linear classifier.
Feature extraction is a handful of set operations per pair, which is what
makes all-pairs graph construction tractable.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels, linear_model, textkit
from .linear_model import LinearModel
from .textkit import NORMALIZER_VERSION, TokenSet

PARAPHRASE_MODEL_FORMAT = "storygraph-paraphrase/1"


@dataclass(frozen=True)
class PairFeatures:
    """Overlap sizes for one post pair.

    Unions and intersections are symmetric by definition; (len1, len2)
    follow argument order. Classification reads ``symmetric_tuple`` which
    reorders the lengths as (min, max) so judgements cannot depend on
    which post came first.
    """

    u_w1: int  # |word unigrams of a ∪ b|
    u_c2: int  # |char bigrams of a ∪ b|
    i_w1: int  # |word unigrams of a ∩ b|
    i_c2: int  # |char bigrams of a ∩ b|
    len1: int  # |word unigrams of a|
    len2: int  # |word unigrams of b|

    def as_tuple(self) -> tuple[int, int, int, int, int, int]:
        return (self.u_w1, self.u_c2, self.i_w1, self.i_c2, self.len1, self.len2)

    def symmetric_tuple(self) -> tuple[int, int, int, int, int, int]:
        lo, hi = sorted((self.len1, self.len2))
        return (self.u_w1, self.u_c2, self.i_w1, self.i_c2, lo, hi)


def pair_features(a: TokenSet, b: TokenSet) -> PairFeatures:
    i_w = len(a.word_unigrams & b.word_unigrams)
    i_c = len(a.char_bigrams & b.char_bigrams)
    la, lb = len(a.word_unigrams), len(b.word_unigrams)
    return PairFeatures(
        u_w1=la + lb - i_w,
        u_c2=len(a.char_bigrams) + len(b.char_bigrams) - i_c,
        i_w1=i_w,
        i_c2=i_c,
        len1=la,
        len2=lb,
    )


@dataclass
class ParaphraseModel:
    """Linear model plus the z-score statistics of its six features."""

    linear: LinearModel
    means: tuple[float, ...]
    stds: tuple[float, ...]

    @property
    def normalizer_version(self) -> str:
        return self.linear.normalizer_version


def _standardize(feats: PairFeatures, model: ParaphraseModel) -> dict[int, float]:
    raw = feats.symmetric_tuple()
    return {
        k: (raw[k] - model.means[k]) / model.stds[k] for k in range(6)
    }


def margin(model: ParaphraseModel, a: TokenSet, b: TokenSet) -> float:
    return linear_model.decision(model.linear, _standardize(pair_features(a, b), model))


def is_paraphrase(model: ParaphraseModel, text_a: str, text_b: str) -> tuple[bool, float]:
    """Binary judgement plus the margin; symmetric in the two texts."""
    m = margin(model, textkit.token_sets(text_a), textkit.token_sets(text_b))
    return bool(m > 0.0), float(m)


def train_paraphrase(
    pairs: list[tuple[str, str, bool]],
    lam: float = 1e-4,
    epochs: int = 20,
    seed: int = 0,
) -> ParaphraseModel:
    """Train on (text1, text2, is_paraphrase) triples.

    Features are z-scored with training-set statistics; a zero-variance
    feature keeps std 1 so it contributes a constant.
    """
    rows = []
    labels = []
    for t1, t2, label in pairs:
        feats = pair_features(textkit.token_sets(t1), textkit.token_sets(t2))
        rows.append(feats.symmetric_tuple())
        labels.append(1 if label else -1)
    raw = np.asarray(rows, dtype=np.float64)
    means = raw.mean(axis=0)
    stds = raw.std(axis=0)
    stds[stds == 0.0] = 1.0
    data = [
        ({k: (row[k] - means[k]) / stds[k] for k in range(6)}, y)
        for row, y in zip(rows, labels)
    ]
    model = linear_model.train(data, lam=lam, epochs=epochs, seed=seed)
    return ParaphraseModel(
        linear=model,
        means=tuple(float(v) for v in means),
        stds=tuple(float(v) for v in stds),
    )


# --- Twitter Paraphrase Corpus loader --------------------------------------

_TUPLE_LABEL_RE = re.compile(r"^\((\d+)\s*,\s*\d+\)$")


def _parse_tpc_label(raw: str) -> bool | None:
    """Annotator votes -> label: >=3 of 5 yes, exactly 2 dropped (None)."""
    raw = raw.strip()
    m = _TUPLE_LABEL_RE.match(raw)
    if m:
        yes = int(m.group(1))
    elif raw.isdigit():
        yes = int(raw)
    elif raw.lower() in ("true", "yes", "paraphrase"):
        return True
    elif raw.lower() in ("false", "no", "non-paraphrase"):
        return False
    else:
        raise ValueError(f"unparseable label {raw!r}")
    if yes >= 3:
        return True
    if yes == 2:
        return None
    return False


def load_tpc(path: str | Path) -> tuple[list[tuple[str, str, bool]], int]:
    """Load tab-separated paraphrase pairs; returns (pairs, warning_count).

    Accepts the 7-column SemEval layout (topic id, topic, sent1, sent2,
    label, tags...) or a minimal 3-column (sent1, sent2, label) file.
    Debatable pairs (2 of 5 votes) are dropped silently; malformed lines
    count a warning.
    """
    pairs: list[tuple[str, str, bool]] = []
    warnings = 0
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        cols = line.split("\t")
        try:
            if len(cols) >= 5:
                t1, t2, raw = cols[2], cols[3], cols[4]
            elif len(cols) == 3:
                t1, t2, raw = cols
            else:
                raise ValueError("wrong column count")
            label = _parse_tpc_label(raw)
            if not t1.strip() or not t2.strip():
                raise ValueError("empty sentence")
        except ValueError:
            warnings += 1
            continue
        if label is None:
            continue
        pairs.append((t1, t2, label))
    return pairs, warnings


# --- batch scorer over an indexed corpus ------------------------------------

class PairScorer:
    """Packs a corpus's token sets into id arrays once, then scores pairs
    through the active kernel backend.

    Margins are bit-identical to ``is_paraphrase`` on the same texts.
    """

    def __init__(self, model: ParaphraseModel, texts: list[str]):
        self.model = model
        self.n = len(texts)
        word_intern: dict[str, int] = {}
        char_intern: dict[str, int] = {}
        w_rows = []
        c_rows = []
        for text in texts:
            ts = textkit.token_sets(text)
            w_rows.append(self._intern(ts.word_unigrams, word_intern))
            c_rows.append(self._intern(ts.char_bigrams, char_intern))
        self.w_ids, self.w_off = self._pack(w_rows)
        self.c_ids, self.c_off = self._pack(c_rows)
        self.mean = np.asarray(model.means, dtype=np.float64)
        self.std = np.asarray(model.stds, dtype=np.float64)
        weights = np.zeros(6, dtype=np.float64)
        weights[: model.linear.dim] = model.linear.weights[:6]
        self.weights = weights
        self.bias = float(model.linear.bias)

    @staticmethod
    def _intern(tokens, table: dict[str, int]) -> np.ndarray:
        ids = []
        for tok in tokens:
            fid = table.get(tok)
            if fid is None:
                fid = len(table)
                table[tok] = fid
            ids.append(fid)
        return np.sort(np.asarray(ids, dtype=np.int32))

    @staticmethod
    def _pack(rows: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        offsets = np.zeros(len(rows) + 1, dtype=np.int64)
        for k, row in enumerate(rows):
            offsets[k + 1] = offsets[k] + len(row)
        ids = (
            np.concatenate(rows)
            if rows
            else np.empty(0, dtype=np.int32)
        ).astype(np.int32, copy=False)
        return ids, offsets

    def score(self, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
        return kernels.score_pairs(
            self.w_ids, self.w_off, self.c_ids, self.c_off,
            self.mean, self.std, self.weights, self.bias,
            np.asarray(ii, dtype=np.int64), np.asarray(jj, dtype=np.int64),
        )

    def accept_all(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return kernels.accept_all_pairs(
            self.w_ids, self.w_off, self.c_ids, self.c_off,
            self.mean, self.std, self.weights, self.bias,
        )


# --- persistence -----------------------------------------------------------

def save_paraphrase_model(model: ParaphraseModel, path: str | Path):
    doc = {
        "format": PARAPHRASE_MODEL_FORMAT,
        "means": list(model.means),
        "stds": list(model.stds),
        "linear": linear_model.model_to_dict(model.linear),
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_paraphrase_model(path: str | Path) -> ParaphraseModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != PARAPHRASE_MODEL_FORMAT:
        raise linear_model.TrainingError(f"not a paraphrase model file: {path}")
    return ParaphraseModel(
        linear=linear_model.model_from_dict(doc["linear"]),
        means=tuple(float(v) for v in doc["means"]),
        stds=tuple(float(v) for v in doc["stds"]),
    )
