import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from storygraph import textkit

texts = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",)), max_size=80
)


class TestNormalize:
    def test_lowercases(self):
        assert textkit.normalize("Harbor BRIDGE") == "harbor bridge"

    def test_url_sentinel(self):
        assert textkit.normalize("see http://a.b/c now") == "see <url> now"
        assert textkit.normalize("see www.example.com now") == "see <url> now"

    def test_mention_sentinel(self):
        assert textkit.normalize("RT @newsdesk: hi") == "rt <user> : hi"

    def test_hashtag_keeps_word(self):
        assert textkit.normalize("#bridge fell") == "bridge fell"

    def test_punctuation_separated(self):
        assert textkit.normalize("fell!now") == "fell ! now"

    def test_whitespace_collapsed(self):
        assert textkit.normalize("a\t b\n  c") == "a b c"

    @given(texts)
    def test_idempotent(self, s):
        once = textkit.normalize(s)
        assert textkit.normalize(once) == once

    def test_sentinels_survive_punct_split(self):
        norm = textkit.normalize("http://x.y/z?a=1")
        assert norm == "<url>"


class TestTokenize:
    def test_plain_split_on_normalized(self):
        norm = textkit.normalize("Bridge fell! #now")
        assert textkit.tokenize(norm) == ["bridge", "fell", "!", "now"]

    @given(texts)
    def test_tokens_rejoin_to_normalized(self, s):
        norm = textkit.normalize(s)
        assert " ".join(textkit.tokenize(norm)) == norm


class TestTokenSets:
    def test_single_token(self):
        ts = textkit.token_sets("ab")
        assert ts.word_unigrams == {"ab"}
        assert ts.char_bigrams == {"ab"}

    def test_word_order_only_changes_bigrams(self):
        a = textkit.token_sets("a b")
        b = textkit.token_sets("b a")
        assert a.word_unigrams == b.word_unigrams
        assert a.word_bigrams != b.word_bigrams

    def test_char_bigrams_include_spaces(self):
        ts = textkit.token_sets("amber alert")
        assert ts.char_bigrams == {"am", "mb", "be", "er", "r ", " a", "al", "le", "rt"}
        assert len(ts.char_bigrams) == 9


class TestTfIdf:
    def test_vocabulary_counts_documents_not_occurrences(self):
        vocab = textkit.build_vocabulary([["a", "a", "b"], ["a", "c"]])
        assert vocab.df == {"a": 2, "b": 1, "c": 1}
        assert vocab.n_docs == 2

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            textkit.build_vocabulary([])

    def test_idf_monotone_in_rarity(self):
        vocab = textkit.build_vocabulary([["a"], ["a", "b"], ["a", "b", "c"]])
        assert vocab.idf("c") > vocab.idf("b") > vocab.idf("a") > 0.0

    def test_tfidf_weights(self):
        vocab = textkit.build_vocabulary([["a", "b"], ["b"]])
        vec = textkit.tfidf(["a", "a", "b"], vocab)
        assert vec.weights["a"] == pytest.approx(2 * vocab.idf("a"))
        assert vec.weights["b"] == pytest.approx(1 * vocab.idf("b"))
        assert vec.norm == pytest.approx(
            math.sqrt(vec.weights["a"] ** 2 + vec.weights["b"] ** 2)
        )


class TestCosine:
    def _vecs(self, docs):
        vocab = textkit.build_vocabulary(docs)
        return [textkit.tfidf(d, vocab) for d in docs]

    def test_identical_is_one(self):
        u, v = self._vecs([["a", "b"], ["a", "b"]])
        assert textkit.cosine(u, v) == pytest.approx(1.0)

    def test_disjoint_is_zero(self):
        u, v = self._vecs([["a"], ["b"]])
        assert textkit.cosine(u, v) == 0.0

    def test_zero_vector_is_zero(self):
        vocab = textkit.build_vocabulary([["a"]])
        zero = textkit.tfidf([], vocab)
        one = textkit.tfidf(["a"], vocab)
        assert textkit.cosine(zero, one) == 0.0

    @given(st.lists(st.sampled_from("abcdef"), min_size=1, max_size=12),
           st.lists(st.sampled_from("abcdef"), min_size=1, max_size=12))
    def test_exactly_symmetric(self, da, db):
        vocab = textkit.build_vocabulary([da, db])
        u, v = textkit.tfidf(da, vocab), textkit.tfidf(db, vocab)
        assert textkit.cosine(u, v) == textkit.cosine(v, u)

    def test_bounded(self):
        docs = [["a", "b", "c"], ["b", "c", "d"], ["x"]]
        vecs = self._vecs(docs)
        for u in vecs:
            for v in vecs:
                assert -1e-12 <= textkit.cosine(u, v) <= 1.0 + 1e-12
