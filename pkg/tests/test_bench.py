import json
from pathlib import Path

import pytest

from storygraph import bench
from storygraph.bench import (
    BenchmarkData,
    build_assertion_seed,
    build_paraphrase_seed,
    compare_modes,
    generate_benchmark,
    load_truth,
    seed_assertion_path,
    seed_paraphrase_path,
    write_benchmark,
)


class TestGenerate:
    def test_exact_counts(self):
        data = generate_benchmark(
            n_stories=4, tweets_per_story=5, noise_count=20, chatter_count=15, seed=0
        )
        assert len(data.corpus) == 4 * 5 + 20 + 15
        kinds = list(data.kinds.values())
        assert kinds.count("story") == 20
        assert kinds.count("noise") == 20
        assert kinds.count("chatter") == 15

    def test_truth_labels_per_kind(self):
        data = generate_benchmark(
            n_stories=3, tweets_per_story=4, noise_count=6, chatter_count=6, seed=1
        )
        story_labels = {
            data.truth[pid] for pid, kind in data.kinds.items() if kind == "story"
        }
        assert story_labels == {"story-00", "story-01", "story-02"}
        # noise and chatter are each their own singleton truth cluster
        non_story = [
            data.truth[pid] for pid, kind in data.kinds.items() if kind != "story"
        ]
        assert len(non_story) == len(set(non_story)) == 12

    def test_deterministic_per_seed(self):
        a = generate_benchmark(n_stories=3, tweets_per_story=4,
                               noise_count=10, chatter_count=10, seed=7)
        b = generate_benchmark(n_stories=3, tweets_per_story=4,
                               noise_count=10, chatter_count=10, seed=7)
        assert [p.text for p in a.corpus] == [p.text for p in b.corpus]
        assert a.truth == b.truth and a.kinds == b.kinds

    def test_seed_changes_content(self):
        a = generate_benchmark(n_stories=3, tweets_per_story=4,
                               noise_count=10, chatter_count=10, seed=1)
        b = generate_benchmark(n_stories=3, tweets_per_story=4,
                               noise_count=10, chatter_count=10, seed=2)
        assert [p.text for p in a.corpus] != [p.text for p in b.corpus]

    def test_variable_story_sizes(self):
        data = generate_benchmark(
            n_stories=5, tweets_per_story=(2, 6), noise_count=5,
            chatter_count=5, seed=3,
        )
        sizes: dict[str, int] = {}
        for pid, kind in data.kinds.items():
            if kind == "story":
                lab = data.truth[pid]
                sizes[lab] = sizes.get(lab, 0) + 1
        assert len(sizes) == 5
        assert all(2 <= s <= 6 for s in sizes.values())

    def test_ids_sequential(self):
        data = generate_benchmark(n_stories=2, tweets_per_story=3,
                                  noise_count=4, chatter_count=4, seed=0)
        assert data.corpus.ids() == [f"t{i:05d}" for i in range(14)]

    def test_limits_enforced(self):
        with pytest.raises(ValueError):
            generate_benchmark(n_stories=0)
        with pytest.raises(ValueError):
            generate_benchmark(n_stories=999)
        with pytest.raises(ValueError):
            generate_benchmark(n_stories=2, noise_count=10**6)
        with pytest.raises(ValueError):
            generate_benchmark(n_stories=2, tweets_per_story=(5, 2))


class TestWriteAndLoad:
    def test_round_trip(self, tmp_path):
        data = generate_benchmark(n_stories=2, tweets_per_story=3,
                                  noise_count=4, chatter_count=4, seed=0)
        corpus_path, truth_path = write_benchmark(data, tmp_path)
        from storygraph.corpus import load_corpus

        corpus, warnings = load_corpus(corpus_path)
        assert warnings == 0
        assert corpus.ids() == data.corpus.ids()
        assert [p.text for p in corpus] == [p.text for p in data.corpus]
        truth = load_truth(truth_path)
        assert truth == data.truth

    def test_truth_file_has_kinds_column(self, tmp_path):
        data = generate_benchmark(n_stories=2, tweets_per_story=2,
                                  noise_count=2, chatter_count=2, seed=0)
        _, truth_path = write_benchmark(data, tmp_path)
        lines = truth_path.read_text().splitlines()
        assert lines[0] == "id\tlabel\tkind"
        assert all(len(l.split("\t")) == 3 for l in lines[1:])

    def test_load_truth_rejects_bad_lines(self, tmp_path):
        p = tmp_path / "truth.tsv"
        p.write_text("id\tlabel\tkind\nonly-one-column\n", encoding="utf-8")
        with pytest.raises(ValueError):
            load_truth(p)


class TestSeeds:
    def test_assertion_seed_composition(self):
        rows = build_assertion_seed()
        labels = [lab for _, lab in rows]
        assert labels.count("assertion") >= 80
        assert labels.count("other") >= 80
        assert rows[0] == ("there is a third bomber on the roof", "assertion")

    def test_paraphrase_seed_is_seven_column(self):
        rows = build_paraphrase_seed()
        for row in rows:
            assert len(row.split("\t")) == 7

    def test_canonical_pairs_pinned_first(self):
        rows = build_paraphrase_seed()
        first = rows[0].split("\t")
        second = rows[1].split("\t")
        assert first[2] == "Amber alert gave me a damn heart attack"
        assert first[4] == "(4, 1)"
        assert second[3] == "Am I the only one who dont get Amber alert"
        assert second[4] == "(1, 4)"

    def test_builders_deterministic(self):
        assert build_assertion_seed() == build_assertion_seed()
        assert build_paraphrase_seed() == build_paraphrase_seed()

    def test_shipped_files_match_builders(self, tmp_path):
        """Regenerating the committed data files is a byte-level no-op."""
        bench.write_seed_files(tmp_path)
        rebuilt_a = (tmp_path / "assertion_seed.jsonl").read_bytes()
        rebuilt_p = (tmp_path / "paraphrase_seed.tsv").read_bytes()
        assert rebuilt_a == seed_assertion_path().read_bytes()
        assert rebuilt_p == seed_paraphrase_path().read_bytes()


class TestTrainSeedModels:
    def test_models_train_and_classify(self, seed_models):
        (a_model, a_feat), p_model = seed_models
        from storygraph import assertion as assertion_mod
        from storygraph import linear_model

        vec = assertion_mod.featurize(a_feat, "the harbor bridge has collapsed")
        assert linear_model.predict(a_model, vec) == 1
        vec = assertion_mod.featurize(a_feat, "omg this is insane")
        assert linear_model.predict(a_model, vec) == -1


class TestCompareModes:
    def test_ordering_on_one_seed(self, seed_models):
        data = generate_benchmark(
            n_stories=6, tweets_per_story=12, noise_count=60,
            chatter_count=60, seed=3,
        )
        (a_model, a_feat), p_model = seed_models
        rows = compare_modes(
            data, (a_model, a_feat), p_model, k=6,
            modes=("control", "hac", "louvain", "ad_louvain"),
        )
        assert set(rows) == {"control", "hac", "louvain", "ad_louvain"}
        for row in rows.values():
            assert -1.0 <= row.ari <= 1.0
            assert row.ami <= 1.0
        assert rows["control"].k == 1
        assert rows["control"].n_clusters == 1
        # the full pipeline beats the baseline and its unfiltered variant
        assert rows["ad_louvain"].ari > rows["hac"].ari
        assert rows["ad_louvain"].ami > rows["hac"].ami
        assert rows["ad_louvain"].ari > rows["louvain"].ari

    def test_ad_louvain_covers_fewer_posts(self, seed_models):
        data = generate_benchmark(
            n_stories=4, tweets_per_story=8, noise_count=30,
            chatter_count=30, seed=5,
        )
        models = seed_models
        rows = compare_modes(
            data, models[0], models[1], k=4, modes=("louvain", "ad_louvain")
        )
        assert rows["ad_louvain"].covered < rows["louvain"].covered
