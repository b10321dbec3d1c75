import pytest

from storygraph import bench


@pytest.fixture(scope="session")
def seed_models():
    """Both classifiers trained once from the shipped seed files."""
    return bench.train_seed_models()


@pytest.fixture(scope="session")
def model_files(seed_models, tmp_path_factory):
    """The same models persisted to disk for CLI-level tests."""
    from storygraph import assertion, paraphrase

    (a_model, a_feat), p_model = seed_models
    d = tmp_path_factory.mktemp("models")
    a_path = d / "assertion.json"
    p_path = d / "paraphrase.json"
    assertion.save_assertion_model(a_model, a_feat, a_path)
    paraphrase.save_paraphrase_model(p_model, p_path)
    return {"assertion": a_path, "paraphrase": p_path}


@pytest.fixture(scope="session")
def small_bench_dir(tmp_path_factory):
    """A small labeled benchmark corpus on disk."""
    data = bench.generate_benchmark(
        n_stories=6, tweets_per_story=12, noise_count=60, chatter_count=60, seed=3
    )
    d = tmp_path_factory.mktemp("bench")
    bench.write_benchmark(data, d)
    return d
