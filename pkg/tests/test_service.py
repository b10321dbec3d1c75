import json
import threading
import urllib.error
import urllib.request
from pathlib import Path

import pytest

from storygraph.pipeline import PipelineConfig, run_pipeline
from storygraph.service import (
    PAGE_SIZE,
    PAGE_THRESHOLD,
    RunState,
    ServiceError,
    make_server,
)


def _write_corpus(path, texts):
    lines = [
        json.dumps({"id": f"p{i}", "text": t, "created_at": i})
        for i, t in enumerate(texts)
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


TEXTS = [
    "BREAKING: harbor bridge has collapsed near the boat dock",
    "the harbor bridge collapsed into the water this morning",
    "harbor bridge span partially collapsed on the east side",
    "city hall is on fire downtown",
    "the city hall building caught fire right now",
    "city hall annex on fire with smoke showing witnesses say",
    "park rangers approved a tree census for next spring",
]


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory, model_files):
    base = tmp_path_factory.mktemp("service_run")
    corpus = _write_corpus(base / "posts.jsonl", TEXTS)
    config = PipelineConfig(
        input_path=str(corpus),
        mode="louvain",
        paraphrase_model=str(model_files["paraphrase"]),
        out_dir=str(base / "out"),
    )
    report = run_pipeline(config)
    return Path(config.out_dir) / report.run_id


@pytest.fixture(scope="module")
def server(run_dir):
    srv = make_server(run_dir, port=0, quiet=True)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    srv._base = f"http://127.0.0.1:{srv.server_address[1]}"
    yield srv
    srv.shutdown()
    srv.server_close()
    thread.join(timeout=5)


def _get(server, path):
    with urllib.request.urlopen(server._base + path, timeout=10) as resp:
        return resp.status, json.loads(resp.read().decode("utf-8"))


def _get_error(server, path):
    try:
        with urllib.request.urlopen(server._base + path, timeout=10) as resp:
            return resp.status, json.loads(resp.read().decode("utf-8"))
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read().decode("utf-8"))


def _post(server, path, doc):
    body = json.dumps(doc).encode("utf-8")
    req = urllib.request.Request(
        server._base + path, data=body,
        headers={"Content-Type": "application/json"},
    )
    try:
        with urllib.request.urlopen(req, timeout=10) as resp:
            return resp.status, json.loads(resp.read().decode("utf-8"))
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read().decode("utf-8"))


class TestRunState:
    def test_requires_finished_run(self, tmp_path):
        with pytest.raises(ServiceError, match="finished run"):
            RunState(tmp_path)

    def test_posts_must_match_hierarchy(self, run_dir, tmp_path):
        import shutil

        broken = tmp_path / "broken"
        shutil.copytree(run_dir, broken)
        _write_corpus(broken / "posts.jsonl", ["one", "two"])
        with pytest.raises(ServiceError, match="does not match"):
            RunState(broken)

    def test_meta_from_report(self, run_dir):
        state = RunState(run_dir)
        assert state.run_id == run_dir.name
        assert set(state.seeds) == {"train", "louvain", "bench"}


class TestGetEndpoints:
    def test_hierarchy(self, server):
        status, doc = _get(server, "/api/hierarchy")
        assert status == 200
        assert doc["algorithm"] == "louvain"
        assert doc["n_posts"] == len(TEXTS)
        assert doc["levels"]
        for entry in doc["levels"]:
            assert set(entry) == {"level", "communities", "modularity"}
        assert "run_id" in doc and "seeds" in doc

    def test_level_lists_all_communities(self, server):
        status, h = _get(server, "/api/hierarchy")
        for entry in h["levels"]:
            status, doc = _get(server, f"/api/level/{entry['level']}")
            assert status == 200
            assert len(doc["communities"]) == entry["communities"]
            sizes = sum(c["size"] for c in doc["communities"])
            assert sizes == len(TEXTS)
            for c in doc["communities"]:
                assert c["representative"] in {f"p{i}" for i in range(len(TEXTS))}

    def test_cluster_members_consistent_with_level(self, server):
        _, doc = _get(server, "/api/level/0")
        for c in doc["communities"]:
            _, cluster = _get(server, f"/api/level/0/cluster/{c['community']}")
            assert cluster["size"] == c["size"]
            assert len(cluster["members"]) == c["size"]
            for member in cluster["members"]:
                assert member["communities"]["0"] == c["community"]

    def test_post_lookup(self, server):
        status, doc = _get(server, "/api/post/p0")
        assert status == 200
        assert doc["post"]["id"] == "p0"
        assert doc["post"]["text"] == TEXTS[0]
        assert "communities" in doc["post"]

    def test_search_and_matching(self, server):
        status, doc = _get(server, "/api/search?q=harbor+bridge")
        assert status == 200
        ids = {m["id"] for m in doc["matches"]}
        assert ids == {"p0", "p1", "p2"}

    def test_search_is_and_semantics(self, server):
        _, doc = _get(server, "/api/search?q=bridge+downtown")
        assert doc["matches"] == []

    def test_labels_initially_empty(self, server):
        status, doc = _get(server, "/api/labels")
        assert status == 200
        assert isinstance(doc["labels"], list)

    def test_envelope_on_every_response(self, server):
        for path in ("/api/hierarchy", "/api/level/0", "/api/post/p1", "/api/labels"):
            _, doc = _get(server, path)
            assert doc["run_id"]
            assert "seeds" in doc


class TestErrors:
    def test_unknown_level(self, server):
        status, doc = _get_error(server, "/api/level/99")
        assert status == 404
        assert "error" in doc

    def test_unknown_cluster(self, server):
        status, doc = _get_error(server, "/api/level/0/cluster/999")
        assert status == 404

    def test_unknown_post(self, server):
        status, doc = _get_error(server, "/api/post/nope")
        assert status == 404

    def test_unknown_api_path(self, server):
        status, doc = _get_error(server, "/api/wat")
        assert status == 404

    def test_empty_search(self, server):
        status, doc = _get_error(server, "/api/search?q=")
        assert status == 400

    def test_bad_page(self, server):
        status, doc = _get_error(server, "/api/level/0/cluster/0?page=x")
        assert status == 400
        status, doc = _get_error(server, "/api/level/0/cluster/0?page=-1")
        assert status == 400

    def test_no_ui_dir_static_404(self, server):
        status, doc = _get_error(server, "/index.html")
        assert status == 404


class TestPaging:
    def test_explicit_page_param_pages(self, server):
        _, full = _get(server, "/api/level/0/cluster/0")
        _, paged = _get(server, "/api/level/0/cluster/0?page=0")
        assert paged["page_size"] == PAGE_SIZE
        assert paged["page"] == 0
        assert [m["id"] for m in paged["members"]] == [
            m["id"] for m in full["members"][:PAGE_SIZE]
        ]

    def test_page_past_end_is_empty(self, server):
        _, paged = _get(server, "/api/level/0/cluster/0?page=50")
        assert paged["members"] == []
        assert paged["size"] > 0

    def test_large_cluster_auto_pages(self, tmp_path, model_files):
        n = PAGE_THRESHOLD + 30
        texts = [f"the harbor bridge collapsed again take {i}" for i in range(n)]
        corpus = _write_corpus(tmp_path / "posts.jsonl", texts)
        config = PipelineConfig(
            input_path=str(corpus),
            mode="control",
            out_dir=str(tmp_path / "out"),
        )
        report = run_pipeline(config)
        run_dir = Path(config.out_dir) / report.run_id
        srv = make_server(run_dir, port=0, quiet=True)
        thread = threading.Thread(target=srv.serve_forever, daemon=True)
        thread.start()
        srv._base = f"http://127.0.0.1:{srv.server_address[1]}"
        try:
            _, doc = _get(srv, "/api/level/0/cluster/0")
            assert doc["size"] == n
            assert doc["page_size"] == PAGE_SIZE
            assert len(doc["members"]) == PAGE_SIZE
            seen = []
            page = 0
            while True:
                _, d = _get(srv, f"/api/level/0/cluster/0?page={page}")
                if not d["members"]:
                    break
                seen.extend(m["id"] for m in d["members"])
                page += 1
            assert len(seen) == n
            assert len(set(seen)) == n
        finally:
            srv.shutdown()
            srv.server_close()
            thread.join(timeout=5)


class TestLabels:
    def test_post_label_appears_in_views(self, server):
        status, doc = _post(
            server, "/api/label",
            {"level": 0, "community": 0, "text": "bridge collapse", "analyst": "kim"},
        )
        assert status == 200
        assert doc["ok"] is True
        _, level = _get(server, "/api/level/0")
        assert level["communities"][0]["label"] == "bridge collapse"
        _, cluster = _get(server, "/api/level/0/cluster/0")
        assert cluster["label"] == "bridge collapse"
        _, labels = _get(server, "/api/labels")
        assert any(l["text"] == "bridge collapse" for l in labels["labels"])

    def test_last_writer_wins(self, server):
        _post(server, "/api/label", {"level": 0, "community": 1, "text": "first"})
        _post(server, "/api/label", {"level": 0, "community": 1, "text": "second"})
        _, doc = _get(server, "/api/level/0")
        assert doc["communities"][1]["label"] == "second"

    def test_labels_survive_restart(self, run_dir):
        srv = make_server(run_dir, port=0, quiet=True)
        thread = threading.Thread(target=srv.serve_forever, daemon=True)
        thread.start()
        srv._base = f"http://127.0.0.1:{srv.server_address[1]}"
        _post(srv, "/api/label", {"level": 0, "community": 0, "text": "persisted"})
        srv.shutdown()
        srv.server_close()
        thread.join(timeout=5)

        srv2 = make_server(run_dir, port=0, quiet=True)
        thread2 = threading.Thread(target=srv2.serve_forever, daemon=True)
        thread2.start()
        srv2._base = f"http://127.0.0.1:{srv2.server_address[1]}"
        try:
            _, doc = _get(srv2, "/api/level/0/cluster/0")
            assert doc["label"] == "persisted"
        finally:
            srv2.shutdown()
            srv2.server_close()
            thread2.join(timeout=5)

    def test_label_log_appends(self, run_dir, server):
        before = (run_dir / "labels.jsonl").read_text().count("\n") \
            if (run_dir / "labels.jsonl").exists() else 0
        _post(server, "/api/label", {"level": 0, "community": 0, "text": "anno"})
        after = (run_dir / "labels.jsonl").read_text().count("\n")
        assert after == before + 1

    @pytest.mark.parametrize(
        "doc,why",
        [
            ({}, "missing fields"),
            ({"level": 0, "community": 0}, "missing text"),
            ({"level": 0, "community": 0, "text": "   "}, "blank text"),
            ({"level": "x", "community": 0, "text": "t"}, "bad level type"),
            ({"level": 0, "community": 999, "text": "t"}, "no such cluster"),
            ({"level": 99, "community": 0, "text": "t"}, "no such level"),
        ],
    )
    def test_rejected_labels(self, server, doc, why):
        status, body = _post(server, "/api/label", doc)
        assert status == 400, why
        assert "error" in body

    def test_post_wrong_path(self, server):
        status, _ = _post(server, "/api/labels", {"level": 0})
        assert status == 404

    def test_non_json_body(self, server):
        req = urllib.request.Request(
            server._base + "/api/label", data=b"not json",
            headers={"Content-Type": "text/plain"},
        )
        try:
            with urllib.request.urlopen(req, timeout=10) as resp:
                status = resp.status
        except urllib.error.HTTPError as err:
            status = err.code
        assert status == 400


class TestStatic:
    def test_serves_ui_files_with_traversal_guard(self, run_dir, tmp_path):
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<html>ok</html>", encoding="utf-8")
        (ui / "app.js").write_text("console.log(1)", encoding="utf-8")
        secret = tmp_path / "secret.txt"
        secret.write_text("nope", encoding="utf-8")
        srv = make_server(run_dir, port=0, ui_dir=ui, quiet=True)
        thread = threading.Thread(target=srv.serve_forever, daemon=True)
        thread.start()
        base = f"http://127.0.0.1:{srv.server_address[1]}"
        try:
            with urllib.request.urlopen(base + "/", timeout=10) as resp:
                assert resp.status == 200
                assert b"ok" in resp.read()
                assert resp.headers["Content-Type"].startswith("text/html")
            with urllib.request.urlopen(base + "/app.js", timeout=10) as resp:
                assert resp.headers["Content-Type"].startswith("text/javascript")
            try:
                with urllib.request.urlopen(
                    base + "/../secret.txt", timeout=10
                ) as resp:
                    status = resp.status
                    body = resp.read()
            except urllib.error.HTTPError as err:
                status = err.code
                body = err.read()
            assert status == 404 or b"nope" not in body
        finally:
            srv.shutdown()
            srv.server_close()
            thread.join(timeout=5)

    def test_missing_ui_dir_rejected(self, run_dir, tmp_path):
        with pytest.raises(ServiceError):
            make_server(run_dir, port=0, ui_dir=tmp_path / "missing")
