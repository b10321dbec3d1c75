"""Read-only HTTP view of a finished run, plus the analyst label log.

Serves the persisted hierarchy, clusters, and posts as JSON; the only
thing it ever writes is ``labels.jsonl`` in the run directory, an
append-only log replayed on startup with last-writer-wins per cluster.
Static UI assets are served from an optional directory.
"""

from __future__ import annotations

import json
import re
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from . import louvain as louvain_mod
from . import pipeline as pipeline_mod
from . import simgraph, textkit
from .corpus import Post

PAGE_SIZE = 50
PAGE_THRESHOLD = 200
SEARCH_CAP = 200

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json; charset=utf-8",
    ".map": "application/json; charset=utf-8",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
}


class ServiceError(Exception):
    pass


def _load_posts(path: Path) -> list[Post]:
    posts = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)
        posts.append(Post(
            id=doc["id"], text=doc["text"],
            author=doc.get("author", ""),
            created_at=float(doc.get("created_at", 0.0)),
        ))
    return posts


def _parse_report_meta(path: Path) -> dict:
    meta = {"run_id": None, "seeds": {}}
    if not path.exists():
        return meta
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.startswith("#"):
            break
        parts = line.split("\t")
        if len(parts) < 2:
            continue
        key = parts[0].lstrip("# ").strip()
        if key == "run_id":
            meta["run_id"] = parts[1]
        elif key == "seeds":
            for item in parts[1].split():
                if "=" in item:
                    name, value = item.split("=", 1)
                    try:
                        meta["seeds"][name] = int(value)
                    except ValueError:
                        meta["seeds"][name] = value
    return meta


class RunState:
    """Immutable run artifacts plus the mutable label store."""

    def __init__(self, run_dir: str | Path):
        self.run_dir = Path(run_dir)
        hierarchy_path = self.run_dir / "hierarchy.json"
        posts_path = self.run_dir / "posts.jsonl"
        if not hierarchy_path.exists() or not posts_path.exists():
            raise ServiceError(
                f"{self.run_dir} is not a finished run "
                "(hierarchy.json and posts.jsonl required)"
            )
        self.hierarchy = louvain_mod.load_hierarchy(hierarchy_path)
        self.posts = _load_posts(posts_path)
        if [p.id for p in self.posts] != list(self.hierarchy.node_ids):
            raise ServiceError("posts.jsonl does not match hierarchy node ids")
        self.post_index = {p.id: i for i, p in enumerate(self.posts)}
        graph_path = self.run_dir / "graph.txt"
        self.graph = simgraph.load_graph(graph_path) if graph_path.exists() else None
        meta = _parse_report_meta(self.run_dir / "report.tsv")
        self.run_id = meta["run_id"] or self.run_dir.name
        self.seeds = meta["seeds"]
        self._summaries: dict[int, list] = {}
        self._tokens: list[frozenset[str]] | None = None
        self._lock = threading.Lock()
        self.labels_path = self.run_dir / "labels.jsonl"
        self._labels: dict[tuple[int, int], dict] = {}
        self._replay_labels()

    # --- labels ---------------------------------------------------------

    def _replay_labels(self):
        if not self.labels_path.exists():
            return
        for line in self.labels_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            self._labels[(int(rec["level"]), int(rec["community"]))] = rec

    def valid_cluster(self, level: int, community: int) -> bool:
        if not 0 <= level < self.hierarchy.n_levels:
            return False
        return 0 <= community < self.hierarchy.levels[level].n_communities

    def add_label(self, level: int, community: int, text: str, analyst: str) -> dict:
        rec = {
            "level": level,
            "community": community,
            "text": text,
            "analyst": analyst,
            "ts": time.time(),
        }
        with self._lock:
            with open(self.labels_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
            self._labels[(level, community)] = rec
        return rec

    def get_label(self, level: int, community: int) -> dict | None:
        with self._lock:
            return self._labels.get((level, community))

    def all_labels(self) -> list[dict]:
        with self._lock:
            return [self._labels[key] for key in sorted(self._labels)]

    # --- derived views ---------------------------------------------------

    def summaries(self, level: int):
        with self._lock:
            cached = self._summaries.get(level)
        if cached is not None:
            return cached
        part = self.hierarchy.levels[level]
        summary = pipeline_mod.summarize_level(self.posts, part, self.graph)
        with self._lock:
            self._summaries[level] = summary
        return summary

    def token_sets(self) -> list[frozenset[str]]:
        if self._tokens is None:
            self._tokens = [
                frozenset(textkit.tokenize(textkit.normalize(p.text)))
                for p in self.posts
            ]
        return self._tokens

    def post_payload(self, i: int) -> dict:
        p = self.posts[i]
        return {
            "id": p.id,
            "text": p.text,
            "author": p.author,
            "created_at": p.created_at,
            "communities": {
                str(t): lv.assignment[i]
                for t, lv in enumerate(self.hierarchy.levels)
            },
        }


_LEVEL_RE = re.compile(r"^/api/level/(\d+)$")
_CLUSTER_RE = re.compile(r"^/api/level/(\d+)/cluster/(\d+)$")
_POST_RE = re.compile(r"^/api/post/([^/]+)$")


def _make_handler(state: RunState, ui_dir: Path | None, quiet: bool):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            if not quiet:
                super().log_message(fmt, *args)

        # -- plumbing ----------------------------------------------------

        def _send_json(self, code: int, payload: dict):
            payload = {"run_id": state.run_id, "seeds": state.seeds, **payload}
            body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
            self.send_response(code)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_error_json(self, code: int, message: str):
            self._send_json(code, {"error": message})

        def _send_file(self, path: Path):
            body = path.read_bytes()
            ctype = _CONTENT_TYPES.get(path.suffix.lower(), "application/octet-stream")
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        # -- GET -----------------------------------------------------------

        def do_GET(self):
            try:
                self._route_get()
            except BrokenPipeError:
                pass
            except Exception as exc:  # pragma: no cover - defensive
                try:
                    self._send_error_json(500, str(exc))
                except Exception:
                    pass

        def _route_get(self):
            url = urlparse(self.path)
            path = url.path
            if path == "/api/hierarchy":
                return self._get_hierarchy()
            m = _CLUSTER_RE.match(path)
            if m:
                return self._get_cluster(int(m.group(1)), int(m.group(2)),
                                         parse_qs(url.query))
            m = _LEVEL_RE.match(path)
            if m:
                return self._get_level(int(m.group(1)))
            m = _POST_RE.match(path)
            if m:
                return self._get_post(m.group(1))
            if path == "/api/labels":
                return self._send_json(200, {"labels": state.all_labels()})
            if path == "/api/search":
                return self._get_search(parse_qs(url.query))
            if path.startswith("/api/"):
                return self._send_error_json(404, f"no such endpoint: {path}")
            return self._get_static(path)

        def _get_hierarchy(self):
            h = state.hierarchy
            self._send_json(200, {
                "algorithm": h.algorithm,
                "params": h.params,
                "n_posts": len(h.node_ids),
                "levels": [
                    {
                        "level": t,
                        "communities": h.levels[t].n_communities,
                        "modularity": h.modularity_per_level[t],
                    }
                    for t in range(h.n_levels)
                ],
            })

        def _get_level(self, level: int):
            if not 0 <= level < state.hierarchy.n_levels:
                return self._send_error_json(404, f"no level {level}")
            summaries = state.summaries(level)
            self._send_json(200, {
                "level": level,
                "communities": [
                    {
                        "community": cs.community,
                        "size": cs.size,
                        "top_terms": cs.top_terms,
                        "representative": cs.representative,
                        "label": (state.get_label(level, cs.community) or {}).get("text"),
                    }
                    for cs in summaries
                ],
            })

        def _get_cluster(self, level: int, community: int, query: dict):
            if not state.valid_cluster(level, community):
                return self._send_error_json(404, f"no cluster {community} at level {level}")
            cs = state.summaries(level)[community]
            total = cs.size
            paged = "page" in query or total > PAGE_THRESHOLD
            if paged:
                try:
                    page = int(query.get("page", ["0"])[0])
                except ValueError:
                    return self._send_error_json(400, "page must be an integer")
                if page < 0:
                    return self._send_error_json(400, "page must be >= 0")
                start, stop = page * PAGE_SIZE, (page + 1) * PAGE_SIZE
                page_size = PAGE_SIZE
            else:
                page, page_size, start, stop = 0, total, 0, total
            member_ids = cs.member_ids[start:stop]
            members = [
                state.post_payload(state.post_index[pid]) for pid in member_ids
            ]
            self._send_json(200, {
                "level": level,
                "community": community,
                "size": total,
                "page": page,
                "page_size": page_size,
                "top_terms": cs.top_terms,
                "representative": cs.representative,
                "label": (state.get_label(level, community) or {}).get("text"),
                "members": members,
            })

        def _get_post(self, post_id: str):
            i = state.post_index.get(post_id)
            if i is None:
                return self._send_error_json(404, f"no post {post_id!r}")
            self._send_json(200, {"post": state.post_payload(i)})

        def _get_search(self, query: dict):
            q = (query.get("q") or [""])[0]
            terms = set(textkit.tokenize(textkit.normalize(q)))
            if not terms:
                return self._send_error_json(400, "empty query")
            tokens = state.token_sets()
            matches = []
            for i, toks in enumerate(tokens):
                if terms <= toks:
                    matches.append(state.post_payload(i))
                    if len(matches) >= SEARCH_CAP:
                        break
            self._send_json(200, {"query": q, "matches": matches})

        def _get_static(self, path: str):
            if ui_dir is None:
                return self._send_error_json(404, "no UI bundled; API at /api/")
            rel = path.lstrip("/") or "index.html"
            target = (ui_dir / rel).resolve()
            if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
                return self._send_error_json(404, f"no such file: {path}")
            self._send_file(target)

        # -- POST ----------------------------------------------------------

        def do_POST(self):
            try:
                if urlparse(self.path).path != "/api/label":
                    return self._send_error_json(404, "POST only supported on /api/label")
                length = int(self.headers.get("Content-Length") or 0)
                raw = self.rfile.read(length) if length else b""
                try:
                    doc = json.loads(raw.decode("utf-8") or "{}")
                except (json.JSONDecodeError, UnicodeDecodeError):
                    return self._send_error_json(400, "body must be JSON")
                try:
                    level = int(doc["level"])
                    community = int(doc["community"])
                    text = str(doc["text"])
                except (KeyError, TypeError, ValueError):
                    return self._send_error_json(
                        400, "required fields: level, community, text"
                    )
                if not text.strip():
                    return self._send_error_json(400, "label text is empty")
                if not state.valid_cluster(level, community):
                    return self._send_error_json(
                        400, f"no cluster {community} at level {level}"
                    )
                analyst = str(doc.get("analyst", ""))
                rec = state.add_label(level, community, text, analyst)
                self._send_json(200, {"ok": True, "label": rec})
            except BrokenPipeError:
                pass

    return Handler


def make_server(
    run_dir: str | Path,
    host: str = "127.0.0.1",
    port: int = 0,
    ui_dir: str | Path | None = None,
    quiet: bool = False,
) -> ThreadingHTTPServer:
    state = RunState(run_dir)
    ui = Path(ui_dir) if ui_dir else None
    if ui is not None and not ui.is_dir():
        raise ServiceError(f"UI directory {ui} does not exist")
    handler = _make_handler(state, ui, quiet)
    return ThreadingHTTPServer((host, port), handler)


def serve(
    run_dir: str | Path,
    host: str = "127.0.0.1",
    port: int = 8765,
    ui_dir: str | Path | None = None,
):
    server = make_server(run_dir, host=host, port=port, ui_dir=ui_dir)
    actual = server.server_address
    print(f"serving {run_dir} on http://{actual[0]}:{actual[1]}/ (Ctrl-C stops)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
