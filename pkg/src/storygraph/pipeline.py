"""End-to-end run orchestration: query filter, assertion filter, graph,
hierarchy, cluster report, persisted artifacts.

Five modes cover the tool configurations under comparison: ``control``
(everything in one cluster), ``hac``/``ad_hac`` (tf-idf agglomerative,
without/with the assertion filter), ``louvain``/``ad_louvain`` (paraphrase
graph communities, without/with the filter).

Everything a run produces is a pure function of config + seeds: re-running
the same config rewrites byte-identical artifacts. Timings are reported to
the caller but never persisted.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

from . import assertion as assertion_mod
from . import hac as hac_mod
from . import louvain as louvain_mod
from . import simgraph, textkit
from .corpus import Corpus, Post, collapse_duplicate_texts, filter_corpus, load_corpus, parse_query
from .louvain import ClusterHierarchy, Partition
from .paraphrase import ParaphraseModel, load_paraphrase_model
from .simgraph import SimilarityGraph

MODES = ("control", "hac", "ad_hac", "louvain", "ad_louvain")
PAIRING_AUTO_CUTOFF = 5000
TOP_TERMS = 5


class PipelineError(Exception):
    pass


@dataclass
class PipelineConfig:
    input_path: str
    mode: str = "ad_louvain"
    input_format: str = "jsonl"
    query: str | None = None
    assertion_model: str | None = None
    paraphrase_model: str | None = None
    pairing: str = "auto"  # all | blocked | auto
    weighted_edges: bool = False
    collapse_duplicates: bool = False
    train_seed: int = 0
    louvain_seed: int = 0
    bench_seed: int = 0
    level_counts: list[int] | None = None  # hac cut levels; default halving
    eval_k: int | None = None
    hac_max_n: int = 20000
    out_dir: str = "out"
    run_id: str | None = None

    def canonical(self) -> str:
        doc = asdict(self)
        doc.pop("run_id")
        doc.pop("out_dir")
        return json.dumps(doc, sort_keys=True, ensure_ascii=False)

    def resolved_run_id(self) -> str:
        if self.run_id:
            return self.run_id
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()[:12]


@dataclass
class ClusterSummary:
    community: int
    size: int
    member_ids: list[str]
    top_terms: list[str]
    representative: str  # post id


@dataclass
class StoryReport:
    run_id: str
    mode: str
    seeds: dict[str, int]
    counts: dict[str, int]
    report_level: int  # index into hierarchy levels; -1 = k-cut
    clusters: list[ClusterSummary]
    level_sizes: list[int]
    modularity: list[float | None]
    # runtime provenance: never rendered into artifacts, so a re-run over a
    # warm cache still produces byte-identical output
    timings: dict[str, float] = field(default_factory=dict)
    cache_hit: bool = False


def resolve_pairing(pairing: str, n: int) -> str:
    if pairing == "auto":
        return "all" if n <= PAIRING_AUTO_CUTOFF else "blocked"
    if pairing not in ("all", "blocked"):
        raise PipelineError(f"unknown pairing mode {pairing!r}")
    return pairing


def _tfidf_vectors(posts: list[Post]):
    token_lists = [textkit.tokenize(textkit.normalize(p.text)) for p in posts]
    vocab = textkit.build_vocabulary(token_lists)
    return [textkit.tfidf(toks, vocab) for toks in token_lists], vocab


def cluster_posts(
    posts: list[Post],
    mode: str,
    paraphrase_model: ParaphraseModel | None,
    pairing: str = "auto",
    weighted_edges: bool = False,
    louvain_seed: int = 0,
    level_counts: list[int] | None = None,
    eval_k: int | None = None,
    hac_max_n: int = 20000,
    prebuilt_graph: SimilarityGraph | None = None,
) -> tuple[ClusterHierarchy, SimilarityGraph | None]:
    """Cluster one post list per mode; returns the hierarchy and, for the
    graph modes, the similarity graph it came from."""
    if mode not in MODES:
        raise PipelineError(f"unknown mode {mode!r}")
    if not posts:
        raise PipelineError("no posts left to cluster")
    ids = [p.id for p in posts]
    if mode == "control":
        hierarchy = ClusterHierarchy(
            node_ids=ids,
            levels=[Partition(tuple([0] * len(ids)))],
            modularity_per_level=[None],
            algorithm="control",
            params={"mode": mode},
        )
        return hierarchy, None
    if mode in ("hac", "ad_hac"):
        vectors, _ = _tfidf_vectors(posts)
        dend = hac_mod.hac_cluster(vectors, max_n=hac_max_n)
        counts = list(level_counts) if level_counts else hac_mod.default_level_counts(len(posts))
        if eval_k is not None and 1 <= eval_k <= len(posts) and eval_k not in counts:
            counts = sorted(set(counts) | {eval_k}, reverse=True)
        hierarchy = hac_mod.dendrogram_to_hierarchy(
            dend, ids, counts, params={"mode": mode, "linkage": "average"}
        )
        return hierarchy, None
    # louvain modes
    if prebuilt_graph is not None:
        graph = prebuilt_graph
        if graph.node_ids != ids:
            raise PipelineError("prebuilt graph does not match the post list")
    else:
        if paraphrase_model is None:
            raise PipelineError(f"mode {mode} requires a paraphrase model")
        pair_mode = resolve_pairing(pairing, len(posts))
        graph = simgraph.build_graph(
            Corpus(posts, source_uri="<memory>"), paraphrase_model,
            mode=pair_mode, weighted=weighted_edges,
        )
    if graph.total_weight() <= 0.0:
        hierarchy = ClusterHierarchy(
            node_ids=ids,
            levels=[Partition.singletons(len(ids))],
            modularity_per_level=[None],
            algorithm="louvain",
            params={"mode": mode, "seed": louvain_seed, "edgeless": True},
        )
        return hierarchy, graph
    hierarchy = louvain_mod.louvain_hierarchy(
        graph, seed=louvain_seed, params={"mode": mode}
    )
    return hierarchy, graph


def summarize_level(
    posts: list[Post],
    part: Partition,
    graph: SimilarityGraph | None,
) -> list[ClusterSummary]:
    """Per-cluster size, members, top tf-idf terms, representative post.

    Representative: highest weighted degree inside the cluster when a
    graph exists, else the cosine medoid; ties fall to the lowest index.
    """
    vectors, _ = _tfidf_vectors(posts)
    members = part.members()
    summaries = []
    for c, idxs in enumerate(members):
        mass: dict[str, float] = {}
        for i in idxs:
            for term, w in vectors[i].weights.items():
                mass[term] = mass.get(term, 0.0) + w
        top = [t for t, _ in sorted(mass.items(), key=lambda kv: (-kv[1], kv[0]))[:TOP_TERMS]]
        rep = idxs[0]
        if graph is not None and len(idxs) > 1:
            in_cluster = set(idxs)
            best = -1.0
            for i in idxs:
                deg = 0.0
                for j, w in graph.adj[i]:
                    if j in in_cluster and j != i:
                        deg += w
                if deg > best:
                    best, rep = deg, i
        elif len(idxs) > 1:
            best = -1.0
            for i in idxs:
                total = 0.0
                for j in idxs:
                    if j != i:
                        total += textkit.cosine(vectors[i], vectors[j])
                if total > best:
                    best, rep = total, i
        summaries.append(
            ClusterSummary(
                community=c,
                size=len(idxs),
                member_ids=[posts[i].id for i in idxs],
                top_terms=top,
                representative=posts[rep].id,
            )
        )
    return summaries


# --- artifact rendering ------------------------------------------------------

def render_report_tsv(report: StoryReport) -> str:
    """Deterministic TSV: metadata comment lines, then one row per cluster.
    Timings intentionally excluded so identical runs serialize identically."""
    lines = [
        f"# run_id\t{report.run_id}",
        f"# mode\t{report.mode}",
        "# seeds\t" + " ".join(f"{k}={v}" for k, v in sorted(report.seeds.items())),
        "# counts\t" + " ".join(f"{k}={v}" for k, v in sorted(report.counts.items())),
        f"# level_sizes\t{','.join(str(s) for s in report.level_sizes)}",
        "# modularity\t" + ",".join(
            "NA" if q is None else repr(q) for q in report.modularity
        ),
        "cluster\tsize\trepresentative\ttop_terms\tmembers",
    ]
    for cs in report.clusters:
        lines.append(
            f"{cs.community}\t{cs.size}\t{cs.representative}\t"
            f"{','.join(cs.top_terms)}\t{','.join(cs.member_ids)}"
        )
    return "\n".join(lines) + "\n"


def _write_atomic(path: Path, content: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(content, encoding="utf-8", newline="\n")
    os.replace(tmp, path)


def _posts_jsonl(posts: list[Post]) -> str:
    rows = []
    for p in posts:
        rows.append(json.dumps(
            {"id": p.id, "text": p.text, "author": p.author,
             "created_at": p.created_at},
            ensure_ascii=False, sort_keys=True,
        ))
    return "\n".join(rows) + "\n"


def run_pipeline(config: PipelineConfig) -> StoryReport:
    """Execute every stage for the config and persist the run directory:
    graph.txt (graph modes), hierarchy.json, report.tsv, posts.jsonl,
    config.echo. Writes are atomic; on failure this run's files are
    removed."""
    t0 = time.monotonic()
    timings: dict[str, float] = {}
    counts: dict[str, int] = {}

    corpus, warnings = load_corpus(config.input_path, config.input_format)
    counts["ingested"] = len(corpus)
    counts["warnings"] = warnings
    timings["ingest"] = time.monotonic() - t0

    t1 = time.monotonic()
    if config.query:
        corpus = filter_corpus(corpus, parse_query(config.query))
    counts["matched"] = len(corpus)
    if config.collapse_duplicates:
        corpus, _collapsed = collapse_duplicate_texts(corpus)
    counts["after_collapse"] = len(corpus)
    timings["filter"] = time.monotonic() - t1

    t2 = time.monotonic()
    if config.mode in ("ad_hac", "ad_louvain"):
        if not config.assertion_model:
            raise PipelineError(f"mode {config.mode} requires --assertion-model")
        a_model, a_feat = assertion_mod.load_assertion_model(config.assertion_model)
        corpus, _dropped = assertion_mod.filter_assertions(a_model, a_feat, corpus)
    posts = list(corpus)
    counts["kept"] = len(posts)
    counts["clustered"] = len(posts)
    timings["assertion_filter"] = time.monotonic() - t2

    run_id = config.resolved_run_id()
    run_dir = Path(config.out_dir) / run_id
    run_dir.mkdir(parents=True, exist_ok=True)

    p_model = None
    prebuilt = None
    cache_hit = False
    if config.mode in ("louvain", "ad_louvain"):
        if not config.paraphrase_model:
            raise PipelineError(f"mode {config.mode} requires --paraphrase-model")
        p_model = load_paraphrase_model(config.paraphrase_model)
        graph_path = run_dir / "graph.txt"
        echo_path = run_dir / "config.echo"
        if graph_path.exists() and echo_path.exists():
            if echo_path.read_text(encoding="utf-8").strip() == config.canonical():
                prebuilt = simgraph.load_graph(graph_path)
                if prebuilt.node_ids != [p.id for p in posts]:
                    prebuilt = None
                else:
                    cache_hit = True

    t3 = time.monotonic()
    hierarchy, graph = cluster_posts(
        posts,
        config.mode,
        p_model,
        pairing=config.pairing,
        weighted_edges=config.weighted_edges,
        louvain_seed=config.louvain_seed,
        level_counts=config.level_counts,
        eval_k=config.eval_k,
        hac_max_n=config.hac_max_n,
        prebuilt_graph=prebuilt,
    )
    counts["edges"] = graph.edge_count() if graph is not None else 0
    counts["levels"] = hierarchy.n_levels
    timings["cluster"] = time.monotonic() - t3

    t4 = time.monotonic()
    if config.eval_k is not None and 1 <= config.eval_k <= len(posts):
        part = louvain_mod.cut_to_k(hierarchy, config.eval_k)
        report_level = -1
    else:
        part = hierarchy.levels[-1]
        report_level = hierarchy.n_levels - 1
    clusters = summarize_level(posts, part, graph)
    report = StoryReport(
        run_id=run_id,
        mode=config.mode,
        seeds={
            "train": config.train_seed,
            "louvain": config.louvain_seed,
            "bench": config.bench_seed,
        },
        counts=counts,
        report_level=report_level,
        clusters=clusters,
        level_sizes=hierarchy.level_sizes(),
        modularity=list(hierarchy.modularity_per_level),
        timings=timings,
        cache_hit=cache_hit,
    )
    timings["summarize"] = time.monotonic() - t4

    written: list[Path] = []
    try:
        if graph is not None and not cache_hit:
            tmp = run_dir / "graph.txt.tmp"
            simgraph.save_graph(graph, tmp)
            os.replace(tmp, run_dir / "graph.txt")
            written.append(run_dir / "graph.txt")
        tmp = run_dir / "hierarchy.json.tmp"
        louvain_mod.save_hierarchy(hierarchy, tmp)
        os.replace(tmp, run_dir / "hierarchy.json")
        written.append(run_dir / "hierarchy.json")
        _write_atomic(run_dir / "report.tsv", render_report_tsv(report))
        written.append(run_dir / "report.tsv")
        _write_atomic(run_dir / "posts.jsonl", _posts_jsonl(posts))
        written.append(run_dir / "posts.jsonl")
        _write_atomic(run_dir / "config.echo", config.canonical() + "\n")
        written.append(run_dir / "config.echo")
    except BaseException:
        for path in written:
            try:
                path.unlink()
            except OSError:
                pass
        raise
    timings["total"] = time.monotonic() - t0
    return report
