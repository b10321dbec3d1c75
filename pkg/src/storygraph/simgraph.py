"""Undirected paraphrase similarity graph over assertion posts.

Nodes are posts, edges are classifier-accepted paraphrase pairs. Also the
weighted-graph container used by community detection (aggregated graphs
may carry self-loops; pairing never creates them).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import textkit
from .corpus import Corpus
from .paraphrase import PairScorer, ParaphraseModel


class GraphFormatError(Exception):
    pass


# the 25 highest-frequency English words; used only for candidate blocking
STOPWORDS = frozenset(
    "the be to of and a in that have i it for not on with he as you do at "
    "this but his by from".split()
)


@dataclass
class SimilarityGraph:
    """Adjacency-list weighted undirected graph.

    ``adj[i]`` holds (neighbor, weight) sorted by neighbor; an undirected
    edge appears in both lists, a self-loop once. Weighted degree counts a
    self-loop twice, total weight m counts every edge (and loop) once, so
    m == sum(degrees) / 2 exactly.
    """

    node_ids: list[str]
    adj: list[list[tuple[int, float]]]

    @property
    def n(self) -> int:
        return len(self.node_ids)

    def edges(self):
        """Yield (i, j, w) with i <= j, each edge once, sorted."""
        for i, nbrs in enumerate(self.adj):
            for j, w in nbrs:
                if i <= j:
                    yield i, j, w

    def edge_count(self) -> int:
        return sum(1 for _ in self.edges())

    def degrees(self) -> list[float]:
        out = []
        for i, nbrs in enumerate(self.adj):
            k = 0.0
            for j, w in nbrs:
                k += 2.0 * w if j == i else w
            out.append(k)
        return out

    def total_weight(self) -> float:
        """m: every undirected edge once, self-loops once."""
        return sum(w for _, _, w in self.edges())

    def sorted_edge_ids(self) -> list[tuple[str, str, float]]:
        """Edges as id pairs, canonical order — for isomorphism checks."""
        rows = []
        for i, j, w in self.edges():
            a, b = sorted((self.node_ids[i], self.node_ids[j]))
            rows.append((a, b, w))
        return sorted(rows)


def graph_from_edges(
    node_ids: list[str], edges: list[tuple[int, int, float]]
) -> SimilarityGraph:
    adj: list[list[tuple[int, float]]] = [[] for _ in node_ids]
    for i, j, w in edges:
        if i == j:
            adj[i].append((i, w))
        else:
            adj[i].append((j, w))
            adj[j].append((i, w))
    for lst in adj:
        lst.sort()
    return SimilarityGraph(node_ids=list(node_ids), adj=adj)


def candidate_pairs(corpus: Corpus, mode: str = "all") -> list[tuple[int, int]]:
    """Unordered index pairs to classify, lexicographically ordered.

    ``all``: every C(N,2) pair. ``blocked``: only pairs sharing at least
    one non-stopword word unigram, found through an inverted index.
    """
    n = len(corpus)
    if mode == "all":
        return [(i, j) for i in range(n) for j in range(i + 1, n)]
    if mode != "blocked":
        raise ValueError(f"unknown pairing mode {mode!r}")
    index: dict[str, list[int]] = {}
    for i, post in enumerate(corpus):
        tokens = textkit.token_sets(post.text).word_unigrams - STOPWORDS
        for tok in tokens:
            index.setdefault(tok, []).append(i)
    pairs: set[tuple[int, int]] = set()
    for postings in index.values():
        for a in range(len(postings)):
            for b in range(a + 1, len(postings)):
                pairs.add((postings[a], postings[b]))
    return sorted(pairs)


def build_graph(
    corpus: Corpus,
    model: ParaphraseModel,
    mode: str = "all",
    weighted: bool = False,
) -> SimilarityGraph:
    """Classify candidate pairs and assemble the graph.

    Edge weight is 1 unless ``weighted``, which stores the positive margin
    (for weighted community detection).
    """
    texts = [p.text for p in corpus]
    node_ids = [p.id for p in corpus]
    scorer = PairScorer(model, texts)
    if mode == "all":
        ii, jj, margins = scorer.accept_all()
    else:
        cand = candidate_pairs(corpus, mode)
        if cand:
            ci = np.asarray([a for a, _ in cand], dtype=np.int64)
            cj = np.asarray([b for _, b in cand], dtype=np.int64)
            m = scorer.score(ci, cj)
            keep = m > 0.0
            ii, jj, margins = ci[keep], cj[keep], m[keep]
        else:
            ii = jj = np.empty(0, dtype=np.int64)
            margins = np.empty(0, dtype=np.float64)
    edges = [
        (int(a), int(b), float(w) if weighted else 1.0)
        for a, b, w in zip(ii, jj, margins)
    ]
    return graph_from_edges(node_ids, edges)


def induced_subgraph(g: SimilarityGraph, keep: list[int]) -> SimilarityGraph:
    """Subgraph on the given node indices (order preserved).

    Equals building the graph from the sub-corpus directly: pair margins
    depend only on the two posts and the model.
    """
    remap = {old: new for new, old in enumerate(keep)}
    node_ids = [g.node_ids[i] for i in keep]
    edges = []
    for i, j, w in g.edges():
        a, b = remap.get(i), remap.get(j)
        if a is not None and b is not None:
            edges.append((min(a, b), max(a, b), w))
    return graph_from_edges(node_ids, edges)


# --- persistence -----------------------------------------------------------

def _format_weight(w: float) -> str:
    return repr(w)


def save_graph(g: SimilarityGraph, path: str | Path):
    """Canonical text format; re-saving a loaded graph is bit-identical."""
    lines = [f"nodes {g.n} edges {g.edge_count()}"]
    for node_id in g.node_ids:
        if "\n" in node_id or "\r" in node_id:
            raise GraphFormatError(f"node id {node_id!r} contains a newline")
        lines.append(node_id)
    for i, j, w in sorted(g.edges()):
        lines.append(f"{i} {j} {_format_weight(w)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_graph(path: str | Path) -> SimilarityGraph:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise GraphFormatError(f"{path}:1: empty graph file")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "nodes" or header[2] != "edges":
        raise GraphFormatError(f"{path}:1: bad header {lines[0]!r}")
    try:
        n, m = int(header[1]), int(header[3])
    except ValueError as exc:
        raise GraphFormatError(f"{path}:1: bad header counts") from exc
    if len(lines) != 1 + n + m:
        raise GraphFormatError(
            f"{path}: expected {1 + n + m} lines, found {len(lines)}"
        )
    node_ids = lines[1 : 1 + n]
    edges = []
    for k, line in enumerate(lines[1 + n :], start=2 + n):
        parts = line.split()
        if len(parts) != 3:
            raise GraphFormatError(f"{path}:{k}: bad edge line {line!r}")
        try:
            i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise GraphFormatError(f"{path}:{k}: bad edge line {line!r}") from exc
        if not (0 <= i <= j < n):
            raise GraphFormatError(f"{path}:{k}: edge {i}-{j} out of range")
        edges.append((i, j, w))
    return graph_from_edges(node_ids, edges)
