"""Average-linkage agglomerative clustering over tf-idf vectors.

The comparison baseline: cosine similarity matrix, repeatedly merge the
most-similar pair of clusters, cluster-pair similarity maintained with the
exact weighted-average update, so a k-cluster cut never needs the O(n^3)
recomputation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .louvain import ClusterHierarchy, Partition
from .textkit import TfIdfVector


class HacError(Exception):
    pass


@dataclass(frozen=True)
class Dendrogram:
    """Merge history: ids 0..n-1 are leaves, merge t creates id n+t.

    Each merge is (id_a, id_b, similarity) with id_a < id_b; similarities
    are nonincreasing because an averaged similarity never exceeds the
    similarities it averages.
    """

    n_leaves: int
    merges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if self.n_leaves < 1:
            raise HacError("dendrogram needs at least one leaf")
        if len(self.merges) != self.n_leaves - 1:
            raise HacError("a full dendrogram has n-1 merges")


def similarity_matrix(vectors: list[TfIdfVector]) -> np.ndarray:
    """Dense pairwise cosine matrix (unit diagonal not forced; a zero
    vector has similarity 0 with everything including itself)."""
    n = len(vectors)
    terms = sorted({t for v in vectors for t in v.weights})
    col = {t: i for i, t in enumerate(terms)}
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for v in vectors:
        norm = v.norm
        for t in sorted(v.weights):
            indices.append(col[t])
            data.append(v.weights[t] / norm if norm > 0.0 else 0.0)
        indptr.append(len(indices))
    x = sp.csr_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.int64), np.asarray(indptr)),
        shape=(n, max(len(terms), 1)),
    )
    return np.asarray((x @ x.T).todense(), dtype=np.float64)


def hac_cluster(vectors: list[TfIdfVector], max_n: int = 20000) -> Dendrogram:
    """Merge order by highest average cosine; ties take the smallest
    (row, column) slot pair. New clusters keep the lower slot."""
    n = len(vectors)
    if n == 0:
        raise HacError("cannot cluster zero vectors")
    if n > max_n:
        raise HacError(f"{n} vectors exceeds the cap of {max_n}")
    if n == 1:
        return Dendrogram(1, ())
    s = similarity_matrix(vectors)
    np.fill_diagonal(s, -np.inf)
    cluster_of_slot = list(range(n))
    sizes = np.ones(n, dtype=np.float64)
    merges: list[tuple[int, int, float]] = []
    for t in range(n - 1):
        flat = int(np.argmax(s))
        i, j = divmod(flat, n)
        if i > j:
            i, j = j, i
        sim = float(s[i, j])
        ca, cb = cluster_of_slot[i], cluster_of_slot[j]
        merges.append((min(ca, cb), max(ca, cb), sim))
        # exact average-linkage update: weighted mean of the two rows
        ni, nj = sizes[i], sizes[j]
        row = (ni * s[i, :] + nj * s[j, :]) / (ni + nj)
        s[i, :] = row
        s[:, i] = row
        s[i, i] = -np.inf
        s[j, :] = -np.inf
        s[:, j] = -np.inf
        sizes[i] = ni + nj
        cluster_of_slot[i] = n + t
    return Dendrogram(n, tuple(merges))


def cut_dendrogram(d: Dendrogram, k: int) -> Partition:
    """Partition after the first n-k merges, labels in leaf order."""
    n = d.n_leaves
    if not 1 <= k <= n:
        raise HacError(f"k={k} outside 1..{n}")
    parent = list(range(n + len(d.merges)))
    for t in range(n - k):
        a, b, _ = d.merges[t]
        parent[a] = n + t
        parent[b] = n + t
    labels = []
    for leaf in range(n):
        node = leaf
        while parent[node] != node:
            node = parent[node]
        labels.append(node)
    return Partition.from_labels(labels)


def default_level_counts(n: int) -> list[int]:
    """n, n/2, n/4, ... down to 1 (integer halving, deduplicated)."""
    counts = []
    c = n
    while c > 1:
        counts.append(c)
        c //= 2
    counts.append(1)
    return counts


def dendrogram_to_hierarchy(
    d: Dendrogram,
    node_ids: list[str],
    level_counts: list[int] | None = None,
    params: dict | None = None,
) -> ClusterHierarchy:
    """Materialize cuts at the given counts (strictly descending) as a
    hierarchy; modularity entries are None, the merge criterion is cosine.
    """
    if len(node_ids) != d.n_leaves:
        raise HacError("node id count does not match dendrogram")
    if level_counts is None:
        level_counts = default_level_counts(d.n_leaves)
    if not level_counts:
        raise HacError("need at least one level count")
    for a, b in zip(level_counts, level_counts[1:]):
        if b >= a:
            raise HacError("level counts must be strictly descending")
    if level_counts[0] > d.n_leaves or level_counts[-1] < 1:
        raise HacError("level counts outside 1..n")
    levels = [cut_dendrogram(d, k) for k in level_counts]
    return ClusterHierarchy(
        node_ids=list(node_ids),
        levels=levels,
        modularity_per_level=[None] * len(levels),
        algorithm="hac",
        params=dict(params or {}),
    )
