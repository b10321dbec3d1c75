"""Greedy modularity community detection and the cluster hierarchy type.

Modularity uses the standard convention where the adjacency diagonal holds
twice the self-loop weight, so collapsing a partition into an aggregate
graph preserves Q exactly and per-level scores stay comparable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .simgraph import SimilarityGraph, graph_from_edges

HIERARCHY_FORMAT = "storygraph-hierarchy/1"

# a move must beat staying put by this much; guards float-noise cycling
MIN_GAIN = 1e-12


class HierarchyError(Exception):
    pass


@dataclass(frozen=True)
class Partition:
    """Community assignment, one label per node, labels contiguous from 0
    in order of first appearance."""

    assignment: tuple[int, ...]

    def __post_init__(self):
        seen: dict[int, None] = {}
        for c in self.assignment:
            if c not in seen:
                if c != len(seen):
                    raise ValueError("labels must be contiguous, first-seen order")
                seen[c] = None

    @staticmethod
    def from_labels(labels) -> "Partition":
        remap: dict = {}
        out = []
        for lab in labels:
            if lab not in remap:
                remap[lab] = len(remap)
            out.append(remap[lab])
        return Partition(tuple(out))

    @staticmethod
    def singletons(n: int) -> "Partition":
        return Partition(tuple(range(n)))

    @property
    def n_communities(self) -> int:
        return max(self.assignment) + 1 if self.assignment else 0

    def members(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_communities)]
        for i, c in enumerate(self.assignment):
            out[c].append(i)
        return out

    def sizes(self) -> list[int]:
        counts = [0] * self.n_communities
        for c in self.assignment:
            counts[c] += 1
        return counts


def modularity(g: SimilarityGraph, p: Partition) -> float:
    """Q = sum_c [S_in(c)/2m - (S_tot(c)/2m)^2].

    S_in counts internal adjacency both ways (a self-loop contributes 2w),
    S_tot sums weighted degrees (a self-loop adds 2w to its node's degree).
    """
    if len(p.assignment) != g.n:
        raise ValueError("partition size does not match graph")
    m = g.total_weight()
    if m <= 0.0:
        raise ValueError("modularity undefined for total weight 0")
    nc = p.n_communities
    s_in = [0.0] * nc
    s_tot = [0.0] * nc
    for i, k in enumerate(g.degrees()):
        s_tot[p.assignment[i]] += k
    for i, j, w in g.edges():
        if p.assignment[i] == p.assignment[j]:
            s_in[p.assignment[i]] += 2.0 * w
    m2 = 2.0 * m
    q = 0.0
    for c in range(nc):
        q += s_in[c] / m2 - (s_tot[c] / m2) ** 2
    return q


def move_gain(g: SimilarityGraph, p: Partition, node: int, target: int) -> float:
    """Exact Q(after) - Q(before) for relabelling one node.

    Closed form: self-loop and k_i^2 terms cancel between the remove and
    insert halves, leaving only link weights to the two communities.
    """
    a = p.assignment[node]
    if target == a:
        return 0.0
    m2 = 2.0 * g.total_weight()
    k_i = 0.0
    k_to_a = 0.0
    k_to_t = 0.0
    for j, w in g.adj[node]:
        if j == node:
            k_i += 2.0 * w
            continue
        k_i += w
        if p.assignment[j] == a:
            k_to_a += w
        elif p.assignment[j] == target:
            k_to_t += w
    degs = g.degrees()
    s_tot_a = sum(degs[i] for i in range(g.n) if p.assignment[i] == a)
    s_tot_t = sum(degs[i] for i in range(g.n) if p.assignment[i] == target)
    return (
        2.0 * (k_to_t - k_to_a) / m2
        + 2.0 * k_i * (s_tot_a - k_i - s_tot_t) / (m2 * m2)
    )


def local_move_pass(
    g: SimilarityGraph, p: Partition, seed: int = 0
) -> tuple[Partition, bool]:
    """One full round of greedy single-node moves until a sweep is quiet.

    Node order is one seeded shuffle reused for every sweep. Each node
    considers its neighbors' communities and takes the best positive gain;
    ties prefer the lowest community label.
    """
    n = g.n
    if len(p.assignment) != n:
        raise ValueError("partition size does not match graph")
    m2 = 2.0 * g.total_weight()
    if m2 <= 0.0:
        raise ValueError("cannot move nodes in a graph with total weight 0")
    comm = list(p.assignment)
    degs = g.degrees()
    s_tot = [0.0] * (max(comm) + 1)
    for i, c in enumerate(comm):
        s_tot[c] += degs[i]
    self_w = [0.0] * n
    for i in range(n):
        for j, w in g.adj[i]:
            if j == i:
                self_w[i] = w
    order = np.random.default_rng(seed).permutation(n)
    improved = False
    moved = True
    while moved:
        moved = False
        for idx in order:
            i = int(idx)
            a = comm[i]
            k_i = degs[i]
            links: dict[int, float] = {}
            for j, w in g.adj[i]:
                if j != i:
                    links[comm[j]] = links.get(comm[j], 0.0) + w
            k_to_a = links.get(a, 0.0)
            best_c = a
            best_gain = 0.0
            # ascending labels: the first community reaching the best gain
            # wins, so ties resolve to the lowest label
            for c in sorted(links):
                if c == a:
                    continue
                gain = (
                    2.0 * (links[c] - k_to_a) / m2
                    + 2.0 * k_i * (s_tot[a] - k_i - s_tot[c]) / (m2 * m2)
                )
                if gain > best_gain + MIN_GAIN:
                    best_gain = gain
                    best_c = c
            if best_c != a:
                comm[i] = best_c
                s_tot[a] -= k_i
                s_tot[best_c] += k_i
                moved = True
                improved = True
    return Partition.from_labels(comm), improved


def aggregate(g: SimilarityGraph, p: Partition) -> SimilarityGraph:
    """Collapse each community to one node; parallel edges sum, internal
    edges (and old loops) become self-loops. Q of any coarser partition is
    unchanged by construction."""
    if len(p.assignment) != g.n:
        raise ValueError("partition size does not match graph")
    acc: dict[tuple[int, int], float] = {}
    for i, j, w in g.edges():
        ci, cj = p.assignment[i], p.assignment[j]
        key = (min(ci, cj), max(ci, cj))
        acc[key] = acc.get(key, 0.0) + w
    node_ids = [str(c) for c in range(p.n_communities)]
    edges = [(i, j, w) for (i, j), w in sorted(acc.items())]
    return graph_from_edges(node_ids, edges)


@dataclass
class ClusterHierarchy:
    """Nested partitions of one node set, finest first, coarsest last.

    ``modularity_per_level[t]`` is None when Q is undefined (edgeless
    graph) or not meaningful for the producing algorithm.
    """

    node_ids: list[str]
    levels: list[Partition]
    modularity_per_level: list[float | None]
    algorithm: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.levels:
            raise HierarchyError("hierarchy needs at least one level")
        if len(self.levels) != len(self.modularity_per_level):
            raise HierarchyError("one modularity entry per level required")
        for t, lv in enumerate(self.levels):
            if len(lv.assignment) != len(self.node_ids):
                raise HierarchyError(f"level {t} has wrong node count")
        for t in range(1, len(self.levels)):
            if not _is_coarsening(self.levels[t - 1], self.levels[t]):
                raise HierarchyError(f"level {t} does not nest level {t - 1}")

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    def level_sizes(self) -> list[int]:
        return [lv.n_communities for lv in self.levels]


def _is_coarsening(fine: Partition, coarse: Partition) -> bool:
    mapping: dict[int, int] = {}
    for f, c in zip(fine.assignment, coarse.assignment):
        if f in mapping:
            if mapping[f] != c:
                return False
        else:
            mapping[f] = c
    return True


def louvain_hierarchy(
    g: SimilarityGraph, seed: int = 0, params: dict | None = None
) -> ClusterHierarchy:
    """Full multi-level optimization: move pass, collapse, repeat until a
    pass makes no move. Level t holds the projection onto original nodes.

    An edgeless graph yields a single singleton level with Q undefined.
    """
    run_params = {"seed": seed}
    if params:
        run_params.update(params)
    if g.total_weight() <= 0.0:
        return ClusterHierarchy(
            node_ids=list(g.node_ids),
            levels=[Partition.singletons(g.n)],
            modularity_per_level=[None],
            algorithm="louvain",
            params=run_params,
        )
    levels: list[Partition] = []
    mods: list[float | None] = []
    work = g
    projection = list(range(g.n))  # original node -> work-graph node
    level_seed = seed
    while True:
        part, improved = local_move_pass(work, Partition.singletons(work.n), level_seed)
        if not improved and levels:
            break
        projected = Partition.from_labels(
            [part.assignment[projection[i]] for i in range(g.n)]
        )
        levels.append(projected)
        mods.append(modularity(g, projected))
        if not improved:
            break
        if part.n_communities == work.n:
            break
        projection = [part.assignment[projection[i]] for i in range(g.n)]
        work = aggregate(work, part)
        level_seed += 1
    return ClusterHierarchy(
        node_ids=list(g.node_ids),
        levels=levels,
        modularity_per_level=mods,
        algorithm="louvain",
        params=run_params,
    )


def cut_to_k(h: ClusterHierarchy, k: int) -> Partition:
    """Partition with exactly k communities from the hierarchy.

    Uses a matching stored level when one exists (the singleton partition
    counts as an implicit finest level). Otherwise takes the nearest
    coarser level and peels sub-communities off its largest communities,
    one per step, using the next-finer level's structure, until the count
    reaches k. If every level is already coarser than k would allow
    (k below the coarsest count), the coarsest level is returned as-is:
    inventing merges the algorithm never made would fabricate clusters.
    """
    n = len(h.node_ids)
    if not 1 <= k <= n:
        raise HierarchyError(f"k={k} outside 1..{n}")
    stored = [Partition.singletons(n)] + list(h.levels)
    counts = [lv.n_communities for lv in stored]
    for t in range(len(stored) - 1, -1, -1):
        if counts[t] == k:
            return stored[t]
    coarser = [t for t in range(len(stored)) if counts[t] < k]
    if not coarser:
        return stored[len(stored) - 1]
    # nearest coarser level; for equal counts prefer the finer level so the
    # step below it still has sub-structure to split with
    base_t = min(coarser, key=lambda t: (k - counts[t], t))
    finer = stored[base_t - 1]
    comm = list(stored[base_t].assignment)
    next_label = max(comm) + 1
    count = len(set(comm))
    while count < k:
        sizes: dict[int, int] = {}
        for c in comm:
            sizes[c] = sizes.get(c, 0) + 1
        # sub-parts of each community under the finer level
        split_done = False
        for c, _ in sorted(sizes.items(), key=lambda kv: (-kv[1], kv[0])):
            parts: dict[int, list[int]] = {}
            for i in range(n):
                if comm[i] == c:
                    parts.setdefault(finer.assignment[i], []).append(i)
            if len(parts) < 2:
                continue
            # detach the largest sub-part (ties: lowest finer label)
            target = max(parts.items(), key=lambda kv: (len(kv[1]), -kv[0]))[0]
            for i in parts[target]:
                comm[i] = next_label
            next_label += 1
            count += 1
            split_done = True
            break
        if not split_done:
            break  # nothing splittable; closest achievable count
    return Partition.from_labels(comm)


# --- persistence -----------------------------------------------------------

def hierarchy_to_dict(h: ClusterHierarchy) -> dict:
    return {
        "format": HIERARCHY_FORMAT,
        "algorithm": h.algorithm,
        "params": h.params,
        "node_ids": list(h.node_ids),
        "levels": [list(lv.assignment) for lv in h.levels],
        "modularity_per_level": list(h.modularity_per_level),
    }


def hierarchy_from_dict(data: dict) -> ClusterHierarchy:
    if data.get("format") != HIERARCHY_FORMAT:
        raise HierarchyError(f"unsupported hierarchy format {data.get('format')!r}")
    return ClusterHierarchy(
        node_ids=list(data["node_ids"]),
        levels=[Partition(tuple(lv)) for lv in data["levels"]],
        modularity_per_level=[
            None if q is None else float(q) for q in data["modularity_per_level"]
        ],
        algorithm=data["algorithm"],
        params=dict(data.get("params", {})),
    )


def save_hierarchy(h: ClusterHierarchy, path: str | Path):
    payload = json.dumps(hierarchy_to_dict(h), ensure_ascii=False, sort_keys=True)
    Path(path).write_text(payload + "\n", encoding="utf-8", newline="\n")


def load_hierarchy(path: str | Path) -> ClusterHierarchy:
    with open(path, encoding="utf-8") as fh:
        return hierarchy_from_dict(json.load(fh))
