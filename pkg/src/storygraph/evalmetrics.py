"""Chance-corrected partition agreement scores.

Both scores are exact-arithmetic friendly: pair counts use integer
binomials, the expected-information baseline sums the hypergeometric
distribution term by term through log-gamma, all logs natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .louvain import ClusterHierarchy, cut_to_k


@dataclass(frozen=True)
class Contingency:
    """Cross-tabulation of two partitions of the same n items."""

    n: int
    row_sums: tuple[int, ...]
    col_sums: tuple[int, ...]
    cells: tuple[tuple[int, int, int], ...]  # (row, col, count), count > 0


def contingency(labels_a, labels_b) -> Contingency:
    la, lb = list(labels_a), list(labels_b)
    if len(la) != len(lb):
        raise ValueError("label sequences differ in length")
    if not la:
        raise ValueError("cannot score empty partitions")
    row_of: dict = {}
    col_of: dict = {}
    counts: dict[tuple[int, int], int] = {}
    for x, y in zip(la, lb):
        i = row_of.setdefault(x, len(row_of))
        j = col_of.setdefault(y, len(col_of))
        counts[i, j] = counts.get((i, j), 0) + 1
    rows = [0] * len(row_of)
    cols = [0] * len(col_of)
    for (i, j), c in counts.items():
        rows[i] += c
        cols[j] += c
    cells = tuple((i, j, c) for (i, j), c in sorted(counts.items()))
    return Contingency(len(la), tuple(rows), tuple(cols), cells)


def adjusted_rand(labels_a, labels_b) -> float:
    """Pair-counting agreement rescaled so random labellings score ~0.

    (sum_ij C(n_ij,2) - E) / (mean of marginal pair sums - E) with
    E = sum_i C(a_i,2) * sum_j C(b_j,2) / C(n,2). A zero denominator only
    happens when both partitions are the same trivial partition: 1.0.
    """
    t = contingency(labels_a, labels_b)
    if t.n < 2:
        raise ValueError("adjusted Rand needs at least 2 items")
    sum_cells = sum(math.comb(c, 2) for _, _, c in t.cells)
    sum_a = sum(math.comb(a, 2) for a in t.row_sums)
    sum_b = sum(math.comb(b, 2) for b in t.col_sums)
    total = math.comb(t.n, 2)
    expected = sum_a * sum_b / total
    denom = 0.5 * (sum_a + sum_b) - expected
    if denom == 0.0:
        return 1.0
    return (sum_cells - expected) / denom


def entropy(counts) -> float:
    """Shannon entropy (nats) of a histogram."""
    n = sum(counts)
    h = 0.0
    for c in counts:
        if c > 0:
            h -= (c / n) * math.log(c / n)
    return h


def mutual_info(t: Contingency) -> float:
    n = t.n
    mi = 0.0
    for i, j, c in t.cells:
        mi += (c / n) * (math.log(n * c) - math.log(t.row_sums[i] * t.col_sums[j]))
    return mi


def expected_mutual_info(t: Contingency) -> float:
    """E[MI] over all tables with the observed margins (hypergeometric
    cell model), summed exactly cell value by cell value."""
    n = t.n
    lf = [math.lgamma(x + 1) for x in range(n + 1)]
    total = 0.0
    for a in t.row_sums:
        for b in t.col_sums:
            lo = max(1, a + b - n)
            hi = min(a, b)
            log_margin = lf[a] + lf[b] + lf[n - a] + lf[n - b] - lf[n]
            for x in range(lo, hi + 1):
                log_p = log_margin - (
                    lf[x] + lf[a - x] + lf[b - x] + lf[n - a - b + x]
                )
                total += (
                    (x / n)
                    * (math.log(n * x) - math.log(a * b))
                    * math.exp(log_p)
                )
    return total


def adjusted_mutual_info(labels_a, labels_b, average: str = "arithmetic") -> float:
    """(MI - E[MI]) / (avg entropy - E[MI]), natural logs.

    ``average`` picks the normalizer: "arithmetic" (default) or "max".
    Degenerate normalizer (both partitions trivial) scores 1.0 when MI
    equals its chance baseline, else 0.0.
    """
    t = contingency(labels_a, labels_b)
    mi = mutual_info(t)
    emi = expected_mutual_info(t)
    h_a = entropy(t.row_sums)
    h_b = entropy(t.col_sums)
    if average == "arithmetic":
        norm = 0.5 * (h_a + h_b)
    elif average == "max":
        norm = max(h_a, h_b)
    else:
        raise ValueError(f"unknown average {average!r}")
    denom = norm - emi
    if denom == 0.0:
        return 1.0 if mi == emi else 0.0
    return (mi - emi) / denom


# --- benchmark scoring -------------------------------------------------------

@dataclass(frozen=True)
class ReportRow:
    name: str
    k: int
    n_clusters: int
    covered: int  # posts the method actually clustered
    ari: float
    ami: float


def score_hierarchy(
    truth: dict[str, str], h: ClusterHierarchy, k: int,
    average: str = "arithmetic",
) -> ReportRow:
    """Score one hierarchy against ground truth over the full id universe.

    The hierarchy is cut to k (capped at its node count); every truth id
    the method never clustered counts as its own singleton, so dropping
    posts is never free agreement.
    """
    unknown = [i for i in h.node_ids if i not in truth]
    if unknown:
        raise ValueError(f"hierarchy ids missing from truth: {unknown[:3]}")
    eff_k = min(k, len(h.node_ids))
    part = cut_to_k(h, eff_k)
    predicted = {nid: f"c{c}" for nid, c in zip(h.node_ids, part.assignment)}
    universe = sorted(truth)
    pred_labels = [predicted.get(i, f"dropped:{i}") for i in universe]
    true_labels = [truth[i] for i in universe]
    return ReportRow(
        name=h.algorithm,
        k=eff_k,
        n_clusters=part.n_communities,
        covered=len(h.node_ids),
        ari=adjusted_rand(true_labels, pred_labels),
        ami=adjusted_mutual_info(true_labels, pred_labels, average=average),
    )


def benchmark_report(
    truth: dict[str, str], hierarchies: dict[str, ClusterHierarchy], k: int,
    average: str = "arithmetic",
) -> list[ReportRow]:
    rows = []
    for name in hierarchies:
        row = score_hierarchy(truth, hierarchies[name], k, average=average)
        rows.append(ReportRow(name, row.k, row.n_clusters, row.covered,
                              row.ari, row.ami))
    return rows


def report_to_tsv(rows: list[ReportRow]) -> str:
    out = ["method\tk\tclusters\tcovered\tari\tami"]
    for r in rows:
        out.append(
            f"{r.name}\t{r.k}\t{r.n_clusters}\t{r.covered}\t{r.ari!r}\t{r.ami!r}"
        )
    return "\n".join(out) + "\n"


def format_report(rows: list[ReportRow]) -> str:
    header = f"{'method':<12} {'k':>5} {'clusters':>9} {'covered':>8} {'ARI':>8} {'AMI':>8}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.name:<12} {r.k:>5} {r.n_clusters:>9} {r.covered:>8} "
            f"{r.ari:>8.4f} {r.ami:>8.4f}"
        )
    return "\n".join(lines)
