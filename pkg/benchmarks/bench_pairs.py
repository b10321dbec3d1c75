"""Time the pair-scoring kernels, compiled vs pure Python.

Builds a synthetic corpus, packs it once, then drives every importable
backend over the same arrays: full all-pairs acceptance plus a fixed
random pair subset.  Outputs are compared for bit equality before any
timing is reported, so the table can't hide a divergence.

Usage: python3 benchmarks/bench_pairs.py [--posts 2000] [--repeats 3]
"""

import argparse
import sys
import time

import numpy as np

from storygraph import bench, kernels
from storygraph.paraphrase import PairScorer


def _time_best(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--posts", type=int, default=2000)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--subset", type=int, default=200_000,
                        help="random pair count for the score_pairs timing")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    stories = max(1, min(21, args.posts // 100))
    per_story = max(1, args.posts // (2 * stories))
    rest = args.posts - stories * per_story
    data = bench.generate_benchmark(
        n_stories=stories,
        tweets_per_story=per_story,
        noise_count=min(600, rest // 2),
        chatter_count=rest - min(600, rest // 2),
        seed=args.seed,
    )
    texts = [p.text for p in data.corpus]
    n = len(texts)
    n_pairs = n * (n - 1) // 2
    print(f"corpus: {n} posts, {n_pairs} unordered pairs")

    _, p_model = bench.train_seed_models(seed=args.seed)
    scorer = PairScorer(p_model, texts)
    packed = (
        scorer.w_ids, scorer.w_off, scorer.c_ids, scorer.c_off,
        scorer.mean, scorer.std, scorer.weights, scorer.bias,
    )
    rng = np.random.default_rng(args.seed)
    ii = rng.integers(0, n, size=args.subset, dtype=np.int64)
    jj = rng.integers(0, n, size=args.subset, dtype=np.int64)

    backends = kernels.backends()
    print(f"backends: {', '.join(sorted(backends))} (active: {kernels.BACKEND})")

    results = {}
    for name in sorted(backends):
        mod = backends[name]
        results[name] = (
            mod.accept_all_pairs(*packed),
            mod.score_pairs(*packed, ii, jj),
        )
    names = sorted(results)
    ref = results[names[0]]
    for name in names[1:]:
        got = results[name]
        same = all(np.array_equal(a, b) for a, b in zip(ref, got))
        if not same:
            print(f"FATAL: {names[0]} and {name} disagree; timings withheld")
            return 1
    print(f"outputs bit-identical across backends "
          f"({len(ref[0][0])} edges, {args.subset} subset margins)")

    rows = []
    for name in sorted(backends):
        mod = backends[name]
        t_all = _time_best(lambda: mod.accept_all_pairs(*packed), args.repeats)
        t_sub = _time_best(lambda: mod.score_pairs(*packed, ii, jj), args.repeats)
        rows.append((name, t_all, n_pairs / t_all, t_sub, args.subset / t_sub))

    base = max(t for _, t, _, _, _ in rows)
    print(f"\n{'backend':<10} {'all-pairs':>10} {'pairs/s':>12} "
          f"{'subset':>10} {'pairs/s':>12} {'speedup':>8}")
    for name, t_all, rate_all, t_sub, rate_sub in rows:
        print(f"{name:<10} {t_all:>9.3f}s {rate_all:>12,.0f} "
              f"{t_sub:>9.3f}s {rate_sub:>12,.0f} {base / t_all:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
