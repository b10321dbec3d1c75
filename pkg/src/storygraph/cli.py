"""Command-line entry point.

Subcommands: ingest, train-assertion, train-paraphrase, run, bench, eval,
serve. Exit codes: 0 success, 1 usage, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from . import assertion as assertion_mod
from . import bench as bench_mod
from . import evalmetrics
from . import linear_model
from . import louvain as louvain_mod
from . import paraphrase as paraphrase_mod
from . import pipeline as pipeline_mod
from . import service
from .corpus import (
    Corpus, CorpusError, QueryError, collapse_duplicate_texts, filter_corpus,
    load_corpus, parse_query,
)

DATA_ERRORS = (
    CorpusError,
    QueryError,
    linear_model.TrainingError,
    assertion_mod.AssertionError_,
    pipeline_mod.PipelineError,
    service.ServiceError,
    FileNotFoundError,
    IsADirectoryError,
    json.JSONDecodeError,
    ValueError,
)


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; this tool
    reserves 2 for data errors and reports usage problems as 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="storygraph", description=__doc__)
    parser.add_argument("--version", action="version", version=f"storygraph {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="load, query-filter, and re-emit a corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="jsonl", choices=("jsonl", "csv"))
    p.add_argument("--query", default=None)
    p.add_argument("--collapse-duplicates", action="store_true")
    p.add_argument("--output", default=None, help="write the surviving posts as jsonl")

    p = sub.add_parser("train-assertion", help="train the assertion filter model")
    p.add_argument("--data", default=None, help="labeled jsonl; default: shipped seed set")
    p.add_argument("--output", required=True)
    p.add_argument("--lam", type=float, default=1e-4)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kfold", type=int, default=0, help="also report k-fold CV F1")

    p = sub.add_parser("train-paraphrase", help="train the paraphrase pair model")
    p.add_argument("--data", default=None, help="pair tsv; default: shipped seed set")
    p.add_argument("--output", required=True)
    p.add_argument("--lam", type=float, default=1e-4)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--holdout", type=float, default=0.0,
                   help="fraction held out for an F1 report (0 = train on all)")

    p = sub.add_parser("run", help="run the full pipeline and persist artifacts")
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="jsonl", choices=("jsonl", "csv"))
    p.add_argument("--query", default=None)
    p.add_argument("--mode", default="ad_louvain", choices=pipeline_mod.MODES)
    p.add_argument("--assertion-model", default=None)
    p.add_argument("--paraphrase-model", default=None)
    p.add_argument("--pairing", default="auto", choices=("auto", "all", "blocked"))
    p.add_argument("--weighted-edges", action="store_true")
    p.add_argument("--collapse-duplicates", action="store_true")
    p.add_argument("--train-seed", type=int, default=0)
    p.add_argument("--louvain-seed", type=int, default=0)
    p.add_argument("--bench-seed", type=int, default=0)
    p.add_argument("--level-counts", default=None,
                   help="hac cut sizes, comma-separated descending")
    p.add_argument("--eval-k", type=int, default=None)
    p.add_argument("--hac-max-n", type=int, default=20000)
    p.add_argument("--out", default="out")
    p.add_argument("--run-id", default=None)

    p = sub.add_parser("bench", help="generate the synthetic benchmark; optionally compare modes")
    p.add_argument("--out", required=True)
    p.add_argument("--stories", type=int, default=21)
    p.add_argument("--per-story", default="30", help="count or LO:HI range")
    p.add_argument("--noise", type=int, default=600)
    p.add_argument("--chatter", type=int, default=600)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--compare", action="store_true",
                   help="train seed models and score every mode")
    p.add_argument("--seeds", default=None,
                   help="benchmark seeds for --compare, e.g. 0-9 or 0,3,7")
    p.add_argument("--modes", default="control,hac,ad_hac,louvain,ad_louvain")
    p.add_argument("--k", type=int, default=21)
    p.add_argument("--train-seed", type=int, default=0)
    p.add_argument("--louvain-seed", type=int, default=0)

    p = sub.add_parser("eval", help="score hierarchies against a truth file")
    p.add_argument("--truth", required=True)
    p.add_argument("--hierarchy", action="append", required=True,
                   metavar="NAME=PATH", help="repeatable")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ami-normalizer", default="arithmetic",
                   choices=("arithmetic", "max"))
    p.add_argument("--tsv", default=None, help="also write the machine-readable table")

    p = sub.add_parser("serve", help="serve a finished run over HTTP")
    p.add_argument("run_dir")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--ui-dir", default=None)

    return parser


def _parse_range(text: str) -> tuple[int, int] | int:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return int(lo), int(hi)
    return int(text)


def _parse_seed_list(text: str) -> list[int]:
    if "-" in text and "," not in text:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in text.split(",") if s.strip()]


def _cmd_ingest(args) -> int:
    corpus, warnings = load_corpus(args.input, args.format)
    print(f"ingested\t{len(corpus)}")
    print(f"warnings\t{warnings}")
    if args.query:
        corpus = filter_corpus(corpus, parse_query(args.query))
        print(f"matched\t{len(corpus)}")
    if args.collapse_duplicates:
        corpus, collapsed = collapse_duplicate_texts(corpus)
        print(f"collapsed\t{collapsed}")
    if args.output:
        rows = [
            json.dumps(
                {"id": p.id, "text": p.text, "author": p.author,
                 "created_at": p.created_at, "is_repost": p.is_repost,
                 "repost_of": p.repost_of},
                ensure_ascii=False, sort_keys=True)
            for p in corpus
        ]
        Path(args.output).write_text("\n".join(rows) + "\n", encoding="utf-8")
        print(f"written\t{len(corpus)}\t{args.output}")
    return 0


def _cmd_train_assertion(args) -> int:
    data_path = Path(args.data) if args.data else bench_mod.seed_assertion_path()
    labeled = assertion_mod.load_labeled_texts(data_path)
    model, feat = assertion_mod.train_assertion_model(
        labeled, lam=args.lam, epochs=args.epochs, seed=args.seed
    )
    assertion_mod.save_assertion_model(model, feat, args.output)
    print(f"trained on {len(labeled)} texts -> {args.output}")
    if args.kfold:
        feats = [(assertion_mod.featurize(feat, t), y) for t, y in labeled]
        scores, mean = linear_model.evaluate_kfold(
            feats, k=args.kfold, seed=args.seed, lam=args.lam, epochs=args.epochs
        )
        print(f"{args.kfold}-fold CV F1: mean={mean:.4f} "
              f"min={min(scores):.4f} max={max(scores):.4f}")
    return 0


def _cmd_train_paraphrase(args) -> int:
    data_path = Path(args.data) if args.data else bench_mod.seed_paraphrase_path()
    pairs, warnings = paraphrase_mod.load_tpc(data_path)
    if warnings:
        print(f"skipped {warnings} malformed lines", file=sys.stderr)
    if not 0.0 <= args.holdout < 1.0:
        raise ValueError("--holdout must be in [0, 1)")
    train_pairs, test_pairs = pairs, []
    if args.holdout > 0.0:
        import numpy as np

        order = np.random.default_rng(args.seed).permutation(len(pairs))
        n_test = int(len(pairs) * args.holdout)
        test_pairs = [pairs[int(i)] for i in order[:n_test]]
        train_pairs = [pairs[int(i)] for i in order[n_test:]]
    model = paraphrase_mod.train_paraphrase(
        train_pairs, lam=args.lam, epochs=args.epochs, seed=args.seed
    )
    paraphrase_mod.save_paraphrase_model(model, args.output)
    print(f"trained on {len(train_pairs)} pairs -> {args.output}")
    if test_pairs:
        tp = fp = fn = tn = 0
        for t1, t2, label in test_pairs:
            pred, _m = paraphrase_mod.is_paraphrase(model, t1, t2)
            if pred and label:
                tp += 1
            elif pred:
                fp += 1
            elif label:
                fn += 1
            else:
                tn += 1
        denom = 2 * tp + fp + fn
        f1 = 2 * tp / denom if denom else 0.0
        print(f"holdout F1: {f1:.4f} (tp={tp} fp={fp} fn={fn} tn={tn})")
    return 0


def _cmd_run(args) -> int:
    level_counts = None
    if args.level_counts:
        level_counts = [int(s) for s in args.level_counts.split(",") if s.strip()]
    config = pipeline_mod.PipelineConfig(
        input_path=args.input,
        input_format=args.format,
        query=args.query,
        mode=args.mode,
        assertion_model=args.assertion_model,
        paraphrase_model=args.paraphrase_model,
        pairing=args.pairing,
        weighted_edges=args.weighted_edges,
        collapse_duplicates=args.collapse_duplicates,
        train_seed=args.train_seed,
        louvain_seed=args.louvain_seed,
        bench_seed=args.bench_seed,
        level_counts=level_counts,
        eval_k=args.eval_k,
        hac_max_n=args.hac_max_n,
        out_dir=args.out,
        run_id=args.run_id,
    )
    report = pipeline_mod.run_pipeline(config)
    print(f"run_id\t{report.run_id}")
    print(f"out\t{Path(args.out) / report.run_id}")
    for key in sorted(report.counts):
        print(f"{key}\t{report.counts[key]}")
    print(f"level_sizes\t{','.join(str(s) for s in report.level_sizes)}")
    biggest = sorted(report.clusters, key=lambda c: (-c.size, c.community))[:10]
    print("top clusters (community, size, top terms):")
    for cs in biggest:
        print(f"  {cs.community}\t{cs.size}\t{' '.join(cs.top_terms)}")
    for stage in sorted(report.timings):
        print(f"time.{stage}\t{report.timings[stage]:.3f}s", file=sys.stderr)
    if report.cache_hit:
        print("graph reused from cache", file=sys.stderr)
    return 0


def _cmd_bench(args) -> int:
    per_story = _parse_range(args.per_story)
    out = Path(args.out)
    modes = tuple(m.strip() for m in args.modes.split(",") if m.strip())
    for m in modes:
        if m not in pipeline_mod.MODES:
            raise ValueError(f"unknown mode {m!r}")
    seeds = _parse_seed_list(args.seeds) if args.seeds else [args.seed]
    models = None
    if args.compare:
        models = bench_mod.train_seed_models(seed=args.train_seed)
    all_rows: list[tuple[int, evalmetrics.ReportRow]] = []
    for bench_seed in seeds:
        data = bench_mod.generate_benchmark(
            n_stories=args.stories,
            tweets_per_story=per_story,
            noise_count=args.noise,
            chatter_count=args.chatter,
            seed=bench_seed,
        )
        seed_dir = out / f"seed-{bench_seed}" if len(seeds) > 1 else out
        corpus_path, truth_path = bench_mod.write_benchmark(data, seed_dir)
        print(f"seed {bench_seed}: wrote {corpus_path} and {truth_path}")
        if args.compare:
            (a_model, a_feat), p_model = models
            results = bench_mod.compare_modes(
                data, (a_model, a_feat), p_model,
                modes=modes, k=args.k, louvain_seed=args.louvain_seed,
            )
            rows = [results[m] for m in modes]
            print(evalmetrics.format_report(rows))
            all_rows.extend((bench_seed, r) for r in rows)
    if args.compare and all_rows:
        lines = ["seed\t" + evalmetrics.report_to_tsv([]).split("\n")[0]]
        for bench_seed, r in all_rows:
            lines.append(f"{bench_seed}\t" + evalmetrics.report_to_tsv([r]).split("\n")[1])
        (out / "bench_report.tsv").write_text(
            "\n".join(lines) + "\n", encoding="utf-8"
        )
        print(f"wrote {out / 'bench_report.tsv'}")
    return 0


def _cmd_eval(args) -> int:
    truth = bench_mod.load_truth(args.truth)
    hierarchies = {}
    for spec_arg in args.hierarchy:
        if "=" in spec_arg:
            name, path = spec_arg.split("=", 1)
        else:
            name, path = Path(spec_arg).parent.name or spec_arg, spec_arg
        hierarchies[name] = louvain_mod.load_hierarchy(path)
    rows = evalmetrics.benchmark_report(
        truth, hierarchies, args.k, average=args.ami_normalizer
    )
    print(evalmetrics.format_report(rows))
    if args.tsv:
        Path(args.tsv).write_text(evalmetrics.report_to_tsv(rows), encoding="utf-8")
    return 0


def _cmd_serve(args) -> int:
    service.serve(args.run_dir, host=args.host, port=args.port, ui_dir=args.ui_dir)
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "train-assertion": _cmd_train_assertion,
    "train-paraphrase": _cmd_train_paraphrase,
    "run": _cmd_run,
    "bench": _cmd_bench,
    "eval": _cmd_eval,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DATA_ERRORS as exc:
        print(f"storygraph: error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 3
    except Exception as exc:  # pragma: no cover - internal failures
        print(f"storygraph: internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
