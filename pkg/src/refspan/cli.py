"""Command line interface: the full pipeline as reproducible subcommands.

Every command reads explicit inputs, funnels all randomness through one
--seed flag, and writes byte-stable outputs (canonical JSON, fixed-width
TSV), so identical inputs and seed give identical files. Exit codes are
a stable contract: 0 success, 1 runtime failure, 2 usage or config
error.

Subcommands: ingest, preprocess, rank, sweep, train-lda, train-embed,
evaluate, significance, report, dataset-stats, corpus-clean, plus the
``lda`` (train/infer) and ``embed`` (train/nn/wmd) command groups that
expose the same training entry points alongside small inspection tools.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import corpus, embed, lda
from .errors import RefspanError, ConfigError
from .evaluate import (
    TSV_HEADER,
    bootstrap_paired_test,
    evaluate,
    json_report,
    paired_stats,
    tsv_row,
)
from .preprocess import PreprocessConfig, preprocess_sentence
from .ranker import (
    RankerConfig,
    build_manifest,
    default_lambda_grid,
    file_checksum,
    gold_map,
    lambda_sweep,
    manifest_ranked_lists,
    manifest_rankings,
    rank_dataset,
    read_manifest,
    write_manifest,
)
from .wordnet import load_lexicon

DATA_ROOT_ENV = "REFSPAN_DATA_ROOT"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

SWEEP_KIND = "sweep_report"
SWEEP_VERSION = 1


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _read_dataset(path: str) -> corpus.Dataset:
    try:
        return corpus.load_jsonl(path)
    except OSError as err:
        raise corpus.MissingFile(f"cannot read dataset {path}: {err}") from None


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _parse_model_args(pairs: list[str]) -> dict[str, str]:
    paths: dict[str, str] = {}
    for pair in pairs or []:
        model_id, sep, path = pair.partition("=")
        if not sep or not model_id or not path:
            raise ConfigError(f"--model expects ID=PATH, got {pair!r}")
        if model_id in paths:
            raise ConfigError(f"duplicate model id {model_id!r}")
        paths[model_id] = path
    return paths


def _load_embedding(path: str) -> embed.EmbeddingTable:
    if path.endswith(".txt"):
        return embed.load_text(path)
    return embed.load_binary(path)


def _load_needed_models(config: RankerConfig, model_paths: dict[str, str]) -> dict:
    spec = config.scorer
    if spec.kind == "tfidf":
        return {}
    if spec.model_id not in model_paths:
        raise ConfigError(
            f"config needs model {spec.model_id!r}; pass --model {spec.model_id}=PATH")
    path = model_paths[spec.model_id]
    if spec.kind == "lda":
        return {spec.model_id: lda.load_model(path)}
    return {spec.model_id: _load_embedding(path)}


def _load_lexicon_if_needed(config: RankerConfig, wordnet_dir: str | None):
    if config.expansion.mode == "none":
        return None
    if wordnet_dir is None:
        raise ConfigError("config uses synonym expansion; pass --wordnet DIR")
    return load_lexicon(wordnet_dir)


def _sentence_corpus(dataset: corpus.Dataset, pre: PreprocessConfig) -> list[list[str]]:
    out = []
    for doc_id in sorted(dataset.documents):
        for s in dataset.documents[doc_id].sentences:
            out.append(list(preprocess_sentence(s.text, pre)))
    return out


def _verify_model_files(hashes_before: dict[str, str], model_paths: dict[str, str]):
    for model_id, path in model_paths.items():
        if file_checksum(path) != hashes_before[model_id]:
            raise RefspanError(f"model file {path} changed during the run")


# ----------------------------------------------------------- commands


def cmd_ingest(args) -> int:
    root = args.root or os.environ.get(DATA_ROOT_ENV)
    if not root:
        raise ConfigError(f"no data root: pass --root or set {DATA_ROOT_ENV}")
    dataset = corpus.load_dataset(root, args.split)
    corpus.dump_jsonl(dataset, args.out)
    print(f"{len(dataset.documents)} docs, {len(dataset.citances)} citances")
    return EXIT_OK


def cmd_preprocess(args) -> int:
    dataset = _read_dataset(args.dataset)
    pre = PreprocessConfig.from_string(args.config)
    rows = []
    n_sent = 0
    for doc_id in sorted(dataset.documents):
        for s in dataset.documents[doc_id].sentences:
            rows.append({"kind": "sentence_tokens", "doc_id": doc_id, "sid": s.sid,
                         "tokens": list(preprocess_sentence(s.text, pre))})
            n_sent += 1
    for c in dataset.citances:
        rows.append({"kind": "citance_tokens", "citance_id": c.citance_id,
                     "tokens": list(preprocess_sentence(c.text, pre))})
    text = "".join(_canonical_json(r) for r in rows)
    _write_text(args.out, text)
    print(f"tokenized {n_sent} sentences, {len(dataset.citances)} citances")
    return EXIT_OK


def cmd_rank(args) -> int:
    dataset = _read_dataset(args.dataset)
    config = RankerConfig.from_string(args.config, top_k=args.top_k)
    model_paths = _parse_model_args(args.model)
    hashes_before = {mid: file_checksum(p) for mid, p in model_paths.items()}
    models = _load_needed_models(config, model_paths)
    lexicon = _load_lexicon_if_needed(config, args.wordnet)
    rankings = rank_dataset(dataset, config, models, lexicon)
    manifest = build_manifest(config, dataset, rankings, seed=args.seed,
                              model_paths=model_paths, outputs=[args.out])
    write_manifest(manifest, args.out)
    _verify_model_files(hashes_before, model_paths)
    print(f"ranked {len(rankings)} citances -> {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    dataset = _read_dataset(args.dataset)
    config = RankerConfig.from_string(args.config, top_k=args.top_k)
    if args.lambdas:
        try:
            lambdas = [float(v) for v in args.lambdas.split(",") if v.strip()]
        except ValueError as err:
            raise ConfigError(f"bad --lambdas list: {err}") from None
    else:
        lambdas = default_lambda_grid()
    model_paths = _parse_model_args(args.model)
    models = _load_needed_models(config, model_paths)
    lexicon = _load_lexicon_if_needed(config, args.wordnet)
    results = lambda_sweep(dataset, config, lambdas, models, lexicon)
    rows = [
        {"lambda": lam, "recall_at_k": r.recall_at_k, "precision_at_k": r.precision_at_k,
         "f1": r.f1, "n_citances": r.n_citances, "n_gold": r.n_gold,
         "n_correct": r.n_correct}
        for lam, r in sorted(results.items())
    ]
    report = {
        "kind": SWEEP_KIND,
        "version": SWEEP_VERSION,
        "config_string": config.to_string(),
        "seed": args.seed,
        "dataset_hash": corpus.dataset_checksum(dataset),
        "model_hashes": {mid: file_checksum(p) for mid, p in model_paths.items()},
        "rows": rows,
    }
    _write_text(args.out, _canonical_json(report))
    best = max(rows, key=lambda r: (r["f1"], -r["lambda"]))
    print(f"swept {len(rows)} lambdas, best lambda={best['lambda']!r} "
          f"f1={best['f1']:.4f}")
    return EXIT_OK


def _lda_config_from_args(args) -> lda.LdaConfig:
    if args.config_file:
        return lda.LdaConfig.from_file(args.config_file)
    return lda.LdaConfig(
        n_topics=args.topics, kappa=args.kappa, tau0=args.tau0,
        min_df=args.min_df, max_df=args.max_df, batch_size=args.batch_size,
        passes=args.passes, seed=args.seed)


def cmd_train_lda(args) -> int:
    dataset = _read_dataset(args.dataset)
    pre = PreprocessConfig.from_string(args.preprocess_config)
    docs = _sentence_corpus(dataset, pre)
    config = _lda_config_from_args(args)
    model = lda.fit_online(docs, config)
    lda.save_model(model, args.out)
    print(f"trained {config.n_topics} topics on {len(docs)} sentences "
          f"(vocab {len(model.vocab)}) -> {args.out}")
    if args.heldout:
        held = _sentence_corpus(_read_dataset(args.heldout), pre)
        bound = lda.heldout_bound(held, model)
        print(f"kappa={config.kappa!r} heldout_bound={bound!r}")
    if args.show_top:
        for k in range(config.n_topics):
            words = lda.topic_top_words(model, k, args.show_top)
            print(f"topic {k}: {' '.join(words)}")
    return EXIT_OK


def cmd_lda_infer(args) -> int:
    model = lda.load_model(args.model)
    text = args.text if args.text is not None else sys.stdin.read()
    pre = PreprocessConfig.from_string(args.preprocess_config)
    vector = lda.infer_topics(preprocess_sentence(text, pre), model)
    print(_canonical_json({"probs": list(vector.probs),
                           "uninformative": vector.uninformative}), end="")
    return EXIT_OK


def cmd_train_embed(args) -> int:
    dataset = _read_dataset(args.dataset)
    pre = PreprocessConfig.from_string(args.preprocess_config)
    sentences = _sentence_corpus(dataset, pre)
    config = embed.EmbedConfig(dim=args.dim, epochs=args.epochs,
                               negatives=args.negatives, min_count=args.min_count,
                               window=args.window, initial_lr=args.lr,
                               seed=args.seed)
    table = embed.train_sgns(sentences, config)
    if args.out.endswith(".txt"):
        embed.save_text(table, args.out)
    else:
        embed.save_binary(table, args.out)
    losses = table.epoch_losses or []
    final = f" final_epoch_loss={losses[-1]!r}" if losses else ""
    print(f"trained {len(table.vocab)} terms dim={config.dim} -> {args.out}{final}")
    return EXIT_OK


def cmd_embed_nn(args) -> int:
    table = _load_embedding(args.model)
    for term, sim in embed.nearest_neighbors(table, args.term, args.n):
        print(f"{term}\t{sim:.6f}")
    return EXIT_OK


def cmd_embed_wmd(args) -> int:
    table = _load_embedding(args.model)
    pre = PreprocessConfig.from_string(args.preprocess_config)
    tokens_a = preprocess_sentence(Path(args.file_a).read_text(encoding="utf-8"), pre)
    tokens_b = preprocess_sentence(Path(args.file_b).read_text(encoding="utf-8"), pre)
    distance = embed.wmd(tokens_a, tokens_b, table)
    print(f"wmd={distance!r}")
    return EXIT_OK


def _verify_dataset_hash(manifest: dict, dataset: corpus.Dataset, skip: bool):
    if skip:
        return
    actual = corpus.dataset_checksum(dataset)
    if manifest.get("dataset_hash") != actual:
        raise RefspanError(
            "manifest was produced from a different dataset "
            f"(hash {manifest.get('dataset_hash')} != {actual}); "
            "pass --no-verify to override")


def cmd_evaluate(args) -> int:
    manifest = read_manifest(args.manifest)
    dataset = _read_dataset(args.dataset)
    _verify_dataset_hash(manifest, dataset, args.no_verify)
    result = evaluate(manifest_ranked_lists(manifest), gold_map(dataset),
                      average=args.average)
    print(TSV_HEADER)
    print(tsv_row(manifest["config_string"], result))
    if args.out:
        _write_text(args.out, _canonical_json(
            json_report(manifest["config_string"], result)))
    return EXIT_OK


def cmd_significance(args) -> int:
    manifest_a = read_manifest(args.manifest_a)
    manifest_b = read_manifest(args.manifest_b)
    dataset = _read_dataset(args.dataset)
    _verify_dataset_hash(manifest_a, dataset, args.no_verify)
    _verify_dataset_hash(manifest_b, dataset, args.no_verify)
    rankings_a = manifest_rankings(manifest_a)
    rankings_b = manifest_rankings(manifest_b)
    if set(rankings_a) != set(rankings_b):
        raise ConfigError("manifests rank different citance sets; cannot pair them")
    gold = gold_map(dataset)
    result = bootstrap_paired_test(paired_stats(rankings_a, gold),
                                   paired_stats(rankings_b, gold),
                                   n=args.resamples, seed=args.seed)
    print(f"mean_diff={result.mean_diff!r} t={result.t_statistic!r} "
          f"p={result.p_value!r} degenerate={result.degenerate}")
    if args.out:
        _write_text(args.out, _canonical_json({
            "config_a": manifest_a["config_string"],
            "config_b": manifest_b["config_string"],
            "mean_diff": result.mean_diff,
            "t_statistic": result.t_statistic,
            "p_value": result.p_value,
            "n_resamples": result.n_resamples,
            "degenerate": result.degenerate,
        }))
    return EXIT_OK


def _load_any_manifest(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        raise RefspanError(f"{path}: {err}") from None
    if not isinstance(data, dict):
        raise RefspanError(f"{path}: not a manifest")
    return data


def _report_sweep(manifest: dict) -> str:
    lines = ["lambda\tR@3\tP@3\tF1"]
    for row in manifest["rows"]:
        lines.append(f"{row['lambda']:.2f}\t{100 * row['recall_at_k']:.2f}"
                     f"\t{100 * row['precision_at_k']:.2f}\t{100 * row['f1']:.2f}")
    return "\n".join(lines) + "\n"


def _report_runs(manifests: list[dict], args) -> str:
    if not args.dataset:
        raise ConfigError("run-manifest reports need --dataset for the gold labels")
    dataset = _read_dataset(args.dataset)
    gold = gold_map(dataset)
    for m in manifests:
        _verify_dataset_hash(m, dataset, args.no_verify)
    results = [evaluate(manifest_ranked_lists(m), gold) for m in manifests]
    if len(manifests) == 2:
        test = bootstrap_paired_test(
            paired_stats(manifest_rankings(manifests[0]), gold),
            paired_stats(manifest_rankings(manifests[1]), gold),
            n=args.resamples, seed=args.seed)
        lines = [TSV_HEADER + "\tp_value"]
        lines.append(tsv_row(manifests[0]["config_string"], results[0]) + "\t-")
        lines.append(tsv_row(manifests[1]["config_string"], results[1])
                     + f"\t{test.p_value:.4f}")
    else:
        lines = [TSV_HEADER]
        for m, r in zip(manifests, results):
            lines.append(tsv_row(m["config_string"], r))
    return "\n".join(lines) + "\n"


def _report_lda_bounds(args) -> str:
    if not args.heldout:
        raise ConfigError("--lda-bounds needs --heldout DATASET")
    pre = PreprocessConfig.from_string(args.preprocess_config)
    held = _sentence_corpus(_read_dataset(args.heldout), pre)
    rows = []
    for path in args.lda_bounds:
        model = lda.load_model(path)
        rows.append((model.config.kappa, lda.heldout_bound(held, model)))
    rows.sort()
    lines = ["kappa\tbound"]
    for kappa, bound in rows:
        lines.append(f"{kappa!r}\t{bound!r}")
    return "\n".join(lines) + "\n"


def cmd_report(args) -> int:
    if args.lda_bounds:
        _write_text(args.out, _report_lda_bounds(args))
        return EXIT_OK
    if not args.manifests:
        raise ConfigError("report needs manifest files or --lda-bounds models")
    manifests = [_load_any_manifest(p) for p in args.manifests]
    kinds = {m.get("kind") for m in manifests}
    if kinds == {SWEEP_KIND}:
        if len(manifests) != 1:
            raise ConfigError("sweep reports take exactly one manifest")
        text = _report_sweep(manifests[0])
    elif kinds == {"run_manifest"}:
        text = _report_runs(manifests, args)
    else:
        raise ConfigError(f"cannot mix manifest kinds {sorted(kinds)}")
    _write_text(args.out, text)
    return EXIT_OK


def cmd_dataset_stats(args) -> int:
    dataset = _read_dataset(args.dataset)
    sentences = [s for doc_id in sorted(dataset.documents)
                 for s in dataset.documents[doc_id].sentences]
    lines = [f"# {len(dataset.documents)} docs, {len(dataset.citances)} citances, "
             f"{len(sentences)} sentences"]
    lines.append("section\tpct")
    for title, pct in corpus.section_frequency_report(dataset, count=args.count):
        lines.append(f"{title}\t{pct:.2f}")
    lines.append("")
    lines.append("sentences_pct\tvocab_pct")
    for sent_pct, vocab_pct in corpus.sparsity_report(sentences):
        lines.append(f"{sent_pct:.4f}\t{vocab_pct:.4f}")
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_corpus_clean(args) -> int:
    dataset = _read_dataset(args.dataset)
    vectors = [corpus.document_char_freq(dataset.documents[doc_id])
               for doc_id in sorted(dataset.documents)]
    assignment = corpus.char_freq_cluster(vectors, k=args.k, seed=args.seed)
    objective = corpus.kmeans_objective(vectors, assignment)
    lines = ["doc_id\tcluster"]
    for doc_id in sorted(assignment):
        lines.append(f"{doc_id}\t{assignment[doc_id]}")
    _write_text(args.out, "\n".join(lines) + "\n")
    print(f"clustered {len(assignment)} docs into k={args.k}, "
          f"objective={objective!r}")
    return EXIT_OK


# ------------------------------------------------------------- parser


def _add_seed_jobs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0,
                        help="master seed for all randomness in this command")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker bound (reserved; execution is single-process)")


def _add_rank_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", required=True, help="canonical dataset JSONL")
    parser.add_argument("--config", required=True, help="config string (Table-2 grammar)")
    parser.add_argument("--model", action="append", default=[], metavar="ID=PATH",
                        help="model registry entry; repeatable")
    parser.add_argument("--wordnet", help="lexicon directory for synonym expansion")
    parser.add_argument("--top-k", type=int, default=3)
    parser.add_argument("--out", required=True, help="output path")


def _add_lda_train_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", required=True)
    parser.add_argument("--preprocess-config", default="nltk_stop+nltk_tok")
    parser.add_argument("--out", required=True)
    parser.add_argument("--config-file", help="key=value training config file")
    parser.add_argument("--topics", type=int, default=10)
    parser.add_argument("--kappa", type=float, default=0.5)
    parser.add_argument("--tau0", type=float, default=1.0)
    parser.add_argument("--batch-size", type=int, default=256)
    parser.add_argument("--passes", type=int, default=1)
    parser.add_argument("--min-df", type=int, default=1)
    parser.add_argument("--max-df", type=float, default=1.0)
    parser.add_argument("--heldout", help="dataset JSONL for a bound printout")
    parser.add_argument("--show-top", type=int, default=0, metavar="N",
                        help="print the top N words per topic")
    _add_seed_jobs(parser)


def _add_embed_train_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", required=True)
    parser.add_argument("--preprocess-config", default="nltk_stop+nltk_tok")
    parser.add_argument("--out", required=True,
                        help="output table (.txt for text format, else binary)")
    parser.add_argument("--dim", type=int, default=200)
    parser.add_argument("--epochs", type=int, default=5)
    parser.add_argument("--negatives", type=int, default=5)
    parser.add_argument("--min-count", type=int, default=5)
    parser.add_argument("--window", type=int, default=5)
    parser.add_argument("--lr", type=float, default=0.025)
    _add_seed_jobs(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refspan",
        description="Rank reference-document sentences against citing sentences.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse raw XML + annotations to canonical JSONL")
    p.add_argument("--root", help=f"data root (default: ${DATA_ROOT_ENV})")
    p.add_argument("--split", default="dev")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("preprocess", help="dump preprocessed tokens for a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--config", default="nltk_stop+nltk_tok")
    p.add_argument("--out", help="output JSONL (default stdout)")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("rank", help="rank sentences for every citance")
    _add_rank_args(p)
    _add_seed_jobs(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("sweep", help="evaluate a blend across the lambda grid")
    _add_rank_args(p)
    p.add_argument("--lambdas", help="comma-separated grid (default 0.70..0.99)")
    _add_seed_jobs(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("train-lda", help="train the online variational topic model")
    _add_lda_train_args(p)
    p.set_defaults(func=cmd_train_lda)

    p = sub.add_parser("train-embed", help="train skip-gram embeddings")
    _add_embed_train_args(p)
    p.set_defaults(func=cmd_train_embed)

    p = sub.add_parser("evaluate", help="score a run manifest against gold")
    p.add_argument("--manifest", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--average", choices=("micro", "macro"), default="micro")
    p.add_argument("--out", help="JSON report path")
    p.add_argument("--no-verify", action="store_true",
                   help="skip the dataset hash check")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("significance", help="bootstrap paired t-test of two manifests")
    p.add_argument("--manifest-a", required=True)
    p.add_argument("--manifest-b", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--resamples", type=int, default=10000)
    p.add_argument("--out", help="JSON result path")
    p.add_argument("--no-verify", action="store_true")
    _add_seed_jobs(p)
    p.set_defaults(func=cmd_significance)

    p = sub.add_parser("report", help="tables from manifests (lambda/F1, paired runs)")
    p.add_argument("manifests", nargs="*", help="run or sweep manifest files")
    p.add_argument("--dataset", help="needed when reporting run manifests")
    p.add_argument("--out", help="output TSV (default stdout)")
    p.add_argument("--resamples", type=int, default=10000)
    p.add_argument("--no-verify", action="store_true")
    p.add_argument("--lda-bounds", nargs="*", metavar="MODEL",
                   help="emit a kappa/bound series for these models instead")
    p.add_argument("--heldout", help="dataset JSONL for --lda-bounds")
    p.add_argument("--preprocess-config", default="nltk_stop+nltk_tok")
    _add_seed_jobs(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("dataset-stats", help="section frequencies + sparsity curve")
    p.add_argument("--dataset", required=True)
    p.add_argument("--count", choices=("pairs", "sentences"), default="pairs")
    p.add_argument("--out", help="output TSV (default stdout)")
    p.set_defaults(func=cmd_dataset_stats)

    p = sub.add_parser("corpus-clean", help="cluster docs by character frequencies")
    p.add_argument("--dataset", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", help="output TSV (default stdout)")
    _add_seed_jobs(p)
    p.set_defaults(func=cmd_corpus_clean)

    group = sub.add_parser("lda", help="topic model tools")
    lda_sub = group.add_subparsers(dest="subcommand", required=True)
    p = lda_sub.add_parser("train", help="same as train-lda")
    _add_lda_train_args(p)
    p.set_defaults(func=cmd_train_lda)
    p = lda_sub.add_parser("infer", help="topic vector for one text")
    p.add_argument("--model", required=True)
    p.add_argument("--text", help="input text (default: stdin)")
    p.add_argument("--preprocess-config", default="nltk_stop+nltk_tok")
    p.set_defaults(func=cmd_lda_infer)

    group = sub.add_parser("embed", help="embedding tools")
    embed_sub = group.add_subparsers(dest="subcommand", required=True)
    p = embed_sub.add_parser("train", help="same as train-embed")
    _add_embed_train_args(p)
    p.set_defaults(func=cmd_train_embed)
    p = embed_sub.add_parser("nn", help="nearest neighbors of a term")
    p.add_argument("--model", required=True)
    p.add_argument("--term", required=True)
    p.add_argument("-n", type=int, default=10)
    p.set_defaults(func=cmd_embed_nn)
    p = embed_sub.add_parser("wmd", help="transport distance between two text files")
    p.add_argument("--model", required=True)
    p.add_argument("--file-a", required=True)
    p.add_argument("--file-b", required=True)
    p.add_argument("--preprocess-config", default="nltk_stop+nltk_tok")
    p.set_defaults(func=cmd_embed_wmd)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (ConfigError, corpus.MissingFile) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except RefspanError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
