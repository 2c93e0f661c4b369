"""Command-line front end.

Each subcommand reads and writes the package's file formats, so a full run is
a chain of small re-runnable steps:

    xweak ingest -> expand -> represent -> align -> train -> predict -> eval

Exit codes: 0 success, 1 bad input or bad usage, 2 failure at runtime.
"""

from __future__ import annotations

import argparse
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from .alignment import fit_gmm, fit_pca, load_pseudo_labels, pseudo_label, save_pseudo_labels
from .baselines import expanded_voting_rule, majority_class, name_voting_rule, vote_predict
from .class_repr import class_matrix, expand_classes, load_class_report, save_class_report
from .classifier import load_model, save_model, train_classifier
from .config import PipelineConfig, parse_config_file
from .corpus import load_corpus, load_taxonomy, save_corpus, save_taxonomy
from .doc_repr import load_doc_matrix, represent_corpus, save_doc_matrix
from .embedding_store import (
    build_word_table,
    load_embeddings,
    load_word_table,
    save_embeddings,
    save_word_table,
    validate_alignment,
)
from .errors import ValidationError, XweakError
from .evaluation import compute_metrics, generate_synthetic, pseudo_label_accuracy
from .fileio import load_predictions, resolve_workers, save_predictions, write_atomic
from .transfer import (
    DatasetBundle,
    load_mapping,
    postprocess_predictions,
    run_ablation_grid,
    run_retrain,
)


def _config(args: argparse.Namespace) -> PipelineConfig:
    if getattr(args, "config", None):
        return parse_config_file(args.config)
    return PipelineConfig().validate()


def _workers(args: argparse.Namespace) -> int:
    return resolve_workers(getattr(args, "single_thread", False))


def cmd_synth(args: argparse.Namespace) -> None:
    cfg = _config(args)
    seed = cfg.random_seed if args.seed is None else args.seed
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    train = generate_synthetic(
        args.classes, args.docs_per_class, args.dim, args.noise,
        args.vocab_per_class, seed, tokens_per_doc=args.tokens_per_doc,
    )
    # The held-out split reuses the planted geometry but none of the draws.
    test = generate_synthetic(
        args.classes, args.test_docs_per_class, args.dim, args.noise,
        args.vocab_per_class, seed + 1, tokens_per_doc=args.tokens_per_doc,
    )
    save_taxonomy(train.taxonomy, out / "taxonomy.tsv")
    save_corpus(train.corpus, out / "train.tsv")
    save_corpus(test.corpus, out / "test.tsv")
    save_embeddings(train.embedded, out / "train_embeddings")
    save_embeddings(test.embedded, out / "test_embeddings")
    for name in ("taxonomy.tsv", "train.tsv", "test.tsv", "train_embeddings", "test_embeddings"):
        print(f"wrote {out / name}")


def cmd_ingest(args: argparse.Namespace) -> None:
    cfg = _config(args)
    corpus = load_corpus(args.corpus)
    embedded = load_embeddings(args.embeddings)
    validate_alignment(corpus, embedded)
    table = build_word_table(embedded, cfg.min_freq, _workers(args))
    save_word_table(table, args.out)
    print(f"wrote {args.out}: {len(table.words)} words of dimension {table.vectors.shape[1]}")


def cmd_expand(args: argparse.Namespace) -> None:
    cfg = _config(args)
    table = load_word_table(args.vocab)
    taxonomy = load_taxonomy(args.taxonomy)
    reps = expand_classes(table, taxonomy, cfg.expansion_limit)
    save_class_report(reps, args.out)
    for rep in reps:
        print(f"{rep.class_name}: {len(rep.keywords)} keywords")
    print(f"wrote {args.out}")


def cmd_represent(args: argparse.Namespace) -> None:
    _config(args)
    corpus = load_corpus(args.corpus)
    embedded = load_embeddings(args.embeddings)
    validate_alignment(corpus, embedded)
    reps = load_class_report(args.classes)
    doc_ids, matrix = represent_corpus(corpus, embedded, reps, _workers(args))
    save_doc_matrix(doc_ids, matrix, args.out)
    print(f"wrote {args.out}: {len(doc_ids)} documents of dimension {matrix.shape[1]}")


def cmd_align(args: argparse.Namespace) -> None:
    cfg = _config(args)
    doc_ids, matrix = load_doc_matrix(args.docs)
    reps = load_class_report(args.classes)
    pca = fit_pca(matrix, cfg.pca_dim)
    projected = pca.transform(matrix)
    gmm = fit_gmm(projected, pca.transform(class_matrix(reps)))
    pls = pseudo_label(gmm, projected, doc_ids, matrix, reps, cfg.conf_threshold, cfg.mode)
    save_pseudo_labels(pls, args.out)
    picked = pls.selected()
    print(
        f"wrote {args.out}: selected {len(picked)} of {len(doc_ids)} documents "
        f"({cfg.mode} mode, GMM {'converged' if gmm.converged else 'stopped'} "
        f"after {gmm.n_iter} iterations)"
    )


def cmd_train(args: argparse.Namespace) -> None:
    cfg = _config(args)
    doc_ids, matrix = load_doc_matrix(args.docs)
    taxonomy = load_taxonomy(args.taxonomy)
    records = load_pseudo_labels(args.pseudo_labels)
    index = {doc_id: i for i, doc_id in enumerate(doc_ids)}
    picked = [r for r in records if r.selected]
    for r in picked:
        if r.doc_id not in index:
            raise ValidationError(f"pseudo-labeled document {r.doc_id!r} is not in {args.docs}")
    model = train_classifier(
        matrix[[index[r.doc_id] for r in picked]],
        [r.gmm_label for r in picked],
        taxonomy.classes,
        l2_strength=cfg.l2_strength,
        learning_rate=cfg.learning_rate,
        epochs=cfg.epochs,
    )
    save_model(model, args.out)
    print(f"wrote {args.out}: trained on {len(picked)} documents, final loss {model.losses[-1]:.6f}")


def cmd_predict(args: argparse.Namespace) -> None:
    _config(args)
    model = load_model(args.model)
    doc_ids, matrix = load_doc_matrix(args.docs)
    save_predictions(list(zip(doc_ids, model.predict(matrix))), args.out)
    print(f"wrote {args.out}: {len(doc_ids)} predictions")


def _fallback_class(args: argparse.Namespace, taxonomy) -> str:
    if args.fallback is not None:
        if args.fallback not in taxonomy.classes:
            raise ValidationError(f"fallback class {args.fallback!r} is not in the taxonomy")
        return args.fallback
    if args.train_corpus is not None:
        labels = list(load_corpus(args.train_corpus).gold_labels().values())
        return majority_class(labels, taxonomy)
    raise ValidationError("keyword voting needs --fallback or a labeled --train-corpus")


def cmd_baseline(args: argparse.Namespace) -> None:
    _config(args)
    corpus = load_corpus(args.corpus)
    taxonomy = load_taxonomy(args.taxonomy)
    if args.method == "majority":
        if args.train_corpus is None:
            raise ValidationError("the majority baseline needs a labeled --train-corpus")
        labels = list(load_corpus(args.train_corpus).gold_labels().values())
        winner = majority_class(labels, taxonomy)
        pairs = [(doc.doc_id, winner) for doc in corpus]
    else:
        if args.method == "kv-name":
            rule = name_voting_rule(taxonomy)
        else:
            if args.classes is None:
                raise ValidationError("kv-xclass needs --classes with expanded keywords")
            rule = expanded_voting_rule(load_class_report(args.classes))
        pairs = vote_predict(corpus, rule, _fallback_class(args, taxonomy))
    save_predictions(pairs, args.out)
    print(f"wrote {args.out}: {len(pairs)} predictions ({args.method})")


def cmd_eval(args: argparse.Namespace) -> None:
    _config(args)
    corpus = load_corpus(args.corpus)
    taxonomy = load_taxonomy(args.taxonomy)
    gold = corpus.gold_labels()
    mapping = load_mapping(args.mapping) if args.mapping else None
    if args.predictions:
        pairs = load_predictions(args.predictions)
        if mapping is not None:
            pairs = postprocess_predictions(pairs, mapping)
        for doc_id, _ in pairs:
            if doc_id not in gold:
                raise ValidationError(f"document {doc_id!r} has no gold label in {args.corpus}")
        report = compute_metrics(
            [gold[d] for d, _ in pairs], [label for _, label in pairs], taxonomy
        )
    else:
        records = load_pseudo_labels(args.pseudo_labels)
        report = pseudo_label_accuracy(records, gold, taxonomy, mapping)
    for line in report.key_value_lines():
        print(line)
    if args.out:
        report.save(args.out)
        print(f"wrote {args.out}")


def cmd_transfer_postprocess(args: argparse.Namespace) -> None:
    pairs = postprocess_predictions(load_predictions(args.predictions), load_mapping(args.mapping))
    save_predictions(pairs, args.out)
    print(f"wrote {args.out}: {len(pairs)} predictions")


def cmd_transfer_retrain(args: argparse.Namespace) -> None:
    cfg = _config(args)
    corpus = load_corpus(args.corpus)
    embedded = load_embeddings(args.embeddings)
    taxonomy = load_taxonomy(args.taxonomy)
    reps, result = run_retrain(corpus, embedded, taxonomy, cfg, _workers(args))
    save_model(result.classifier, args.model_out)
    print(f"wrote {args.model_out}: classes {', '.join(r.class_name for r in reps)}")
    if args.pseudo_out:
        save_pseudo_labels(result.pseudo, args.pseudo_out)
        print(f"wrote {args.pseudo_out}: selected {len(result.pseudo.selected())} documents")
    if args.predictions_out:
        pairs = list(zip(result.doc_ids, result.classifier.predict(result.features)))
        save_predictions(pairs, args.predictions_out)
        print(f"wrote {args.predictions_out}: {len(pairs)} predictions")


def _load_bundle(name: str, corpus_path, embeddings_path, taxonomy_path) -> DatasetBundle:
    corpus = load_corpus(corpus_path)
    embedded = load_embeddings(embeddings_path)
    validate_alignment(corpus, embedded)
    return DatasetBundle(name, corpus, embedded, load_taxonomy(taxonomy_path))


def cmd_transfer_ablation(args: argparse.Namespace) -> None:
    cfg = _config(args)
    source = _load_bundle("source", args.source_corpus, args.source_embeddings, args.source_taxonomy)
    target = _load_bundle("target", args.target_corpus, args.target_embeddings, args.target_taxonomy)
    eval_corpus = load_corpus(args.eval_corpus)
    eval_embedded = load_embeddings(args.eval_embeddings)
    mapping = load_mapping(args.mapping, source.taxonomy, target.taxonomy) if args.mapping else None
    grid = run_ablation_grid(
        source, target, eval_corpus, eval_embedded, mapping, cfg, _workers(args)
    )
    lines = ["docs\tclass_defs\taccuracy\tmacro_f1"]
    for choice, report in grid:
        lines.append(
            f"{choice.docs}\t{choice.class_defs}\t{report.accuracy:.4f}\t{report.macro_f1:.4f}"
        )
    print("\n".join(lines))
    if args.out:
        write_atomic(args.out, "\n".join(lines) + "\n")
        print(f"wrote {args.out}")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="pipeline settings file (key = value lines)")
    parser.add_argument(
        "--single-thread", action="store_true",
        help="force one worker for bitwise-reproducible output",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xweak",
        description="Seed-driven weak text classification over precomputed embeddings.",
    )
    try:
        release = version("xweak")
    except PackageNotFoundError:
        release = "unknown"
    parser.add_argument("--version", action="version", version=f"%(prog)s {release}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a planted-cluster corpus with embeddings")
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--docs-per-class", type=int, default=100)
    p.add_argument("--test-docs-per-class", type=int, default=50)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--vocab-per-class", type=int, default=8)
    p.add_argument("--tokens-per-doc", type=int, default=10)
    p.add_argument("--seed", type=int, default=None, help="overrides random_seed from the config")
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="build the word-embedding vocabulary from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("expand", help="grow per-class keyword lists from seeds")
    p.add_argument("--vocab", required=True)
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("represent", help="compute class-attentive document vectors")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--classes", required=True, help="class report from `expand`")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_represent)

    p = sub.add_parser("align", help="cluster documents and select confident pseudo-labels")
    p.add_argument("--docs", required=True, help="document matrix from `represent`")
    p.add_argument("--classes", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("train", help="fit the final classifier on selected pseudo-labels")
    p.add_argument("--docs", required=True)
    p.add_argument("--pseudo-labels", required=True)
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="label a document matrix with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--docs", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("baseline", help="no-training reference predictors")
    p.add_argument("method", choices=["majority", "kv-name", "kv-xclass"])
    p.add_argument("--corpus", required=True, help="documents to predict")
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--train-corpus", help="labeled corpus for the majority class")
    p.add_argument("--classes", help="class report, required for kv-xclass")
    p.add_argument("--fallback", help="class to predict on ties and keyword misses")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("eval", help="score predictions or pseudo-labels against gold labels")
    p.add_argument("--corpus", required=True, help="corpus holding the gold labels")
    p.add_argument("--taxonomy", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--predictions")
    group.add_argument("--pseudo-labels")
    p.add_argument(
        "--mapping",
        help="category mapping applied to predictions, or to gold labels in pseudo mode",
    )
    p.add_argument("--out", help="write the full report here")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("transfer", help="cross-taxonomy operations")
    tsub = p.add_subparsers(dest="transfer_command", required=True)

    t = tsub.add_parser("postprocess", help="map predicted labels into a target taxonomy")
    t.add_argument("--predictions", required=True)
    t.add_argument("--mapping", required=True)
    t.add_argument("--out", required=True)
    _add_common(t)
    t.set_defaults(func=cmd_transfer_postprocess)

    t = tsub.add_parser("retrain", help="rerun the weak pipeline under a target taxonomy")
    t.add_argument("--corpus", required=True)
    t.add_argument("--embeddings", required=True)
    t.add_argument("--taxonomy", required=True, help="target taxonomy with source-vocabulary seeds")
    t.add_argument("--model-out", required=True)
    t.add_argument("--pseudo-out")
    t.add_argument("--predictions-out")
    _add_common(t)
    t.set_defaults(func=cmd_transfer_retrain)

    t = tsub.add_parser("ablation", help="cross data origin with class-definition origin")
    t.add_argument("--source-corpus", required=True)
    t.add_argument("--source-embeddings", required=True)
    t.add_argument("--source-taxonomy", required=True)
    t.add_argument("--target-corpus", required=True)
    t.add_argument("--target-embeddings", required=True)
    t.add_argument("--target-taxonomy", required=True)
    t.add_argument("--eval-corpus", required=True)
    t.add_argument("--eval-embeddings", required=True)
    t.add_argument("--mapping")
    t.add_argument("--out")
    _add_common(t)
    t.set_defaults(func=cmd_transfer_ablation)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; those are validation failures here.
        return 0 if exc.code in (0, None) else 1
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FileNotFoundError, IsADirectoryError, NotADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except XweakError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - last resort, keep the exit contract
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
