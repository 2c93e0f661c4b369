"""Command-line front end: export embeddings, fine-tune a classifier."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import ValidationError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xweak-export",
        description="Contextual embedding export and classifier fine-tuning.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("export", help="embed a raw corpus into the interchange format")
    ex.add_argument("--checkpoint", required=True, help="model name or local directory")
    ex.add_argument("--corpus", required=True, help="raw corpus, id<TAB>label<TAB>text")
    ex.add_argument("--out-corpus", required=True, help="cleaned, tokenized corpus")
    ex.add_argument("--out-embeddings", required=True, help="interchange index (blob is a .bin sibling)")
    ex.add_argument("--max-len", type=int, default=64)
    ex.add_argument("--batch-size", type=int, default=64)
    ex.add_argument("--pool-layer", type=int, default=-1, help="hidden state fed to the pool")
    ex.add_argument("--keep-mentions", action="store_true")
    ex.add_argument("--keep-links", action="store_true")
    ex.add_argument("--keep-emoji", action="store_true")

    ft = sub.add_parser("finetune", help="train the encoder on selected pseudo-labels")
    ft.add_argument("--checkpoint", required=True)
    ft.add_argument("--corpus", required=True)
    ft.add_argument("--taxonomy", required=True)
    ft.add_argument("--pseudo-labels", required=True)
    ft.add_argument("--out", required=True, help="prediction file, id<TAB>label")
    ft.add_argument("--learning-rate", type=float, default=2e-5)
    ft.add_argument("--weight-decay", type=float, default=0.05)
    ft.add_argument("--epochs", type=int, default=6)
    ft.add_argument("--batch-size", type=int, default=64)
    ft.add_argument("--max-len", type=int, default=64)
    ft.add_argument("--seed", type=int, default=42)
    return parser


def _run(args: argparse.Namespace) -> None:
    import transformers

    transformers.logging.set_verbosity_error()
    transformers.utils.logging.disable_progress_bar()
    if args.command == "export":
        from .export import ExportJob, export_file

        job = ExportJob(
            checkpoint=args.checkpoint,
            max_len=args.max_len,
            batch_size=args.batch_size,
            strip_mentions=not args.keep_mentions,
            strip_links=not args.keep_links,
            strip_emoji=not args.keep_emoji,
            pool_layer=args.pool_layer,
        )
        report = export_file(args.corpus, job, args.out_corpus, args.out_embeddings)
        print(
            f"wrote {args.out_embeddings}: {report.documents} documents, dim {report.dim}, "
            f"{report.skipped} skipped, {report.dropped_tokens} tokens truncated away"
        )
    else:
        from .finetune import FinetuneSettings, finetune_classifier

        settings = FinetuneSettings(
            learning_rate=args.learning_rate,
            weight_decay=args.weight_decay,
            epochs=args.epochs,
            batch_size=args.batch_size,
            max_len=args.max_len,
            seed=args.seed,
        )
        report = finetune_classifier(
            args.checkpoint,
            args.corpus,
            args.taxonomy,
            args.pseudo_labels,
            args.out,
            settings,
        )
        loss = "untrained" if report.final_loss is None else f"final loss {report.final_loss:.4f}"
        print(
            f"wrote {args.out}: {report.predictions} predictions "
            f"({report.trained_on} training documents, {report.steps} steps, {loss})"
        )


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _run(args)
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
