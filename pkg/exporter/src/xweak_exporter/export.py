"""Contextual token vectors from a masked language model.

Each document is cleaned, tokenized under the shared contract, and run
through the encoder; every word's vector is the arithmetic mean of its
subword hidden states. Which hidden layer feeds the pool is configurable
and defaults to the final one; that choice is the main fidelity knob.

The emitted corpus carries the kept tokens joined by single spaces rather
than the raw text. The pipeline re-tokenizes that column, and joining kept
tokens is the one representation guaranteed to survive the round trip even
when truncation dropped a word.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .errors import ValidationError
from .interchange import read_corpus_rows, write_corpus_rows, write_embeddings
from .preprocess import clean_text, tokenize


@dataclass(frozen=True)
class ExportJob:
    checkpoint: str
    max_len: int = 64
    batch_size: int = 64
    strip_mentions: bool = True
    strip_links: bool = True
    strip_emoji: bool = True
    pool_layer: int = -1

    def __post_init__(self) -> None:
        if self.max_len < 3:
            raise ValidationError(
                f"max_len must be >= 3 (two slots go to sentence markers), got {self.max_len}"
            )
        if self.batch_size < 1:
            raise ValidationError(f"batch_size must be >= 1, got {self.batch_size}")


@dataclass(frozen=True)
class ExportReport:
    documents: int
    skipped: int          # empty after cleanup, or nothing survived truncation
    dropped_tokens: int   # words lost entirely to truncation
    dim: int


def _load_encoder(checkpoint: str):
    from transformers import AutoModel, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(checkpoint)
    if not tokenizer.is_fast:
        raise ValidationError(
            f"checkpoint {checkpoint!r} has no fast tokenizer; "
            "subword-to-word pooling needs word index maps"
        )
    model = AutoModel.from_pretrained(checkpoint)
    model.eval()
    return tokenizer, model


def export(
    rows: list[tuple[str, str | None, str]],
    job: ExportJob,
    corpus_out: str | Path,
    index_out: str | Path,
    blob_out: str | Path | None = None,
) -> ExportReport:
    tokenizer, model = _load_encoder(job.checkpoint)
    dim = int(model.config.hidden_size)
    n_layers = int(model.config.num_hidden_layers) + 1
    if not -n_layers <= job.pool_layer < n_layers:
        raise ValidationError(
            f"pool_layer {job.pool_layer} out of range for {n_layers} hidden states"
        )

    prepared: list[tuple[str, str | None, list[str]]] = []
    skipped = 0
    for doc_id, label, text in rows:
        tokens = tokenize(
            clean_text(
                text,
                strip_mentions=job.strip_mentions,
                strip_links=job.strip_links,
                strip_emoji=job.strip_emoji,
            )
        )
        if tokens:
            prepared.append((doc_id, label, tokens))
        else:
            skipped += 1

    out_corpus: list[tuple[str, str | None, str]] = []
    out_docs: list[tuple[str, list[str], np.ndarray]] = []
    dropped = 0
    with torch.no_grad():
        for start in range(0, len(prepared), job.batch_size):
            batch = prepared[start : start + job.batch_size]
            enc = tokenizer(
                [tokens for _, _, tokens in batch],
                is_split_into_words=True,
                truncation=True,
                max_length=job.max_len,
                padding=True,
                return_tensors="pt",
            )
            states = model(**enc, output_hidden_states=True).hidden_states[job.pool_layer]
            for i, (doc_id, label, tokens) in enumerate(batch):
                sums: dict[int, torch.Tensor] = {}
                counts: dict[int, int] = {}
                for pos, wid in enumerate(enc.word_ids(i)):
                    if wid is None:
                        continue
                    if wid in sums:
                        sums[wid] = sums[wid] + states[i, pos]
                        counts[wid] += 1
                    else:
                        sums[wid] = states[i, pos]
                        counts[wid] = 1
                kept = sorted(sums)
                dropped += len(tokens) - len(kept)
                if not kept:
                    skipped += 1
                    continue
                vectors = np.stack(
                    [(sums[w] / counts[w]).numpy() for w in kept]
                ).astype(np.float32)
                kept_tokens = [tokens[w] for w in kept]
                out_corpus.append((doc_id, label, " ".join(kept_tokens)))
                out_docs.append((doc_id, kept_tokens, vectors))

    write_corpus_rows(out_corpus, corpus_out)
    write_embeddings(out_docs, dim, index_out, blob_out)
    return ExportReport(len(out_docs), skipped, dropped, dim)


def export_file(
    in_path: str | Path,
    job: ExportJob,
    corpus_out: str | Path,
    index_out: str | Path,
    blob_out: str | Path | None = None,
) -> ExportReport:
    return export(read_corpus_rows(in_path), job, corpus_out, index_out, blob_out)
