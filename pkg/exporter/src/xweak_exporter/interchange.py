"""Readers and writers for the pipeline's file formats.

Corpus: ``id<TAB>label<TAB>text`` per line, ``-`` for unlabeled. Embedding
interchange: a text index starting ``XWEAK-EMB v1 dim=<D> count=<N>``, then
per document ``#<id> <T>`` and T rows ``token<TAB>byte_offset``, with the
vectors as little-endian float32 in a sibling ``.bin`` blob. Offsets and
counts are bit-exact contract items, so emission is single-threaded and
purely sequential.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ValidationError

UNLABELED = "-"


def blob_path_for(index_path: str | Path) -> Path:
    return Path(str(index_path) + ".bin")


def read_corpus_rows(path: str | Path) -> list[tuple[str, str | None, str]]:
    rows: list[tuple[str, str | None, str]] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t", 2)
            if len(parts) != 3:
                raise ValidationError(f"{path}: malformed record at line {lineno}")
            doc_id, label, text = parts
            if not doc_id:
                raise ValidationError(f"{path}: empty document id at line {lineno}")
            if doc_id in seen:
                raise ValidationError(f"{path}: duplicate document id {doc_id!r}")
            seen.add(doc_id)
            rows.append((doc_id, None if label == UNLABELED else label, text))
    return rows


def write_corpus_rows(rows: list[tuple[str, str | None, str]], path: str | Path) -> None:
    lines = []
    for doc_id, label, text in rows:
        if "\t" in doc_id or "\n" in doc_id or " " in doc_id:
            raise ValidationError(f"document id {doc_id!r} contains whitespace")
        if "\n" in text:
            raise ValidationError(f"document {doc_id!r} text contains a newline")
        lines.append(f"{doc_id}\t{label if label is not None else UNLABELED}\t{text}")
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def write_embeddings(
    docs: list[tuple[str, list[str], np.ndarray]],
    dim: int,
    index_path: str | Path,
    blob_path: str | Path | None = None,
) -> None:
    """Emit the interchange pair for ``(doc_id, tokens, (T, dim) block)`` docs."""
    blob_path = blob_path_for(index_path) if blob_path is None else Path(blob_path)
    lines = [f"XWEAK-EMB v1 dim={dim} count={len(docs)}"]
    chunks: list[bytes] = []
    offset = 0
    for doc_id, tokens, vectors in docs:
        if vectors.shape != (len(tokens), dim):
            raise ValidationError(
                f"document {doc_id!r}: block shape {vectors.shape} does not match "
                f"{len(tokens)} tokens of dim {dim}"
            )
        lines.append(f"#{doc_id} {len(tokens)}")
        for t, token in enumerate(tokens):
            lines.append(f"{token}\t{offset + 4 * dim * t}")
        block = np.ascontiguousarray(vectors, dtype="<f4").tobytes()
        chunks.append(block)
        offset += len(block)
    Path(index_path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    Path(blob_path).write_bytes(b"".join(chunks))


def read_taxonomy_classes(path: str | Path) -> list[str]:
    classes: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            name = line.split("\t")[0]
            if not name or name in classes:
                raise ValidationError(f"{path}: bad class at line {lineno}")
            classes.append(name)
    if not classes:
        raise ValidationError(f"{path}: taxonomy file is empty")
    return classes


def read_selected_pseudo_labels(path: str | Path) -> list[tuple[str, str]]:
    """Doc id and cluster label of every selected row, in file order."""
    picked: list[tuple[str, str]] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 5 or parts[4] not in ("0", "1"):
                raise ValidationError(f"{path}: malformed pseudo-label at line {lineno}")
            if parts[0] in seen:
                raise ValidationError(f"{path}: duplicate document id {parts[0]!r}")
            seen.add(parts[0])
            if parts[4] == "1":
                picked.append((parts[0], parts[1]))
    return picked


def write_predictions(pairs: list[tuple[str, str]], path: str | Path) -> None:
    Path(path).write_text(
        "".join(f"{doc_id}\t{label}\n" for doc_id, label in pairs), encoding="utf-8"
    )
