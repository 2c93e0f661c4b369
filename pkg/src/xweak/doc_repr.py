"""Class-oriented document vectors and similarity-based label prediction."""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .class_repr import ClassRepresentation, class_matrix
from .corpus import Corpus
from .embedding_store import EmbeddedCorpus
from .errors import ValidationError
from .fileio import default_blob_path, write_atomic
from .vectors import unit_rows

DOCS_MAGIC = "XWEAK-DOCS"
FORMAT_VERSION = "v1"


@dataclass(frozen=True, eq=False)
class DocumentRepresentation:
    doc_id: str
    vector: np.ndarray = field(repr=False)  # (dim,) float64
    token_weights: np.ndarray = field(repr=False)  # (T,) float64, sums to 1


def _token_weights(vectors: np.ndarray, class_units: np.ndarray) -> np.ndarray:
    # Per-token relevance: best cosine against any class, clamped at zero.
    vecs = vectors.astype(np.float64)
    norms = np.linalg.norm(vecs, axis=1)
    safe = np.where(norms > 0.0, norms, 1.0)
    sims = (vecs / safe[:, None]) @ class_units.T
    sims[norms == 0.0] = -1.0
    relevance = np.clip(sims.max(axis=1), 0.0, None)
    total = relevance.sum()
    if total == 0.0:
        return np.full(len(vecs), 1.0 / len(vecs))
    return relevance / total


def represent_document(
    doc_id: str,
    tokens: tuple[str, ...] | list[str],
    vectors: np.ndarray,
    reps: list[ClassRepresentation],
) -> DocumentRepresentation:
    """Weight tokens by their best class similarity and average them.

    Tokens that resemble no class (all cosines non-positive) get zero
    weight; a document where every token is irrelevant falls back to the
    plain token average.
    """
    if len(tokens) == 0:
        raise ValidationError(f"document {doc_id!r} has no tokens")
    if vectors.shape[0] != len(tokens):
        raise ValidationError(
            f"document {doc_id!r}: {vectors.shape[0]} vectors for {len(tokens)} tokens"
        )
    class_units = unit_rows(class_matrix(reps))
    if vectors.shape[1] != class_units.shape[1]:
        raise ValidationError(
            f"document {doc_id!r}: token dim {vectors.shape[1]} does not match "
            f"class dim {class_units.shape[1]}"
        )
    weights = _token_weights(vectors, class_units)
    vector = weights @ vectors.astype(np.float64)
    return DocumentRepresentation(doc_id=doc_id, vector=vector, token_weights=weights)


def represent_corpus(
    corpus: Corpus,
    emb: EmbeddedCorpus,
    reps: list[ClassRepresentation],
    workers: int = 1,
) -> tuple[list[str], np.ndarray]:
    """Build the (N, dim) matrix of document vectors in corpus order."""
    doc_ids = [d.doc_id for d in corpus]

    def one(doc_id: str) -> np.ndarray:
        doc = corpus.document(doc_id)
        return represent_document(doc_id, doc.tokens, emb.doc(doc_id).vectors, reps).vector

    if workers > 1 and len(doc_ids) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, doc_ids))
    else:
        rows = [one(d) for d in doc_ids]
    return doc_ids, np.stack(rows) if rows else np.zeros((0, emb.dim))


def rep_predict(vector: np.ndarray, reps: list[ClassRepresentation]) -> str:
    """Label of the most similar class vector; ties go to taxonomy order."""
    return rep_predict_all(np.asarray(vector, dtype=np.float64)[None, :], reps)[0]


def rep_predict_all(matrix: np.ndarray, reps: list[ClassRepresentation]) -> list[str]:
    if not reps:
        raise ValidationError("no class representations given")
    class_units = unit_rows(class_matrix(reps))
    zero_classes = np.linalg.norm(class_units, axis=1) == 0.0
    m = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(m, axis=1)
    safe = np.where(norms > 0.0, norms, 1.0)
    sims = (m / safe[:, None]) @ class_units.T
    sims[:, zero_classes] = -1.0
    sims = np.where(norms[:, None] > 0.0, sims, -1.0)
    zero_docs = int((norms == 0.0).sum())
    if zero_docs:
        warnings.warn(
            f"{zero_docs} document vector(s) are all zeros; predicting the first class",
            stacklevel=2,
        )
    picks = sims.argmax(axis=1)
    return [reps[int(i)].class_name for i in picks]


def save_doc_matrix(
    doc_ids: list[str],
    matrix: np.ndarray,
    index_path: str | Path,
    blob_path: str | Path | None = None,
) -> None:
    if len(doc_ids) != matrix.shape[0]:
        raise ValidationError("document ids do not align with the matrix")
    blob_path = default_blob_path(index_path) if blob_path is None else Path(blob_path)
    dim = matrix.shape[1]
    lines = [f"{DOCS_MAGIC} {FORMAT_VERSION} dim={dim} count={len(doc_ids)}"]
    for i, doc_id in enumerate(doc_ids):
        if "\t" in doc_id or "\n" in doc_id:
            raise ValidationError(f"document id {doc_id!r} contains a separator")
        lines.append(f"{doc_id}\t{i * 4 * dim}")
    write_atomic(index_path, "".join(line + "\n" for line in lines))
    write_atomic(blob_path, np.ascontiguousarray(matrix, dtype="<f4").tobytes())


def load_doc_matrix(
    index_path: str | Path, blob_path: str | Path | None = None
) -> tuple[list[str], np.ndarray]:
    blob_path = default_blob_path(index_path) if blob_path is None else Path(blob_path)
    doc_ids: list[str] = []
    offsets: list[int] = []
    with open(index_path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        parts = header.split()
        if (
            len(parts) != 4
            or parts[0] != DOCS_MAGIC
            or parts[1] != FORMAT_VERSION
            or not parts[2].startswith("dim=")
            or not parts[3].startswith("count=")
        ):
            raise ValidationError(f"{index_path}: bad document matrix header {header!r}")
        dim, count = int(parts[2][4:]), int(parts[3][6:])
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise ValidationError(f"{index_path}: malformed row at line {lineno}")
            doc_ids.append(cols[0])
            try:
                offsets.append(int(cols[1]))
            except ValueError as exc:
                raise ValidationError(f"{index_path}: malformed row at line {lineno}") from exc
    if len(doc_ids) != count:
        raise ValidationError(f"{index_path}: header says {count} documents, found {len(doc_ids)}")
    if len(set(doc_ids)) != len(doc_ids):
        raise ValidationError(f"{index_path}: duplicate document ids")
    blob = Path(blob_path).read_bytes()
    matrix = np.empty((count, dim), dtype=np.float32)
    for i, offset in enumerate(offsets):
        if offset < 0 or offset + 4 * dim > len(blob):
            raise ValidationError(f"{index_path}: offset {offset} out of range for {doc_ids[i]!r}")
        matrix[i] = np.frombuffer(blob, dtype="<f4", count=dim, offset=offset)
    return doc_ids, matrix.astype(np.float64)
