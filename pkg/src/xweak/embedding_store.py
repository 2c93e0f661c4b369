"""Contextual embedding interchange and the averaged word table.

The interchange format is split across two files. The text index starts with
``XWEAK-EMB v1 dim=<D> count=<N>`` and then, per document, a ``#<id> <T>``
line followed by T lines of ``token<TAB>byte_offset``. Each offset addresses
the start of that token's D little-endian float32 values inside a sibling
binary blob (``<index>.bin`` by default). Offsets, dim, and count are part of
the contract and must survive round-trips bit for bit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Corpus
from .errors import ValidationError
from .fileio import default_blob_path, write_atomic

HEADER_MAGIC = "XWEAK-EMB"
VOCAB_MAGIC = "XWEAK-VOCAB"
FORMAT_VERSION = "v1"


@dataclass(frozen=True)
class DocEmbedding:
    tokens: tuple[str, ...]
    vectors: np.ndarray  # (T, dim) float32


class EmbeddedCorpus:
    """Per-document token sequences with one contextual vector per token."""

    def __init__(self, dim: int, docs: dict[str, DocEmbedding]):
        if dim < 1:
            raise ValidationError(f"embedding dim must be >= 1, got {dim}")
        for doc_id, doc in docs.items():
            if doc.vectors.shape != (len(doc.tokens), dim):
                raise ValidationError(
                    f"document {doc_id!r}: vector block shape {doc.vectors.shape} "
                    f"does not match {len(doc.tokens)} tokens of dim {dim}"
                )
        self.dim = dim
        self.docs = docs

    def __len__(self) -> int:
        return len(self.docs)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.docs

    def doc(self, doc_id: str) -> DocEmbedding:
        try:
            return self.docs[doc_id]
        except KeyError:
            raise ValidationError(f"no embeddings for document {doc_id!r}") from None


def _parse_header(line: str, path: str | Path) -> tuple[int, int]:
    parts = line.split()
    if (
        len(parts) != 4
        or parts[0] != HEADER_MAGIC
        or parts[1] != FORMAT_VERSION
        or not parts[2].startswith("dim=")
        or not parts[3].startswith("count=")
    ):
        raise ValidationError(f"{path}: bad interchange header {line!r}")
    try:
        return int(parts[2][4:]), int(parts[3][6:])
    except ValueError as exc:
        raise ValidationError(f"{path}: bad interchange header {line!r}") from exc


def load_embeddings(index_path: str | Path, blob_path: str | Path | None = None) -> EmbeddedCorpus:
    blob_path = default_blob_path(index_path) if blob_path is None else Path(blob_path)
    blob = Path(blob_path).read_bytes()
    docs: dict[str, DocEmbedding] = {}
    with open(index_path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        dim, count = _parse_header(header, index_path)
        for _ in range(count):
            head = fh.readline().rstrip("\n")
            if not head.startswith("#"):
                raise ValidationError(f"{index_path}: expected a document header, got {head!r}")
            try:
                doc_id, n_raw = head[1:].rsplit(" ", 1)
                n_tokens = int(n_raw)
            except ValueError as exc:
                raise ValidationError(f"{index_path}: bad document header {head!r}") from exc
            if doc_id in docs:
                raise ValidationError(f"{index_path}: duplicate document id {doc_id!r}")
            tokens: list[str] = []
            vectors = np.empty((n_tokens, dim), dtype=np.float32)
            for t in range(n_tokens):
                row = fh.readline().rstrip("\n")
                parts = row.split("\t")
                if len(parts) != 2:
                    raise ValidationError(
                        f"{index_path}: malformed token row for document {doc_id!r}"
                    )
                token, off_raw = parts
                try:
                    offset = int(off_raw)
                except ValueError as exc:
                    raise ValidationError(
                        f"{index_path}: bad offset {off_raw!r} for document {doc_id!r}"
                    ) from exc
                if offset < 0 or offset + 4 * dim > len(blob):
                    raise ValidationError(
                        f"{index_path}: offset {offset} out of range for document {doc_id!r}"
                    )
                tokens.append(token)
                vectors[t] = np.frombuffer(blob, dtype="<f4", count=dim, offset=offset)
            docs[doc_id] = DocEmbedding(tuple(tokens), vectors)
        trailer = fh.readline()
        if trailer.strip():
            raise ValidationError(f"{index_path}: trailing content after {count} documents")
    return EmbeddedCorpus(dim, docs)


def save_embeddings(
    emb: EmbeddedCorpus, index_path: str | Path, blob_path: str | Path | None = None
) -> None:
    blob_path = default_blob_path(index_path) if blob_path is None else Path(blob_path)
    lines = [f"{HEADER_MAGIC} {FORMAT_VERSION} dim={emb.dim} count={len(emb.docs)}"]
    chunks: list[bytes] = []
    offset = 0
    for doc_id, doc in emb.docs.items():
        if " " in doc_id or "\n" in doc_id or "\t" in doc_id:
            raise ValidationError(f"document id {doc_id!r} contains whitespace")
        lines.append(f"#{doc_id} {len(doc.tokens)}")
        block = np.ascontiguousarray(doc.vectors, dtype="<f4").tobytes()
        for t, token in enumerate(doc.tokens):
            lines.append(f"{token}\t{offset + 4 * emb.dim * t}")
        chunks.append(block)
        offset += len(block)
    write_atomic(index_path, "".join(line + "\n" for line in lines))
    write_atomic(blob_path, b"".join(chunks))


def validate_alignment(corpus: Corpus, emb: EmbeddedCorpus) -> None:
    """Check that embeddings cover the corpus with exactly matching tokens."""
    for doc in corpus:
        if doc.doc_id not in emb:
            raise ValidationError(f"no embeddings for document {doc.doc_id!r}")
        got = emb.doc(doc.doc_id).tokens
        if got != doc.tokens:
            n = min(len(got), len(doc.tokens))
            for pos in range(n):
                if got[pos] != doc.tokens[pos]:
                    raise ValidationError(
                        f"document {doc.doc_id!r}: token mismatch at position {pos + 1}: "
                        f"corpus has {doc.tokens[pos]!r}, embeddings have {got[pos]!r}"
                    )
            raise ValidationError(
                f"document {doc.doc_id!r}: token count mismatch: "
                f"corpus has {len(doc.tokens)}, embeddings have {len(got)}"
            )
    for doc_id in emb.docs:
        if doc_id not in corpus:
            raise ValidationError(f"embeddings contain unknown document {doc_id!r}")


class WordEmbeddingTable:
    """Static word vectors: the mean of every contextual occurrence.

    Sums accumulate in 64-bit and the stored mean is float32. Words are kept
    in lexicographic order so the table is independent of document order.
    """

    def __init__(self, words: tuple[str, ...], vectors: np.ndarray, counts: tuple[int, ...]):
        if vectors.shape[0] != len(words) or len(counts) != len(words):
            raise ValidationError("word table arrays are misaligned")
        self.words = words
        self.vectors = vectors
        self.counts = counts
        self.dim = int(vectors.shape[1]) if vectors.ndim == 2 else 0
        self._index = {w: i for i, w in enumerate(words)}

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def index_of(self, word: str) -> int:
        try:
            return self._index[word]
        except KeyError:
            raise ValidationError(f"word {word!r} is not in the vocabulary") from None

    def vector(self, word: str) -> np.ndarray:
        return self.vectors[self.index_of(word)]

    def count(self, word: str) -> int:
        return self.counts[self.index_of(word)]


def _accumulate(
    doc_items: list[tuple[str, DocEmbedding]], dim: int
) -> dict[str, list]:
    # Entries are [sum vector (float64), occurrence count].
    acc: dict[str, list] = {}
    for _, doc in doc_items:
        block = doc.vectors.astype(np.float64)
        for t, token in enumerate(doc.tokens):
            entry = acc.get(token)
            if entry is None:
                acc[token] = [block[t].copy(), 1]
            else:
                entry[0] += block[t]
                entry[1] += 1
    return acc


def build_word_table(emb: EmbeddedCorpus, min_freq: int, workers: int = 1) -> WordEmbeddingTable:
    """Average contextual occurrences into one vector per frequent word."""
    if min_freq < 1:
        raise ValidationError(f"min_freq must be >= 1, got {min_freq}")
    items = list(emb.docs.items())
    if workers > 1 and len(items) > 1:
        step = (len(items) + workers - 1) // workers
        chunks = [items[i : i + step] for i in range(0, len(items), step)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda c: _accumulate(c, emb.dim), chunks))
        # Merge in chunk order so the reduction order is fixed per worker count.
        acc: dict[str, list] = {}
        for part in partials:
            for word, (vec, count) in part.items():
                entry = acc.get(word)
                if entry is None:
                    acc[word] = [vec, count]
                else:
                    entry[0] += vec
                    entry[1] += count
    else:
        acc = _accumulate(items, emb.dim)
    kept = sorted(w for w, (_, c) in acc.items() if c >= min_freq)
    vectors = np.zeros((len(kept), emb.dim), dtype=np.float32)
    counts = []
    for i, word in enumerate(kept):
        vec, count = acc[word]
        vectors[i] = (vec / count).astype(np.float32)
        counts.append(count)
    return WordEmbeddingTable(tuple(kept), vectors, tuple(counts))


def save_word_table(
    table: WordEmbeddingTable, index_path: str | Path, blob_path: str | Path | None = None
) -> None:
    blob_path = default_blob_path(index_path) if blob_path is None else Path(blob_path)
    lines = [f"{VOCAB_MAGIC} {FORMAT_VERSION} dim={table.dim} count={len(table)}"]
    for i, word in enumerate(table.words):
        lines.append(f"{word}\t{table.counts[i]}\t{i * 4 * table.dim}")
    write_atomic(index_path, "".join(line + "\n" for line in lines))
    write_atomic(blob_path, np.ascontiguousarray(table.vectors, dtype="<f4").tobytes())


def load_word_table(
    index_path: str | Path, blob_path: str | Path | None = None
) -> WordEmbeddingTable:
    blob_path = default_blob_path(index_path) if blob_path is None else Path(blob_path)
    blob = Path(blob_path).read_bytes()
    words: list[str] = []
    counts: list[int] = []
    offsets: list[int] = []
    with open(index_path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        parts = header.split()
        if (
            len(parts) != 4
            or parts[0] != VOCAB_MAGIC
            or parts[1] != FORMAT_VERSION
            or not parts[2].startswith("dim=")
            or not parts[3].startswith("count=")
        ):
            raise ValidationError(f"{index_path}: bad vocabulary header {header!r}")
        dim, count = int(parts[2][4:]), int(parts[3][6:])
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise ValidationError(f"{index_path}: malformed vocabulary row at line {lineno}")
            words.append(cols[0])
            try:
                counts.append(int(cols[1]))
                offsets.append(int(cols[2]))
            except ValueError as exc:
                raise ValidationError(
                    f"{index_path}: malformed vocabulary row at line {lineno}"
                ) from exc
    if len(words) != count:
        raise ValidationError(f"{index_path}: header says {count} words, found {len(words)}")
    vectors = np.empty((len(words), dim), dtype=np.float32)
    for i, offset in enumerate(offsets):
        if offset < 0 or offset + 4 * dim > len(blob):
            raise ValidationError(f"{index_path}: offset {offset} out of range for {words[i]!r}")
        vectors[i] = np.frombuffer(blob, dtype="<f4", count=dim, offset=offset)
    return WordEmbeddingTable(tuple(words), vectors, tuple(counts))
