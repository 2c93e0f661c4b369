"""Class keyword expansion and harmonic-weighted class vectors.

Each class starts from its seed words and repeatedly absorbs the vocabulary
word most similar to its current vector. The class vector is the rank-weighted
average of its keyword vectors, with weight 1/j for the keyword at rank j,
normalized so the weights sum to one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Taxonomy
from .embedding_store import WordEmbeddingTable
from .errors import ValidationError
from .fileio import default_blob_path, write_atomic
from .vectors import unit_rows


@dataclass(frozen=True, eq=False)
class ClassRepresentation:
    class_name: str
    keywords: tuple[str, ...]
    weights: np.ndarray = field(repr=False)  # (n,) float64, sums to 1
    vector: np.ndarray = field(repr=False)  # (dim,) float64


def zipf_weights(n: int) -> np.ndarray:
    """Normalized harmonic weights (1, 1/2, ..., 1/n) / H_n."""
    if n < 1:
        raise ValidationError(f"weight count must be >= 1, got {n}")
    raw = 1.0 / np.arange(1, n + 1, dtype=np.float64)
    return raw / raw.sum()


def rebuild_vector(keywords: list[str] | tuple[str, ...], table: WordEmbeddingTable) -> np.ndarray:
    """Recompute a class vector from its ranked keyword list.

    Pure function of the arguments, accumulated in 64-bit; serialization and
    deserialization of a class report must agree with this to within float32
    rounding.
    """
    if not keywords:
        raise ValidationError("cannot build a class vector from zero keywords")
    weights = zipf_weights(len(keywords))
    out = np.zeros(table.dim, dtype=np.float64)
    for w, word in zip(weights, keywords):
        out += w * table.vector(word).astype(np.float64)
    return out


def class_matrix(reps: list[ClassRepresentation]) -> np.ndarray:
    if not reps:
        raise ValidationError("no class representations given")
    return np.stack([r.vector for r in reps]).astype(np.float64)


def _cosine_table(unit_vocab: np.ndarray, zero_rows: np.ndarray, vec: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        return np.full(unit_vocab.shape[0], -1.0)
    cos = unit_vocab @ (vec / norm)
    cos[zero_rows] = -1.0
    return cos


def _nearest_set(
    unit_vocab: np.ndarray, zero_rows: np.ndarray, words: tuple[str, ...], vec: np.ndarray, k: int
) -> set[str]:
    cos = _cosine_table(unit_vocab, zero_rows, vec)
    order = sorted(range(len(words)), key=lambda j: (-cos[j], words[j]))
    return {words[j] for j in order[:k]}


def expand_classes(
    table: WordEmbeddingTable, taxonomy: Taxonomy, limit: int
) -> list[ClassRepresentation]:
    """Grow keyword lists for every class and return their representations.

    Parameters
    ----------
    table:
        Averaged word vectors over the corpus vocabulary.
    taxonomy:
        Ordered classes with seed words. Seeds must exist in the vocabulary
        and no word may seed two classes.
    limit:
        Maximum keywords per class, seeds included.

    Returns
    -------
    One representation per class, in taxonomy order. Keyword lists are
    disjoint across classes and each vector satisfies ``rebuild_vector``
    exactly.

    Notes
    -----
    Expansion runs in synchronized rounds. Every active class nominates the
    unassigned vocabulary word with the highest cosine against its current
    vector; only strictly positive cosines qualify, so orthogonal or
    degenerate words are never absorbed. When two classes nominate the same
    word the higher cosine wins (taxonomy order on exact ties) and the losers
    sit the round out. After a class absorbs a word, its |keywords| nearest
    vocabulary words are recomputed; if that set is no longer exactly its
    keyword set, the word is given back and the class stops expanding for
    good. Multi-seed classes nominate from the unweighted seed mean until
    their first absorption.
    """
    if limit < 1:
        raise ValidationError(f"expansion limit must be >= 1, got {limit}")
    if len(table) == 0:
        raise ValidationError("vocabulary is empty")
    seen_seeds: dict[str, str] = {}
    for name in taxonomy.classes:
        seeds = taxonomy.seeds_for(name)
        if len(seeds) > limit:
            raise ValidationError(
                f"class {name!r} has {len(seeds)} seeds but the expansion limit is {limit}"
            )
        for seed in seeds:
            if seed not in table:
                raise ValidationError(f"seed {seed!r} of class {name!r} is not in the vocabulary")
            if seed in seen_seeds:
                raise ValidationError(
                    f"seed {seed!r} is shared by classes {seen_seeds[seed]!r} and {name!r}"
                )
            seen_seeds[seed] = name

    unit_vocab = unit_rows(table.vectors)
    zero_rows = np.linalg.norm(table.vectors.astype(np.float64), axis=1) == 0.0
    words = table.words

    keywords: list[list[str]] = [list(taxonomy.seeds_for(n)) for n in taxonomy.classes]
    vectors: list[np.ndarray] = []
    for kw in keywords:
        seed_block = np.stack([table.vector(w).astype(np.float64) for w in kw])
        vectors.append(seed_block.mean(axis=0))
    active = [True] * len(taxonomy.classes)
    assigned_mask = np.zeros(len(words), dtype=bool)
    for seed in seen_seeds:
        assigned_mask[table.index_of(seed)] = True

    while True:
        ready = [i for i in range(len(active)) if active[i] and len(keywords[i]) < limit]
        if not ready:
            break
        nominations: dict[str, tuple[float, int]] = {}
        for i in ready:
            cand = _cosine_table(unit_vocab, zero_rows, vectors[i])
            cand[assigned_mask] = -np.inf
            cand[cand <= 0.0] = -np.inf
            best_cos = cand.max() if cand.size else -np.inf
            if not np.isfinite(best_cos):
                continue
            word = min(words[j] for j in np.flatnonzero(cand == best_cos))
            held = nominations.get(word)
            # Conflicts go to the higher cosine; exact ties to the earlier class.
            if held is None or best_cos > held[0]:
                nominations[word] = (float(best_cos), i)
        if not nominations:
            break
        for word, (_, i) in sorted(nominations.items()):
            keywords[i].append(word)
            assigned_mask[table.index_of(word)] = True
            vectors[i] = rebuild_vector(keywords[i], table)
            nearest = _nearest_set(unit_vocab, zero_rows, words, vectors[i], len(keywords[i]))
            if nearest != set(keywords[i]):
                keywords[i].pop()
                assigned_mask[table.index_of(word)] = False
                vectors[i] = rebuild_vector(keywords[i], table)
                active[i] = False
            elif len(keywords[i]) >= limit:
                active[i] = False

    reps = []
    for name, kw in zip(taxonomy.classes, keywords):
        reps.append(
            ClassRepresentation(
                class_name=name,
                keywords=tuple(kw),
                weights=zipf_weights(len(kw)),
                vector=rebuild_vector(kw, table),
            )
        )
    return reps


def save_class_report(
    reps: list[ClassRepresentation], path: str | Path, blob_path: str | Path | None = None
) -> None:
    """Write ``class<TAB>rank<TAB>keyword<TAB>weight`` rows plus a vector blob."""
    blob_path = default_blob_path(path) if blob_path is None else Path(blob_path)
    lines = []
    for rep in reps:
        for rank, (word, weight) in enumerate(zip(rep.keywords, rep.weights), start=1):
            lines.append(f"{rep.class_name}\t{rank}\t{word}\t{weight:.10f}")
    write_atomic(path, "".join(line + "\n" for line in lines))
    blob = np.stack([rep.vector for rep in reps]).astype("<f4")
    write_atomic(blob_path, np.ascontiguousarray(blob).tobytes())


def load_class_report(
    path: str | Path, blob_path: str | Path | None = None
) -> list[ClassRepresentation]:
    blob_path = default_blob_path(path) if blob_path is None else Path(blob_path)
    order: list[str] = []
    rows: dict[str, list[tuple[int, str, float]]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValidationError(f"{path}: malformed report row at line {lineno}")
            name, rank_raw, word, weight_raw = parts
            try:
                rank = int(rank_raw)
                weight = float(weight_raw)
            except ValueError as exc:
                raise ValidationError(f"{path}: malformed report row at line {lineno}") from exc
            if name not in rows:
                order.append(name)
                rows[name] = []
            rows[name].append((rank, word, weight))
    if not order:
        raise ValidationError(f"{path}: class report is empty")
    blob = Path(blob_path).read_bytes()
    if len(blob) % (4 * len(order)) != 0:
        raise ValidationError(f"{blob_path}: blob size does not fit {len(order)} class vectors")
    dim = len(blob) // (4 * len(order))
    vectors = np.frombuffer(blob, dtype="<f4").reshape(len(order), dim)
    reps = []
    for i, name in enumerate(order):
        entries = sorted(rows[name])
        ranks = [r for r, _, _ in entries]
        if ranks != list(range(1, len(entries) + 1)):
            raise ValidationError(f"{path}: class {name!r} has non-contiguous keyword ranks")
        kws = tuple(w for _, w, _ in entries)
        if len(set(kws)) != len(kws):
            raise ValidationError(f"{path}: class {name!r} repeats a keyword")
        weights = zipf_weights(len(kws))
        for (_, word, got), expect in zip(entries, weights):
            if abs(got - expect) > 1e-4:
                raise ValidationError(
                    f"{path}: weight {got} for keyword {word!r} of class {name!r} "
                    f"does not match its rank"
                )
        reps.append(
            ClassRepresentation(
                class_name=name,
                keywords=kws,
                weights=weights,
                vector=vectors[i].astype(np.float64),
            )
        )
    return reps
