from __future__ import annotations

import numpy as np
import pytest

from xweak.corpus import Corpus, Document, Taxonomy, tokenize
from xweak.embedding_store import DocEmbedding, EmbeddedCorpus, WordEmbeddingTable


def make_corpus(rows: list[tuple[str, str | None, str]]) -> Corpus:
    docs = tuple(
        Document(doc_id, text, tuple(tokenize(text)), label) for doc_id, label, text in rows
    )
    return Corpus(docs)


def make_embedded(entries: dict[str, tuple[list[str], np.ndarray]]) -> EmbeddedCorpus:
    dim = next(iter(entries.values()))[1].shape[1]
    docs = {
        doc_id: DocEmbedding(tuple(tokens), np.asarray(vectors, dtype=np.float32))
        for doc_id, (tokens, vectors) in entries.items()
    }
    return EmbeddedCorpus(dim, docs)


def make_table(vocab: dict[str, list[float]], count: int = 5) -> WordEmbeddingTable:
    words = tuple(sorted(vocab))
    vectors = np.array([vocab[w] for w in words], dtype=np.float32)
    return WordEmbeddingTable(words, vectors, tuple(count for _ in words))


@pytest.fixture
def two_cluster_table() -> WordEmbeddingTable:
    """Two tight orthogonal word clusters plus their seed words."""
    return make_table(
        {
            "alpha": [1.0, 0.0, 0.0],
            "alef": [0.99, 0.01, 0.0],
            "aleph": [0.98, 0.02, 0.0],
            "beta": [0.0, 1.0, 0.0],
            "bet": [0.01, 0.99, 0.0],
            "beth": [0.02, 0.98, 0.0],
        }
    )


@pytest.fixture
def ab_taxonomy() -> Taxonomy:
    return Taxonomy.with_seeds([("A", ["alpha"]), ("B", ["beta"])])


def disagreement_instance(
    seed: int = 0, n_per: int = 20, with_special: bool = True
) -> tuple[list[str], np.ndarray, list, dict[str, str]]:
    """Two position clusters plus one document built to split the two labelers.

    Cosine ignores magnitude, Euclidean position does not, and that is the
    wedge. Cluster A sits at radius 4 along x, cluster B at radius 2 along y,
    and the class vectors point at the cluster centers. The special document
    (1.638, 1.147, 0) lies at angle 35 degrees and radius 2: by angle it is
    closer to A (35 vs 55 degrees), but its position is 1.85 from B's center
    against 2.63 from A's, so clustering confidently calls it B.
    """
    from xweak.class_repr import ClassRepresentation, zipf_weights

    rng = np.random.default_rng(seed)
    a = rng.normal([4.0, 0.0, 0.0], [0.1, 0.1, 0.02], size=(n_per, 3))
    b = rng.normal([0.0, 2.0, 0.0], [0.1, 0.1, 0.02], size=(n_per, 3))
    ids = [f"a{i:02d}" for i in range(n_per)] + [f"b{i:02d}" for i in range(n_per)]
    gold = {doc_id: ("A" if doc_id[0] == "a" else "B") for doc_id in ids}
    features = np.vstack([a, b])
    if with_special:
        features = np.vstack([features, [[1.638, 1.147, 0.0]]])
        ids.append("a-special")
        gold["a-special"] = "A"
    reps = [
        ClassRepresentation("A", ("a",), zipf_weights(1), np.array([4.0, 0.0, 0.0])),
        ClassRepresentation("B", ("b",), zipf_weights(1), np.array([0.0, 2.0, 0.0])),
    ]
    return ids, features, reps, gold
