"""Metrics, pseudo-label scoring, and the planted-cluster synthetic generator."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .alignment import PseudoLabel
from .corpus import Corpus, Document, Taxonomy
from .embedding_store import DocEmbedding, EmbeddedCorpus
from .errors import ValidationError
from .fileio import write_atomic


@dataclass(frozen=True, eq=False)
class MetricsReport:
    classes: tuple[str, ...]
    accuracy: float
    precision: dict[str, float]
    recall: dict[str, float]
    f1: dict[str, float]
    support: dict[str, int]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    confusion: np.ndarray = field(repr=False)  # (K, K) int, rows gold, cols predicted

    def key_value_lines(self) -> list[str]:
        lines = [
            f"accuracy={self.accuracy:.4f}",
            f"macro_precision={self.macro_precision:.4f}",
            f"macro_recall={self.macro_recall:.4f}",
            f"macro_f1={self.macro_f1:.4f}",
        ]
        for name in self.classes:
            lines.append(f"precision_{name}={self.precision[name]:.4f}")
            lines.append(f"recall_{name}={self.recall[name]:.4f}")
            lines.append(f"f1_{name}={self.f1[name]:.4f}")
        return lines

    def format_table(self) -> str:
        width = max([len("class")] + [len(c) for c in self.classes])
        rows = [
            f"{'class':<{width}}  precision  recall  f1      support",
            f"{'-' * width}  ---------  ------  ------  -------",
        ]
        for name in self.classes:
            rows.append(
                f"{name:<{width}}  {self.precision[name]:>9.4f}  {self.recall[name]:>6.4f}  "
                f"{self.f1[name]:>6.4f}  {self.support[name]:>7d}"
            )
        rows.append("")
        rows.append(f"accuracy  {self.accuracy:.4f}")
        rows.append(f"macro     P={self.macro_precision:.4f} R={self.macro_recall:.4f} F1={self.macro_f1:.4f}")
        return "\n".join(rows)

    def save(self, path: str | Path) -> None:
        write_atomic(path, self.format_table() + "\n\n" + "\n".join(self.key_value_lines()) + "\n")


def compute_metrics(gold: list[str], pred: list[str], taxonomy: Taxonomy) -> MetricsReport:
    """Accuracy plus per-class and macro precision, recall, and F1.

    Any zero denominator yields a 0.0 score rather than an error, so a class
    that is never predicted (or never occurs) still reports cleanly. Macro
    averages run over every taxonomy class, present or not.
    """
    if len(gold) != len(pred):
        raise ValidationError(f"{len(gold)} gold labels against {len(pred)} predictions")
    if not gold:
        raise ValidationError("cannot compute metrics over zero documents")
    classes = taxonomy.classes
    index = {c: i for i, c in enumerate(classes)}
    confusion = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for g, p in zip(gold, pred):
        if g not in index:
            raise ValidationError(f"gold label {g!r} is not a known class")
        if p not in index:
            raise ValidationError(f"predicted label {p!r} is not a known class")
        confusion[index[g], index[p]] += 1

    precision: dict[str, float] = {}
    recall: dict[str, float] = {}
    f1: dict[str, float] = {}
    support: dict[str, int] = {}
    for name in classes:
        i = index[name]
        tp = int(confusion[i, i])
        pred_total = int(confusion[:, i].sum())
        gold_total = int(confusion[i, :].sum())
        p = tp / pred_total if pred_total else 0.0
        r = tp / gold_total if gold_total else 0.0
        f = 2.0 * p * r / (p + r) if p + r else 0.0
        precision[name], recall[name], f1[name] = p, r, f
        support[name] = gold_total
    return MetricsReport(
        classes=classes,
        accuracy=float(np.trace(confusion)) / len(gold),
        precision=precision,
        recall=recall,
        f1=f1,
        support=support,
        macro_precision=sum(precision.values()) / len(classes),
        macro_recall=sum(recall.values()) / len(classes),
        macro_f1=sum(f1.values()) / len(classes),
        confusion=confusion,
    )


def pseudo_label_accuracy(
    records: Iterable[PseudoLabel],
    gold: Mapping[str, str],
    taxonomy: Taxonomy,
    mapping: Mapping[str, str] | None = None,
) -> MetricsReport:
    """Score the selected pseudo-labels against gold, as a full report.

    Only selected documents count. When the gold labels live in a different
    taxonomy, ``mapping`` translates them into the pseudo-label space first;
    ``taxonomy`` is always the space the pseudo-labels themselves use.
    """
    selected = [r for r in records if r.selected]
    if not selected:
        raise ValidationError("no selected documents to score")
    expected = []
    for r in selected:
        if r.doc_id not in gold:
            raise ValidationError(f"selected document {r.doc_id!r} has no gold label")
        expect = gold[r.doc_id]
        if mapping is not None:
            if expect not in mapping:
                raise ValidationError(f"gold label {expect!r} has no mapping entry")
            expect = mapping[expect]
        expected.append(expect)
    return compute_metrics(expected, [r.gmm_label for r in selected], taxonomy)


@dataclass(frozen=True, eq=False)
class SyntheticData:
    corpus: Corpus
    embedded: EmbeddedCorpus
    taxonomy: Taxonomy
    gold: dict[str, str]


def generate_synthetic(
    n_classes: int,
    docs_per_class: int,
    dim: int,
    noise_sigma: float,
    vocab_per_class: int,
    seed: int,
    *,
    tokens_per_doc: int = 10,
    own_fraction: float = 0.9,
    anchors: np.ndarray | None = None,
) -> SyntheticData:
    """Planted-cluster corpus with known gold labels.

    Each class owns ``vocab_per_class`` words whose contextual vectors sit at
    the class anchor plus isotropic Gaussian noise. Documents draw
    ``tokens_per_doc`` words, ``own_fraction`` of them from the owning class.
    Anchors default to orthogonal axes; pass a custom (n_classes, dim) array
    to control the geometry, e.g. to build distribution-shifted twins. The
    same seed always reproduces the same corpus byte for byte.
    """
    if n_classes < 1:
        raise ValidationError(f"need at least one class, got {n_classes}")
    if docs_per_class < 1 or tokens_per_doc < 1 or vocab_per_class < 1:
        raise ValidationError("document, token, and vocabulary counts must be >= 1")
    if noise_sigma < 0.0:
        raise ValidationError(f"noise sigma must be >= 0, got {noise_sigma}")
    if not 0.0 <= own_fraction <= 1.0:
        raise ValidationError(f"own fraction must be in [0, 1], got {own_fraction}")
    if anchors is None:
        if dim < n_classes:
            raise ValidationError(
                f"dim {dim} cannot hold {n_classes} orthogonal class anchors"
            )
        anchors = np.eye(dim)[:n_classes]
    else:
        anchors = np.asarray(anchors, dtype=np.float64)
        if anchors.shape != (n_classes, dim):
            raise ValidationError(
                f"anchors of shape {anchors.shape} do not match ({n_classes}, {dim})"
            )

    rng = np.random.default_rng(seed)
    names = [f"class{c}" for c in range(n_classes)]
    words = [[f"{name}w{k}" for k in range(vocab_per_class)] for name in names]

    documents: list[Document] = []
    embedded: dict[str, DocEmbedding] = {}
    gold: dict[str, str] = {}
    for c, name in enumerate(names):
        for i in range(docs_per_class):
            doc_id = f"{name}-{i:04d}"
            token_list: list[str] = []
            owner: list[int] = []
            for _ in range(tokens_per_doc):
                if n_classes == 1 or rng.random() < own_fraction:
                    source = c
                else:
                    source = int(rng.integers(0, n_classes - 1))
                    if source >= c:
                        source += 1
                token_list.append(words[source][int(rng.integers(0, vocab_per_class))])
                owner.append(source)
            vectors = anchors[owner] + rng.normal(0.0, noise_sigma, (tokens_per_doc, dim))
            text = " ".join(token_list)
            documents.append(Document(doc_id, text, tuple(token_list), name))
            embedded[doc_id] = DocEmbedding(tuple(token_list), vectors.astype(np.float32))
            gold[doc_id] = name
    taxonomy = Taxonomy.with_seeds([(name, [words[c][0]]) for c, name in enumerate(names)])
    return SyntheticData(
        corpus=Corpus(tuple(documents)),
        embedded=EmbeddedCorpus(dim, embedded),
        taxonomy=taxonomy,
        gold=gold,
    )
