"""Cross-taxonomy transfer: mapping predictions, retraining, and ablations.

A category mapping sends classes of a source taxonomy into a target
taxonomy. Predictions can be post-processed through the mapping, or the weak
pipeline can be retrained from scratch against the target taxonomy. The
ablation grid crosses the training document collection with the origin of the
class definitions to separate the two effects.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .alignment import PseudoLabelSet, fit_gmm, fit_pca, pseudo_label
from .class_repr import ClassRepresentation, class_matrix, expand_classes
from .classifier import LinearClassifier, train_classifier
from .config import PipelineConfig
from .corpus import Corpus, Document, Taxonomy
from .doc_repr import represent_corpus
from .embedding_store import EmbeddedCorpus, build_word_table, validate_alignment
from .errors import ValidationError
from .evaluation import MetricsReport, compute_metrics
from .fileio import write_atomic


class TaxonomyRelation(enum.Enum):
    ONE_TO_ONE = "one_to_one"
    N_TO_ONE = "n_to_one"
    N_TO_N = "n_to_n"


def load_mapping(
    path: str | Path,
    source_taxonomy: Taxonomy | None = None,
    target_taxonomy: Taxonomy | None = None,
) -> dict[str, str]:
    """Read ``source_class<TAB>target_class`` lines into a mapping."""
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ValidationError(f"{path}: malformed mapping at line {lineno}")
            src, dst = parts
            if src in mapping:
                raise ValidationError(f"{path}: class {src!r} is mapped twice")
            mapping[src] = dst
    if not mapping:
        raise ValidationError(f"{path}: mapping file is empty")
    if source_taxonomy is not None or target_taxonomy is not None:
        validate_mapping(mapping, source_taxonomy, target_taxonomy)
    return mapping


def save_mapping(mapping: dict[str, str], path: str | Path) -> None:
    write_atomic(path, "".join(f"{s}\t{t}\n" for s, t in mapping.items()))


def validate_mapping(
    mapping: dict[str, str],
    source_taxonomy: Taxonomy | None,
    target_taxonomy: Taxonomy | None,
) -> None:
    if source_taxonomy is not None:
        for src in mapping:
            if src not in source_taxonomy.classes:
                raise ValidationError(f"mapped class {src!r} is not in the source taxonomy")
    if target_taxonomy is not None:
        for dst in mapping.values():
            if dst not in target_taxonomy.classes:
                raise ValidationError(f"mapping target {dst!r} is not in the target taxonomy")


def classify_relation(
    source_taxonomy: Taxonomy, target_taxonomy: Taxonomy, mapping: dict[str, str]
) -> TaxonomyRelation:
    """How the mapping relates the two taxonomies.

    A bijection onto the target classes is one-to-one; covering every target
    class without being injective is N-to-one; leaving any target class
    without a preimage is N-to-N, where post-processing alone cannot reach
    the full target label space.
    """
    validate_mapping(mapping, source_taxonomy, target_taxonomy)
    covered = set(mapping.values())
    if covered != set(target_taxonomy.classes):
        return TaxonomyRelation.N_TO_N
    if len(covered) == len(mapping):
        return TaxonomyRelation.ONE_TO_ONE
    return TaxonomyRelation.N_TO_ONE


def postprocess_predictions(
    pairs: list[tuple[str, str]], mapping: dict[str, str]
) -> list[tuple[str, str]]:
    """Substitute every predicted label through the mapping."""
    out = []
    for doc_id, label in pairs:
        if label not in mapping:
            raise ValidationError(f"predicted label {label!r} has no mapping entry")
        out.append((doc_id, mapping[label]))
    return out


def relabel_corpus(corpus: Corpus, mapping: dict[str, str]) -> Corpus:
    """Map every gold label into the target taxonomy; unlabeled docs pass through."""
    docs = []
    for doc in corpus:
        if doc.gold_label is None:
            docs.append(doc)
            continue
        if doc.gold_label not in mapping:
            raise ValidationError(
                f"gold label {doc.gold_label!r} of document {doc.doc_id!r} has no mapping entry"
            )
        docs.append(Document(doc.doc_id, doc.text, doc.tokens, mapping[doc.gold_label]))
    return Corpus(tuple(docs), dropped_empty=corpus.dropped_empty)


@dataclass(frozen=True, eq=False)
class PipelineResult:
    doc_ids: list[str]
    features: np.ndarray  # (N, dim) document vectors, before projection
    pseudo: PseudoLabelSet
    classifier: LinearClassifier


def run_weak_pipeline(
    corpus: Corpus,
    embedded: EmbeddedCorpus,
    reps: list[ClassRepresentation],
    settings: PipelineConfig,
    workers: int = 1,
) -> PipelineResult:
    """Represent, project, cluster, select, and train on one corpus."""
    settings.validate()
    validate_alignment(corpus, embedded)
    doc_ids, features = represent_corpus(corpus, embedded, reps, workers)
    pca = fit_pca(features, settings.pca_dim)
    projected = pca.transform(features)
    init_means = pca.transform(class_matrix(reps))
    gmm = fit_gmm(projected, init_means)
    pseudo = pseudo_label(
        gmm, projected, doc_ids, features, reps, settings.conf_threshold, settings.mode
    )
    picked = pseudo.selected()
    index = {doc_id: i for i, doc_id in enumerate(doc_ids)}
    train_x = features[[index[r.doc_id] for r in picked]] if picked else features[:0]
    model = train_classifier(
        train_x,
        [r.gmm_label for r in picked],
        pseudo.classes,
        l2_strength=settings.l2_strength,
        learning_rate=settings.learning_rate,
        epochs=settings.epochs,
    )
    return PipelineResult(doc_ids=doc_ids, features=features, pseudo=pseudo, classifier=model)


def run_retrain(
    source_corpus: Corpus,
    source_embedded: EmbeddedCorpus,
    target_taxonomy: Taxonomy,
    settings: PipelineConfig,
    workers: int = 1,
) -> tuple[list[ClassRepresentation], PipelineResult]:
    """Rerun the pipeline on source documents under the target taxonomy.

    The target seeds must occur in the source vocabulary; expansion then
    produces target-class definitions grounded in source text.
    """
    table = build_word_table(source_embedded, settings.min_freq, workers)
    reps = expand_classes(table, target_taxonomy, settings.expansion_limit)
    return reps, run_weak_pipeline(source_corpus, source_embedded, reps, settings, workers)


@dataclass(frozen=True)
class AblationChoice:
    docs: str
    class_defs: str

    def __post_init__(self) -> None:
        for field_name, value in (("docs", self.docs), ("class_defs", self.class_defs)):
            if value not in ("source", "target"):
                raise ValidationError(
                    f"ablation {field_name} must be 'source' or 'target', got {value!r}"
                )


# The fourth cell (target docs, source definitions) answers no question the
# grid is asked, so it is never instantiated.
ABLATION_GRID = (
    AblationChoice("source", "source"),
    AblationChoice("source", "target"),
    AblationChoice("target", "target"),
)


@dataclass(frozen=True, eq=False)
class DatasetBundle:
    name: str
    corpus: Corpus
    embedded: EmbeddedCorpus
    taxonomy: Taxonomy


def dataset_class_reps(
    bundle: DatasetBundle, settings: PipelineConfig, workers: int = 1
) -> list[ClassRepresentation]:
    table = build_word_table(bundle.embedded, settings.min_freq, workers)
    return expand_classes(table, bundle.taxonomy, settings.expansion_limit)


def run_ablation(
    choice: AblationChoice,
    source: DatasetBundle,
    target: DatasetBundle,
    eval_corpus: Corpus,
    eval_embedded: EmbeddedCorpus,
    mapping: dict[str, str] | None,
    settings: PipelineConfig,
    workers: int = 1,
) -> tuple[MetricsReport, list[tuple[str, str]]]:
    """Train under one grid cell and evaluate on the held-out target data.

    Class definitions come from the dataset named by ``choice.class_defs``
    and training documents from ``choice.docs``. Predictions made in the
    source taxonomy are post-processed through ``mapping`` before scoring
    against the target gold labels.
    """
    defs_bundle = source if choice.class_defs == "source" else target
    docs_bundle = source if choice.docs == "source" else target
    reps = dataset_class_reps(defs_bundle, settings, workers)
    result = run_weak_pipeline(docs_bundle.corpus, docs_bundle.embedded, reps, settings, workers)
    validate_alignment(eval_corpus, eval_embedded)
    eval_ids, eval_features = represent_corpus(eval_corpus, eval_embedded, reps, workers)
    pairs = list(zip(eval_ids, result.classifier.predict(eval_features)))
    if defs_bundle.taxonomy.classes != target.taxonomy.classes:
        if mapping is None:
            raise ValidationError(
                f"predictions are in the {defs_bundle.name!r} taxonomy; "
                "a category mapping is required to evaluate them"
            )
        pairs = postprocess_predictions(pairs, mapping)
    gold = eval_corpus.gold_labels()
    for doc_id, _ in pairs:
        if doc_id not in gold:
            raise ValidationError(f"evaluation document {doc_id!r} has no gold label")
    report = compute_metrics(
        [gold[doc_id] for doc_id, _ in pairs],
        [label for _, label in pairs],
        target.taxonomy,
    )
    return report, pairs


def run_ablation_grid(
    source: DatasetBundle,
    target: DatasetBundle,
    eval_corpus: Corpus,
    eval_embedded: EmbeddedCorpus,
    mapping: dict[str, str] | None,
    settings: PipelineConfig,
    workers: int = 1,
) -> list[tuple[AblationChoice, MetricsReport]]:
    out = []
    for choice in ABLATION_GRID:
        report, _ = run_ablation(
            choice, source, target, eval_corpus, eval_embedded, mapping, settings, workers
        )
        out.append((choice, report))
    return out
