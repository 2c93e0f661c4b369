"""Seed-driven weak text classification over precomputed embeddings."""

from .alignment import (
    GmmModel,
    PcaModel,
    PseudoLabel,
    PseudoLabelSet,
    fit_gmm,
    fit_pca,
    pseudo_label,
)
from .baselines import (
    VotingRule,
    expanded_voting_rule,
    keyword_vote,
    majority_class,
    name_voting_rule,
)
from .class_repr import ClassRepresentation, expand_classes, rebuild_vector, zipf_weights
from .classifier import LinearClassifier, train_classifier
from .config import PipelineConfig, parse_config_file
from .corpus import Corpus, Document, Taxonomy, load_corpus, load_taxonomy, tokenize
from .doc_repr import rep_predict, represent_corpus, represent_document
from .embedding_store import (
    EmbeddedCorpus,
    WordEmbeddingTable,
    build_word_table,
    load_embeddings,
    save_embeddings,
    validate_alignment,
)
from .errors import ComputeError, ValidationError, XweakError
from .evaluation import MetricsReport, compute_metrics, generate_synthetic, pseudo_label_accuracy
from .transfer import (
    TaxonomyRelation,
    classify_relation,
    postprocess_predictions,
    relabel_corpus,
    run_retrain,
    run_weak_pipeline,
)

__version__ = "0.1.0"

__all__ = [
    "ClassRepresentation",
    "ComputeError",
    "Corpus",
    "Document",
    "EmbeddedCorpus",
    "GmmModel",
    "LinearClassifier",
    "MetricsReport",
    "PcaModel",
    "PipelineConfig",
    "PseudoLabel",
    "PseudoLabelSet",
    "Taxonomy",
    "TaxonomyRelation",
    "ValidationError",
    "VotingRule",
    "WordEmbeddingTable",
    "XweakError",
    "build_word_table",
    "classify_relation",
    "compute_metrics",
    "expand_classes",
    "expanded_voting_rule",
    "fit_gmm",
    "fit_pca",
    "generate_synthetic",
    "keyword_vote",
    "load_corpus",
    "load_embeddings",
    "load_taxonomy",
    "majority_class",
    "name_voting_rule",
    "parse_config_file",
    "postprocess_predictions",
    "pseudo_label",
    "pseudo_label_accuracy",
    "rebuild_vector",
    "relabel_corpus",
    "rep_predict",
    "represent_corpus",
    "represent_document",
    "run_retrain",
    "run_weak_pipeline",
    "save_embeddings",
    "tokenize",
    "train_classifier",
    "validate_alignment",
    "zipf_weights",
]
