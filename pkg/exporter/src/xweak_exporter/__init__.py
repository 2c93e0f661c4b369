"""Contextual embedding export and classifier fine-tuning for xweak."""

__version__ = "0.1.0"

from .errors import ValidationError
from .export import ExportJob, ExportReport, export, export_file
from .finetune import FinetuneReport, FinetuneSettings, finetune_classifier
from .preprocess import clean_text, tokenize

__all__ = [
    "ValidationError",
    "ExportJob",
    "ExportReport",
    "export",
    "export_file",
    "FinetuneReport",
    "FinetuneSettings",
    "finetune_classifier",
    "clean_text",
    "tokenize",
]
