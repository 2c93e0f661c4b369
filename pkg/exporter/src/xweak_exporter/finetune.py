"""Fine-tune the full encoder as a classifier over selected pseudo-labels.

Training follows the reference recipe: AdamW at 2e-5 with weight decay
0.05 (bias and LayerNorm excluded), six epochs, batches of 64, cosine
learning-rate schedule with the first third of the steps as warmup. The
prediction file it writes is the plain ``doc_id<TAB>label`` format the
pipeline's eval command consumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import torch

from .errors import ValidationError
from .interchange import (
    read_corpus_rows,
    read_selected_pseudo_labels,
    read_taxonomy_classes,
    write_predictions,
)


@dataclass(frozen=True)
class FinetuneSettings:
    learning_rate: float = 2e-5
    weight_decay: float = 0.05
    epochs: int = 6
    batch_size: int = 64
    max_len: int = 64
    warmup_fraction: float = 1.0 / 3.0
    seed: int = 42

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValidationError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.weight_decay < 0:
            raise ValidationError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if self.epochs < 0:
            raise ValidationError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise ValidationError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_len < 3:
            raise ValidationError(f"max_len must be >= 3, got {self.max_len}")
        if not 0.0 <= self.warmup_fraction <= 1.0:
            raise ValidationError(
                f"warmup_fraction must be in [0, 1], got {self.warmup_fraction}"
            )


@dataclass(frozen=True)
class FinetuneReport:
    trained_on: int
    steps: int
    final_loss: float | None
    predictions: int


def _encode(tokenizer, texts: list[str], max_len: int):
    return tokenizer(
        texts, truncation=True, max_length=max_len, padding=True, return_tensors="pt"
    )


def finetune_classifier(
    checkpoint: str,
    corpus_path: str | Path,
    taxonomy_path: str | Path,
    pseudo_path: str | Path,
    out_path: str | Path,
    settings: FinetuneSettings = FinetuneSettings(),
) -> FinetuneReport:
    from transformers import (
        AutoModelForSequenceClassification,
        AutoTokenizer,
        get_cosine_schedule_with_warmup,
    )

    classes = read_taxonomy_classes(taxonomy_path)
    rows = read_corpus_rows(corpus_path)
    texts = {doc_id: text for doc_id, _, text in rows}
    picked = read_selected_pseudo_labels(pseudo_path)

    class_index = {name: i for i, name in enumerate(classes)}
    for doc_id, label in picked:
        if doc_id not in texts:
            raise ValidationError(f"pseudo-labeled document {doc_id!r} is not in {corpus_path}")
        if label not in class_index:
            raise ValidationError(f"pseudo-label class {label!r} is not in the taxonomy")
    covered = {label for _, label in picked}
    missing = [name for name in classes if name not in covered]
    if missing:
        raise ValidationError(
            "no selected pseudo-labels for class(es): "
            + ", ".join(repr(name) for name in missing)
        )

    torch.manual_seed(settings.seed)
    tokenizer = AutoTokenizer.from_pretrained(checkpoint)
    model = AutoModelForSequenceClassification.from_pretrained(
        checkpoint, num_labels=len(classes)
    )

    steps_done = 0
    last_loss: float | None = None
    if settings.epochs > 0:
        decay, no_decay = [], []
        for name, param in model.named_parameters():
            if not param.requires_grad:
                continue
            if name.endswith(".bias") or "LayerNorm" in name:
                no_decay.append(param)
            else:
                decay.append(param)
        optimizer = torch.optim.AdamW(
            [
                {"params": decay, "weight_decay": settings.weight_decay},
                {"params": no_decay, "weight_decay": 0.0},
            ],
            lr=settings.learning_rate,
        )
        per_epoch = (len(picked) + settings.batch_size - 1) // settings.batch_size
        total = per_epoch * settings.epochs
        scheduler = get_cosine_schedule_with_warmup(
            optimizer,
            num_warmup_steps=int(total * settings.warmup_fraction),
            num_training_steps=total,
        )
        generator = torch.Generator().manual_seed(settings.seed)
        model.train()
        for _ in range(settings.epochs):
            order = torch.randperm(len(picked), generator=generator).tolist()
            for start in range(0, len(order), settings.batch_size):
                chunk = [picked[i] for i in order[start : start + settings.batch_size]]
                enc = _encode(tokenizer, [texts[d] for d, _ in chunk], settings.max_len)
                targets = torch.tensor([class_index[label] for _, label in chunk])
                loss = model(**enc, labels=targets).loss
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
                scheduler.step()
                steps_done += 1
                last_loss = loss.item()

    model.eval()
    pairs: list[tuple[str, str]] = []
    with torch.no_grad():
        for start in range(0, len(rows), settings.batch_size):
            chunk = rows[start : start + settings.batch_size]
            enc = _encode(tokenizer, [text for _, _, text in chunk], settings.max_len)
            winners = model(**enc).logits.argmax(dim=1).tolist()
            pairs.extend(
                (doc_id, classes[w]) for (doc_id, _, _), w in zip(chunk, winners)
            )
    write_predictions(pairs, out_path)
    return FinetuneReport(len(picked), steps_done, last_loss, len(pairs))
