"""Multinomial logistic classifier trained on selected pseudo-labels.

Training is deliberately boring: zero initialization and full-batch gradient
descent with a halving step size, so two runs on the same inputs produce the
same weights bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .fileio import default_blob_path, write_atomic

MODEL_MAGIC = "XWEAK-MODEL"
FORMAT_VERSION = "v1"


@dataclass(frozen=True, eq=False)
class LinearClassifier:
    classes: tuple[str, ...]
    weights: np.ndarray = field(repr=False)  # (K, dim) float64
    bias: np.ndarray = field(repr=False)  # (K,) float64
    losses: tuple[float, ...] = ()

    def scores(self, features: np.ndarray) -> np.ndarray:
        m = np.asarray(features, dtype=np.float64)
        if m.shape[1] != self.weights.shape[1]:
            raise ValidationError(
                f"feature dim {m.shape[1]} does not match model dim {self.weights.shape[1]}"
            )
        return m @ self.weights.T + self.bias

    def predict(self, features: np.ndarray) -> list[str]:
        """Highest-scoring class per row; exact ties go to class order."""
        picks = self.scores(features).argmax(axis=1)
        return [self.classes[int(i)] for i in picks]


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def loss_and_grad(
    weights: np.ndarray,
    bias: np.ndarray,
    features: np.ndarray,
    onehot: np.ndarray,
    l2_strength: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy plus (l2/2)||W||^2; the bias is not penalized."""
    n = features.shape[0]
    probs = _softmax(features @ weights.T + bias)
    # Clip keeps log finite; a one-hot target never sits on an exact zero
    # after the first update anyway.
    ce = -np.log(np.clip((probs * onehot).sum(axis=1), 1e-300, None)).mean()
    loss = ce + 0.5 * l2_strength * float((weights**2).sum())
    diff = (probs - onehot) / n
    grad_w = diff.T @ features + l2_strength * weights
    grad_b = diff.sum(axis=0)
    return float(loss), grad_w, grad_b


def train_classifier(
    features: np.ndarray,
    labels: list[str],
    classes: tuple[str, ...] | list[str],
    *,
    l2_strength: float = 1e-3,
    learning_rate: float = 0.1,
    epochs: int = 500,
) -> LinearClassifier:
    """Fit the classifier by full-batch gradient descent.

    A step that would increase the loss is rejected and the learning rate is
    halved instead, so the recorded loss trace never increases. Every class
    must be present in ``labels``; the error lists the ones that are not.
    """
    x = np.asarray(features, dtype=np.float64)
    classes = tuple(classes)
    if x.ndim != 2 or x.shape[0] != len(labels):
        raise ValidationError("features and labels are misaligned")
    if len(set(classes)) != len(classes):
        raise ValidationError("class names are not unique")
    if epochs < 1:
        raise ValidationError(f"epochs must be >= 1, got {epochs}")
    if learning_rate <= 0.0:
        raise ValidationError(f"learning rate must be positive, got {learning_rate}")
    if l2_strength < 0.0:
        raise ValidationError(f"l2 strength must be >= 0, got {l2_strength}")
    index = {c: i for i, c in enumerate(classes)}
    for label in labels:
        if label not in index:
            raise ValidationError(f"label {label!r} is not a known class")
    present = set(labels)
    empty = [c for c in classes if c not in present]
    if empty:
        raise ValidationError(
            "no training documents for class(es): " + ", ".join(repr(c) for c in empty)
        )

    onehot = np.zeros((len(labels), len(classes)))
    for i, label in enumerate(labels):
        onehot[i, index[label]] = 1.0

    weights = np.zeros((len(classes), x.shape[1]))
    bias = np.zeros(len(classes))
    lr = learning_rate
    loss, grad_w, grad_b = loss_and_grad(weights, bias, x, onehot, l2_strength)
    losses = [loss]
    for _ in range(epochs):
        cand_w = weights - lr * grad_w
        cand_b = bias - lr * grad_b
        cand_loss, cand_gw, cand_gb = loss_and_grad(cand_w, cand_b, x, onehot, l2_strength)
        if cand_loss > loss:
            lr *= 0.5
            continue
        weights, bias = cand_w, cand_b
        loss, grad_w, grad_b = cand_loss, cand_gw, cand_gb
        losses.append(loss)
    return LinearClassifier(classes=classes, weights=weights, bias=bias, losses=tuple(losses))


def save_model(model: LinearClassifier, path: str | Path, blob_path: str | Path | None = None) -> None:
    blob_path = default_blob_path(path) if blob_path is None else Path(blob_path)
    dim = model.weights.shape[1]
    lines = [f"{MODEL_MAGIC} {FORMAT_VERSION} dim={dim} count={len(model.classes)}"]
    lines.extend(model.classes)
    write_atomic(path, "".join(line + "\n" for line in lines))
    block = np.concatenate([model.weights, model.bias[:, None]], axis=1)
    write_atomic(blob_path, np.ascontiguousarray(block, dtype="<f4").tobytes())


def load_model(path: str | Path, blob_path: str | Path | None = None) -> LinearClassifier:
    blob_path = default_blob_path(path) if blob_path is None else Path(blob_path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        parts = header.split()
        if (
            len(parts) != 4
            or parts[0] != MODEL_MAGIC
            or parts[1] != FORMAT_VERSION
            or not parts[2].startswith("dim=")
            or not parts[3].startswith("count=")
        ):
            raise ValidationError(f"{path}: bad model header {header!r}")
        dim, count = int(parts[2][4:]), int(parts[3][6:])
        classes = tuple(line.rstrip("\n") for line in fh if line.strip())
    if len(classes) != count:
        raise ValidationError(f"{path}: header says {count} classes, found {len(classes)}")
    blob = Path(blob_path).read_bytes()
    expect = 4 * count * (dim + 1)
    if len(blob) != expect:
        raise ValidationError(f"{blob_path}: expected {expect} bytes, found {len(blob)}")
    block = np.frombuffer(blob, dtype="<f4").reshape(count, dim + 1).astype(np.float64)
    return LinearClassifier(classes=classes, weights=block[:, :dim], bias=block[:, dim])
