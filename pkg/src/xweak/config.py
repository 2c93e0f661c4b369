"""Pipeline settings and the key = value config file format."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ValidationError


@dataclass
class PipelineConfig:
    random_seed: int = 42
    min_freq: int = 5
    expansion_limit: int = 100
    cluster_method: str = "gmm"
    pca_dim: int = 64
    conf_threshold: float = 0.5
    mode: str = "agree"
    l2_strength: float = 1e-3
    learning_rate: float = 0.1
    epochs: int = 500

    def validate(self) -> "PipelineConfig":
        if self.min_freq < 1:
            raise ValidationError(f"min_freq must be >= 1, got {self.min_freq}")
        if self.expansion_limit < 1:
            raise ValidationError(f"expansion_limit must be >= 1, got {self.expansion_limit}")
        if self.cluster_method != "gmm":
            raise ValidationError(
                f"cluster_method must be 'gmm', got {self.cluster_method!r}"
            )
        if self.pca_dim < 1:
            raise ValidationError(f"pca_dim must be >= 1, got {self.pca_dim}")
        if not 0.0 < self.conf_threshold <= 1.0:
            raise ValidationError(
                f"conf_threshold must be in (0, 1], got {self.conf_threshold}"
            )
        if self.mode not in ("xclass", "agree"):
            raise ValidationError(f"mode must be 'xclass' or 'agree', got {self.mode!r}")
        if self.l2_strength < 0.0:
            raise ValidationError(f"l2_strength must be >= 0, got {self.l2_strength}")
        if self.learning_rate <= 0.0:
            raise ValidationError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValidationError(f"epochs must be >= 1, got {self.epochs}")
        return self


def parse_config_file(path: str | Path) -> PipelineConfig:
    """Read UTF-8 ``key = value`` lines; ``#`` starts a comment.

    Unknown keys and unparseable values are errors that name the offender.
    """
    types = {f.name: f.type for f in fields(PipelineConfig)}
    kwargs: dict[str, object] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"{path}: line {lineno} is not a key = value pair")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in types:
                raise ValidationError(f"{path}: unknown setting {key!r} at line {lineno}")
            if key in kwargs:
                raise ValidationError(f"{path}: duplicate setting {key!r} at line {lineno}")
            kind = types[key]
            try:
                if kind == "int":
                    kwargs[key] = int(value)
                elif kind == "float":
                    kwargs[key] = float(value)
                else:
                    kwargs[key] = value
            except ValueError as exc:
                raise ValidationError(
                    f"{path}: bad value {value!r} for setting {key!r}"
                ) from exc
    return PipelineConfig(**kwargs).validate()  # type: ignore[arg-type]
