"""Corpus and taxonomy loading, plus the shared tokenizer.

Corpus files are UTF-8 with one record per line, ``id<TAB>label<TAB>text``.
A label of ``-`` marks an unlabeled document. Taxonomy files carry one class
per line, ``name<TAB>seed1,seed2,...``; the seed column may be omitted, in
which case the lowercased class name is the single seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from .fileio import write_atomic

UNLABELED = "-"


def tokenize(text: str) -> list[str]:
    """Split ``text`` into normalized tokens.

    Lowercase, split on whitespace, strip leading and trailing
    non-alphanumeric characters from each piece, drop empty results.
    Interior punctuation survives, so "b*tch" stays intact while "#mkr"
    loses its hash.
    """
    out: list[str] = []
    for piece in text.lower().split():
        start, end = 0, len(piece)
        while start < end and not piece[start].isalnum():
            start += 1
        while end > start and not piece[end - 1].isalnum():
            end -= 1
        if end > start:
            out.append(piece[start:end])
    return out


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    tokens: tuple[str, ...]
    gold_label: str | None = None


@dataclass(frozen=True)
class Taxonomy:
    """Ordered class names with their seed words.

    Class order is significant: every tie in the pipeline resolves in
    taxonomy order.
    """

    classes: tuple[str, ...]
    seeds: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        if not self.classes:
            raise ValidationError("taxonomy has no classes")
        if len(set(self.classes)) != len(self.classes):
            raise ValidationError("taxonomy class names are not unique")
        if len(self.seeds) != len(self.classes):
            raise ValidationError("taxonomy seeds do not align with classes")
        for name, seed_list in zip(self.classes, self.seeds):
            if not seed_list:
                raise ValidationError(f"class {name!r} has no seed words")
            if len(set(seed_list)) != len(seed_list):
                raise ValidationError(f"class {name!r} repeats a seed word")

    @classmethod
    def from_names(cls, names: list[str] | tuple[str, ...]) -> "Taxonomy":
        return cls(tuple(names), tuple((n.lower(),) for n in names))

    @classmethod
    def with_seeds(cls, pairs: list[tuple[str, list[str]]]) -> "Taxonomy":
        names = tuple(name for name, _ in pairs)
        seeds = tuple(tuple(s.lower() for s in sl) for _, sl in pairs)
        return cls(names, seeds)

    def seeds_for(self, name: str) -> tuple[str, ...]:
        try:
            return self.seeds[self.classes.index(name)]
        except ValueError:
            raise ValidationError(f"unknown class {name!r}") from None

    def index_of(self, name: str) -> int:
        try:
            return self.classes.index(name)
        except ValueError:
            raise ValidationError(f"unknown class {name!r}") from None


@dataclass
class Corpus:
    documents: tuple[Document, ...]
    dropped_empty: int = field(default=0, compare=False)
    _index: dict[str, Document] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self._index = {}
        for doc in self.documents:
            if doc.doc_id in self._index:
                raise ValidationError(f"duplicate document id {doc.doc_id!r}")
            self._index[doc.doc_id] = doc

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def document(self, doc_id: str) -> Document:
        try:
            return self._index[doc_id]
        except KeyError:
            raise ValidationError(f"unknown document id {doc_id!r}") from None

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._index

    def gold_labels(self) -> dict[str, str]:
        """Mapping of doc id to gold label for the labeled subset."""
        return {d.doc_id: d.gold_label for d in self.documents if d.gold_label is not None}


def load_corpus(path: str | Path) -> Corpus:
    docs: list[Document] = []
    seen: set[str] = set()
    dropped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t", 2)
            if len(parts) != 3:
                raise ValidationError(f"{path}: malformed record at line {lineno}")
            doc_id, label, text = parts
            if not doc_id:
                raise ValidationError(f"{path}: empty document id at line {lineno}")
            if doc_id in seen:
                raise ValidationError(f"{path}: duplicate document id {doc_id!r}")
            seen.add(doc_id)
            tokens = tokenize(text)
            if not tokens:
                dropped += 1
                continue
            gold = None if label == UNLABELED else label
            docs.append(Document(doc_id, text, tuple(tokens), gold))
    return Corpus(tuple(docs), dropped_empty=dropped)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    lines = []
    for doc in corpus.documents:
        if "\n" in doc.text:
            raise ValidationError(f"document {doc.doc_id!r} text contains a newline")
        if "\t" in doc.doc_id or "\n" in doc.doc_id:
            raise ValidationError(f"document id {doc.doc_id!r} contains a separator")
        label = doc.gold_label if doc.gold_label is not None else UNLABELED
        lines.append(f"{doc.doc_id}\t{label}\t{doc.text}")
    write_atomic(path, "".join(line + "\n" for line in lines))


def load_taxonomy(path: str | Path) -> Taxonomy:
    pairs: list[tuple[str, list[str]]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) == 1:
                pairs.append((parts[0], [parts[0].lower()]))
            elif len(parts) == 2:
                seeds = [s.strip() for s in parts[1].split(",") if s.strip()]
                if not seeds:
                    raise ValidationError(f"{path}: empty seed list at line {lineno}")
                pairs.append((parts[0], seeds))
            else:
                raise ValidationError(f"{path}: malformed class at line {lineno}")
    if not pairs:
        raise ValidationError(f"{path}: taxonomy file is empty")
    return Taxonomy.with_seeds(pairs)


def save_taxonomy(taxonomy: Taxonomy, path: str | Path) -> None:
    lines = [
        f"{name}\t{','.join(seeds)}"
        for name, seeds in zip(taxonomy.classes, taxonomy.seeds)
    ]
    write_atomic(path, "".join(line + "\n" for line in lines))
