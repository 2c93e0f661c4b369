"""Atomic file writes and the small shared on-disk formats."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

from .errors import ValidationError


def default_blob_path(index_path: str | Path) -> Path:
    """Sibling binary blob for a text index file."""
    return Path(str(index_path) + ".bin")


def write_atomic(path: str | Path, data: str | bytes) -> None:
    """Write ``data`` to ``path`` via a temp file in the same directory.

    The rename is atomic on POSIX, so readers never observe a partial file.
    """
    path = Path(path)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name + ".")
    try:
        with os.fdopen(fd, mode, encoding=None if isinstance(data, bytes) else "utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_predictions(path: str | Path) -> list[tuple[str, str]]:
    """Read a prediction file of ``doc_id<TAB>label`` lines."""
    out: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ValidationError(f"{path}: malformed prediction at line {lineno}")
            out.append((parts[0], parts[1]))
    return out


def save_predictions(pairs: list[tuple[str, str]], path: str | Path) -> None:
    lines = [f"{doc_id}\t{label}" for doc_id, label in pairs]
    write_atomic(path, "".join(line + "\n" for line in lines))


def resolve_workers(single_thread: bool = False) -> int:
    """Worker count: 1 when forced single-threaded, else the XWEAK_THREADS cap."""
    if single_thread:
        return 1
    raw = os.environ.get("XWEAK_THREADS", "")
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValidationError(f"XWEAK_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ValidationError(f"XWEAK_THREADS must be >= 1, got {n}")
    return n
