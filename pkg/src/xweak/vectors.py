"""Cosine geometry helpers used throughout the pipeline.

The whole package adopts one convention: the cosine of a zero vector with
anything is -1.0, so degenerate vectors always lose similarity rankings.
"""

from __future__ import annotations

import numpy as np


def unit_rows(matrix: np.ndarray) -> np.ndarray:
    """Scale each row to unit norm; zero rows are left as zeros."""
    m = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    safe = np.where(norms > 0.0, norms, 1.0)
    return m / safe


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return -1.0
    return float(np.dot(u, v) / (nu * nv))


def cosine_to_rows(rows: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Cosine of ``v`` against every row, with the zero-vector convention."""
    rows = np.asarray(rows, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return np.full(rows.shape[0], -1.0)
    norms = np.linalg.norm(rows, axis=1)
    out = np.full(rows.shape[0], -1.0)
    ok = norms > 0.0
    out[ok] = rows[ok] @ v / (norms[ok] * nv)
    return out
