"""Projection, Gaussian mixture alignment, and confident pseudo-labels.

Document vectors are projected with PCA, clustered by an EM-fitted Gaussian
mixture with one covariance shared across components, and the most confident
members of each cluster become pseudo-labeled training data. The ``agree``
mode additionally demands that the cluster label matches the similarity-based
label computed before projection.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import logsumexp

from .class_repr import ClassRepresentation
from .doc_repr import rep_predict_all
from .errors import ComputeError, ValidationError
from .fileio import write_atomic

MODES = ("xclass", "agree")


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean: np.ndarray = field(repr=False)  # (dim,) float64
    components: np.ndarray = field(repr=False)  # (k, dim) float64, orthonormal rows
    explained_variance: np.ndarray = field(repr=False)  # (k,) sample variance per component

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    def transform(self, matrix: np.ndarray) -> np.ndarray:
        m = np.asarray(matrix, dtype=np.float64)
        return (m - self.mean) @ self.components.T


def fit_pca(matrix: np.ndarray, n_components: int) -> PcaModel:
    """Principal components via SVD of the centered document matrix.

    Component signs follow one rule: the first coordinate of each component
    whose magnitude exceeds 1e-12 is made positive, so refits are
    reproducible. Requesting more components than min(dim, n_docs) allows
    caps the count with a warning.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise ValidationError("document matrix must be two-dimensional")
    n_docs, dim = m.shape
    if n_docs < 2:
        raise ValidationError(f"projection needs at least 2 documents, got {n_docs}")
    if n_components < 1:
        raise ValidationError(f"component count must be >= 1, got {n_components}")
    cap = min(dim, n_docs)
    if n_components > cap:
        warnings.warn(
            f"requested {n_components} components but only {cap} are available; capping",
            stacklevel=2,
        )
        n_components = cap
    mean = m.mean(axis=0)
    _, singular, vt = np.linalg.svd(m - mean, full_matrices=False)
    components = vt[:n_components].copy()
    for row in components:
        nz = np.flatnonzero(np.abs(row) > 1e-12)
        if nz.size and row[nz[0]] < 0.0:
            row *= -1.0
    variance = singular[:n_components] ** 2 / (n_docs - 1)
    return PcaModel(mean=mean, components=components, explained_variance=variance)


@dataclass(frozen=True, eq=False)
class GmmModel:
    means: np.ndarray = field(repr=False)  # (K, d) float64
    covariance: np.ndarray = field(repr=False)  # (d, d) float64, shared
    mix_weights: np.ndarray = field(repr=False)  # (K,) float64, sums to 1
    log_likelihoods: tuple[float, ...]
    converged: bool
    n_iter: int

    @property
    def n_components(self) -> int:
        return self.means.shape[0]

    def responsibilities(self, matrix: np.ndarray) -> np.ndarray:
        """Posterior probability of each component for each row; rows sum to 1."""
        log_prob = _joint_log_prob(
            np.asarray(matrix, dtype=np.float64), self.means, self.covariance, self.mix_weights
        )
        log_norm = logsumexp(log_prob, axis=1)
        return np.exp(log_prob - log_norm[:, None])


def _joint_log_prob(
    x: np.ndarray, means: np.ndarray, covariance: np.ndarray, mix_weights: np.ndarray
) -> np.ndarray:
    d = x.shape[1]
    try:
        chol = np.linalg.cholesky(covariance)
    except np.linalg.LinAlgError as exc:
        raise ComputeError("shared covariance is not positive definite") from exc
    log_det = 2.0 * np.log(np.diag(chol)).sum()
    out = np.empty((x.shape[0], means.shape[0]))
    for k in range(means.shape[0]):
        diff = (x - means[k]).T
        solved = solve_triangular(chol, diff, lower=True)
        maha = (solved**2).sum(axis=0)
        out[:, k] = -0.5 * (d * math.log(2.0 * math.pi) + log_det + maha)
    return out + np.log(mix_weights)[None, :]


def _regularize(covariance: np.ndarray, floor: float) -> np.ndarray:
    mean_var = float(np.diag(covariance).mean())
    reg = max(1e-6 * mean_var, floor)
    return covariance + reg * np.eye(covariance.shape[0])


def fit_gmm(
    matrix: np.ndarray,
    init_means: np.ndarray,
    *,
    max_iter: int = 200,
    tol: float = 1e-4,
) -> GmmModel:
    """Fit a mixture with one shared covariance by expectation-maximization.

    Parameters
    ----------
    matrix:
        (N, d) data, typically PCA-projected document vectors.
    init_means:
        (K, d) starting means, typically the projected class vectors.
    max_iter:
        Maximum number of EM iterations.
    tol:
        Stop once the total log-likelihood improves by less than this
        between consecutive E-steps. A non-finite tolerance stops after the
        mandatory first E-step, returning the initialization untouched.

    Returns
    -------
    The fitted model carrying the per-E-step log-likelihood trace, which is
    non-decreasing for any valid run.

    Notes
    -----
    The shared covariance starts as the covariance of the data and is
    re-estimated across all components each M-step. Every covariance gets a
    ridge of 1e-6 times its mean diagonal variance (with an absolute floor
    so fully collapsed clusters stay definite). Mixing weights start uniform.
    A non-finite log-likelihood aborts with an error naming the iteration.
    """
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValidationError("mixture input must be a non-empty 2-d matrix")
    means = np.asarray(init_means, dtype=np.float64).copy()
    if means.ndim != 2 or means.shape[1] != x.shape[1]:
        raise ValidationError(
            f"initial means of shape {means.shape} do not match data dim {x.shape[1]}"
        )
    if max_iter < 1:
        raise ValidationError(f"max_iter must be >= 1, got {max_iter}")
    n, d = x.shape
    k = means.shape[0]

    centered = x - x.mean(axis=0)
    data_cov = centered.T @ centered / n
    base_var = float(np.diag(data_cov).mean())
    floor = 1e-12 * base_var if base_var > 0.0 else 1e-12
    covariance = _regularize(data_cov, floor)
    mix_weights = np.full(k, 1.0 / k)

    lls: list[float] = []
    converged = False
    for iteration in range(max_iter):
        log_prob = _joint_log_prob(x, means, covariance, mix_weights)
        log_norm = logsumexp(log_prob, axis=1)
        ll = float(log_norm.sum())
        if not np.isfinite(ll):
            raise ComputeError(f"log-likelihood became non-finite at iteration {iteration}")
        lls.append(ll)
        if not np.isfinite(tol):
            # Degenerate tolerance: keep the initialization, assignments only.
            break
        if iteration > 0 and ll - lls[-2] < tol:
            converged = True
            break
        resp = np.exp(log_prob - log_norm[:, None])
        weight_sum = resp.sum(axis=0) + 10.0 * np.finfo(np.float64).eps
        means = resp.T @ x / weight_sum[:, None]
        mix_weights = weight_sum / weight_sum.sum()
        raw_cov = (x.T @ x - (weight_sum * means.T) @ means) / n
        covariance = _regularize(raw_cov, floor)

    return GmmModel(
        means=means,
        covariance=covariance,
        mix_weights=mix_weights,
        log_likelihoods=tuple(lls),
        converged=converged,
        n_iter=len(lls),
    )


@dataclass(frozen=True)
class PseudoLabel:
    doc_id: str
    gmm_label: str
    rep_label: str
    confidence: float
    selected: bool


@dataclass(frozen=True)
class PseudoLabelSet:
    records: tuple[PseudoLabel, ...]
    classes: tuple[str, ...]
    mode: str
    conf_threshold: float

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def selected(self) -> list[PseudoLabel]:
        return [r for r in self.records if r.selected]


def pseudo_label(
    gmm: GmmModel,
    projected: np.ndarray,
    doc_ids: list[str],
    doc_matrix: np.ndarray,
    reps: list[ClassRepresentation],
    conf_threshold: float,
    mode: str = "agree",
) -> PseudoLabelSet:
    """Assign cluster and similarity labels, then keep the confident core.

    Within each cluster, documents are ranked by posterior confidence
    (document id breaks exact ties) and the top ``ceil(conf_threshold * n)``
    are selected. In ``agree`` mode a selected document must also have its
    cluster label equal to its similarity label, so the agree selection is
    always a subset of the plain one.
    """
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    if not 0.0 <= conf_threshold <= 1.0:
        raise ValidationError(f"conf_threshold must be in [0, 1], got {conf_threshold}")
    if len(doc_ids) != len(set(doc_ids)):
        raise ValidationError("duplicate document ids in pseudo-labeling input")
    projected = np.asarray(projected, dtype=np.float64)
    doc_matrix = np.asarray(doc_matrix, dtype=np.float64)
    if projected.shape[0] != len(doc_ids) or doc_matrix.shape[0] != len(doc_ids):
        raise ValidationError("document ids, projections, and vectors are misaligned")
    if gmm.n_components != len(reps):
        raise ValidationError(
            f"mixture has {gmm.n_components} components for {len(reps)} classes"
        )
    classes = tuple(r.class_name for r in reps)
    posteriors = gmm.responsibilities(projected)
    cluster_idx = posteriors.argmax(axis=1)
    confidence = posteriors.max(axis=1)
    rep_labels = rep_predict_all(doc_matrix, reps)

    chosen = np.zeros(len(doc_ids), dtype=bool)
    for c in range(len(classes)):
        members = np.flatnonzero(cluster_idx == c)
        quota = math.ceil(conf_threshold * len(members))
        ranked = sorted(members, key=lambda i: (-confidence[i], doc_ids[i]))
        chosen[ranked[:quota]] = True

    records = []
    for i, doc_id in enumerate(doc_ids):
        gmm_label = classes[int(cluster_idx[i])]
        keep = bool(chosen[i])
        if mode == "agree":
            keep = keep and gmm_label == rep_labels[i]
        records.append(
            PseudoLabel(
                doc_id=doc_id,
                gmm_label=gmm_label,
                rep_label=rep_labels[i],
                confidence=float(confidence[i]),
                selected=keep,
            )
        )
    return PseudoLabelSet(
        records=tuple(records), classes=classes, mode=mode, conf_threshold=conf_threshold
    )


def save_pseudo_labels(pls: PseudoLabelSet, path: str | Path) -> None:
    lines = [
        f"{r.doc_id}\t{r.gmm_label}\t{r.rep_label}\t{r.confidence:.6f}\t{int(r.selected)}"
        for r in pls.records
    ]
    write_atomic(path, "".join(line + "\n" for line in lines))


def load_pseudo_labels(path: str | Path) -> list[PseudoLabel]:
    records: list[PseudoLabel] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 5 or parts[4] not in ("0", "1"):
                raise ValidationError(f"{path}: malformed pseudo-label at line {lineno}")
            doc_id, gmm_label, rep_label, conf_raw, sel_raw = parts
            if doc_id in seen:
                raise ValidationError(f"{path}: duplicate document id {doc_id!r}")
            seen.add(doc_id)
            try:
                conf = float(conf_raw)
            except ValueError as exc:
                raise ValidationError(f"{path}: malformed pseudo-label at line {lineno}") from exc
            records.append(PseudoLabel(doc_id, gmm_label, rep_label, conf, sel_raw == "1"))
    return records
