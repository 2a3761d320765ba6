"""Post-hoc metrics over selections and feature bundles.

Covers subset diversity (mean pairwise cosine distance), per-extractor
pseudo-label accuracy breakdowns, deterministic PCA reduction, and the
cross-extractor similarity matrix computed after reducing every feature
space to a common dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError, ZeroVectorError
from .io import FeatureBundle, FeatureMatrix, LabelVector, SelectionResult
from .scoring import apl


@dataclass(eq=False)
class DiversityReport:
    """Mean pairwise cosine distance within a selected subset.

    ``per_class`` only contains classes with at least two selected samples;
    a class with fewer has no pairs, which is not the same as distance 0.
    """

    per_class: dict[int, float]
    whole: float


@dataclass(eq=False)
class PseudoLabelReport:
    """Nearest-centroid pseudo-label accuracy per extractor."""

    extractor_ids: tuple[str, ...]
    overall: np.ndarray  # (m,) float64
    per_class: np.ndarray  # (m, c) float64


@dataclass(eq=False)
class CrossModelSimilarity:
    """Mean per-sample cosine similarity between extractors, after PCA."""

    extractor_ids: tuple[str, ...]
    pairwise: np.ndarray  # (m, m) float64, symmetric, unit diagonal
    reduced_dim: int


def _unit_rows(x: np.ndarray, what: str) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1)
    if np.any(norms == 0.0):
        bad = np.flatnonzero(norms == 0.0).tolist()
        raise ZeroVectorError(f"zero-norm {what} rows {bad}: cosine undefined")
    return x / norms[:, None]


def _mean_pairwise_cosine_distance(x: np.ndarray) -> float:
    """Average of 1 - cos over unordered pairs i < j, in float64.

    Uses the chord identity 1 - cos = |u_i - u_j|^2 / 2 on unit rows, which
    is exact for bit-identical vectors (distance 0) and keeps every value
    inside [0, 2] without clipping.
    """
    unit = _unit_rows(x.astype(np.float64, copy=False), "selected")
    s = unit.shape[0]
    total = 0.0
    for i in range(s - 1):
        diff = unit[i + 1 :] - unit[i]
        total += float((diff * diff).sum()) / 2.0
    return total / (s * (s - 1) / 2)


def subset_diversity(
    f: FeatureMatrix, y: LabelVector, sel: SelectionResult
) -> DiversityReport:
    """Mean pairwise cosine distance of the selected subset, per class and whole."""
    if sel.n != f.n or f.n != y.n:
        raise ValidationError("selection, features, and labels disagree on n")
    idx = sel.selected
    if idx.size < 2:
        raise ValidationError("need at least two selected samples for pairs")
    per_class: dict[int, float] = {}
    for c in range(y.c):
        members = idx[y.labels[idx] == c]
        if members.size >= 2:
            per_class[c] = _mean_pairwise_cosine_distance(f.data[members])
    whole = _mean_pairwise_cosine_distance(f.data[idx])
    return DiversityReport(per_class=per_class, whole=whole)


def pseudo_label_report(bundle: FeatureBundle) -> PseudoLabelReport:
    """Overall and per-class pseudo-label accuracy for every extractor."""
    y = bundle.labels
    hits = apl(bundle).per_model_hits.astype(np.float64)
    overall = hits.mean(axis=0)
    per_class = np.empty((bundle.m, y.c), dtype=np.float64)
    for c in range(y.c):
        members = y.class_indices(c)
        per_class[:, c] = hits[members].mean(axis=0)
    return PseudoLabelReport(
        extractor_ids=tuple(fm.extractor_id for fm in bundle.matrices),
        overall=overall,
        per_class=per_class,
    )


def reduce_pca(f: FeatureMatrix, d: int) -> FeatureMatrix:
    """Project onto the top-d principal components, deterministically.

    Columns are centered; components are eigenvectors of the sample
    covariance (denominator n - 1) in descending eigenvalue order.  Sign
    convention: each component's largest-magnitude entry is nonnegative,
    ties resolved by the lower coordinate index.  The output matrix keeps
    float64 precision.
    """
    if not (1 <= d <= min(f.n, f.k)):
        raise ValidationError(
            f"target dimension {d} outside [1, min(n={f.n}, k={f.k})]"
        )
    x = f.data.astype(np.float64, copy=False)
    centered = x - x.mean(axis=0)
    denom = max(f.n - 1, 1)
    cov = (centered.T @ centered) / denom
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    components = eigvecs[:, order[:d]]
    # np.argmax returns the first maximum, which implements the tie rule.
    for j in range(d):
        pivot = int(np.argmax(np.abs(components[:, j])))
        if components[pivot, j] < 0:
            components[:, j] = -components[:, j]
    return FeatureMatrix(
        extractor_id=f.extractor_id, data=centered @ components
    )


def cross_model_similarity(bundle: FeatureBundle) -> CrossModelSimilarity:
    """Mean per-sample cosine similarity between every pair of extractors.

    All matrices are PCA-reduced to the smallest feature dimension in the
    bundle, then entry (a, b) averages cos(A_j, B_j) over samples j.
    """
    if bundle.m < 2:
        raise ValidationError("need at least two matrices to compare")
    d = min(fm.k for fm in bundle.matrices)
    units = [
        _unit_rows(reduce_pca(fm, d).data, fm.extractor_id)
        for fm in bundle.matrices
    ]
    m = bundle.m
    pairwise = np.empty((m, m), dtype=np.float64)
    for a in range(m):
        for b in range(a, m):
            sim = float(np.mean(np.einsum("ij,ij->i", units[a], units[b])))
            pairwise[a, b] = sim
            pairwise[b, a] = sim
    return CrossModelSimilarity(
        extractor_ids=tuple(fm.extractor_id for fm in bundle.matrices),
        pairwise=pairwise,
        reduced_dim=d,
    )
