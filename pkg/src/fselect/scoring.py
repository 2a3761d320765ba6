"""Per-sample importance scores fusing several extractors' feature views.

Two complementary signals are computed per sample:

* rank mean: the sample's intra-class centroid-distance rank, averaged
  over extractors and normalized by class size.  Lies in (0, 1]; small
  means the sample is close to its class prototype in every view.
* pseudo-label accuracy: the fraction of extractors whose nearest-centroid
  pseudo label matches the ground-truth label.  Lies in {0, 1/m, ..., 1};
  small means the sample is frequently confused with other classes.

The fused score is ``w1 * rank_mean + w2 * (1 - pseudo_accuracy)`` with
rate-dependent convex weights; smaller is better everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ValidationError
from .geometry import (
    CentroidSet,
    centroid_distances,
    class_centroids,
    intra_class_ranks,
)
from .io import FeatureBundle, FeatureMatrix


@dataclass(eq=False)
class RamScore:
    """Normalized mean of intra-class distance ranks, per sample."""

    values: np.ndarray  # (n,) float64 in (0, 1]


@dataclass(eq=False)
class AplScore:
    """Pseudo-label agreement per sample.

    ``per_model_hits[j, i]`` is 1 iff extractor i's nearest-centroid pseudo
    label for sample j matches the true label; ``values`` is the row mean.
    """

    per_model_hits: np.ndarray  # (n, m) uint8
    values: np.ndarray  # (n,) float64 in [0, 1]


@dataclass(frozen=True)
class FusionWeights:
    """Convex weights mixing the rank-mean and pseudo-label terms.

    ``schedule`` derives (w1, w2) from the sampling rate via a shifted
    sigmoid; w2 is defined as 1 - w1 so the pair sums to 1 exactly.  The
    ``equal`` constructor is the w1 = w2 = 1 variant that bypasses the
    schedule entirely.
    """

    w1: float
    w2: float
    alpha: float = math.nan
    beta: float = math.nan
    p: float = math.nan

    @classmethod
    def schedule(cls, alpha: float, beta: float, p: float) -> "FusionWeights":
        if not (0.0 < p <= 1.0):
            raise ValidationError(f"sampling rate must be in (0, 1], got {p}")
        if not (0.0 <= alpha <= 1.0):
            raise ValidationError(f"alpha must be in [0, 1], got {alpha}")
        w1 = alpha + (1.0 - alpha) / (1.0 + math.exp(beta * (p - 0.5)))
        return cls(w1=w1, w2=1.0 - w1, alpha=alpha, beta=beta, p=p)

    @classmethod
    def equal(cls) -> "FusionWeights":
        return cls(w1=1.0, w2=1.0)


def weights(alpha: float, beta: float, p: float) -> FusionWeights:
    """Rate-dependent fusion weights; see :meth:`FusionWeights.schedule`."""
    return FusionWeights.schedule(alpha, beta, p)


def ram(bundle: FeatureBundle) -> RamScore:
    """Normalized ranking mean across all extractors in the bundle.

    For sample j in a class of size s, the value is
    ``sum_i rank_j_i / (m * s)`` with 1-based ranks, hence in (0, 1].
    Invariant under permutations of the bundle's matrices.
    """
    y = bundle.labels
    sizes = y.class_sizes().astype(np.float64)
    rank_sum = np.zeros(bundle.n, dtype=np.float64)
    for fm in bundle.matrices:
        cs = class_centroids(fm, y)
        d = centroid_distances(fm, cs)
        d_own = d[np.arange(fm.n), y.labels]
        table = intra_class_ranks(d_own, y, extractor_id=fm.extractor_id)
        rank_sum += table.ranks
    values = rank_sum / (bundle.m * sizes[y.labels])
    return RamScore(values=values)


def pseudo_labels(f: FeatureMatrix, cs: CentroidSet) -> np.ndarray:
    """Nearest-centroid class id per sample, ties to the smallest class id."""
    d = centroid_distances(f, cs)
    return np.argmin(d, axis=1).astype(np.int64)


def apl(bundle: FeatureBundle) -> AplScore:
    """Fraction of extractors whose pseudo label matches the true label."""
    y = bundle.labels
    hits = np.empty((bundle.n, bundle.m), dtype=np.uint8)
    for i, fm in enumerate(bundle.matrices):
        cs = class_centroids(fm, y)
        hits[:, i] = pseudo_labels(fm, cs) == y.labels
    values = hits.astype(np.float64).mean(axis=1)
    return AplScore(per_model_hits=hits, values=values)


def ram_apl_score(
    ram_score: RamScore, apl_score: AplScore, w: FusionWeights
) -> np.ndarray:
    """Fused per-sample score ``w1 * rank_mean + w2 * (1 - pseudo_acc)``.

    Smaller is better.  With schedule weights the result lies in [0, 1].
    """
    r = ram_score.values
    phi = apl_score.values
    if r.shape != phi.shape:
        raise DimensionMismatchError(
            f"score lengths differ: {r.shape} vs {phi.shape}"
        )
    return w.w1 * r + w.w2 * (1.0 - phi)
