"""Class centroids, centroid distances, and intra-class distance rankings.

This is the shared numeric substrate for the rank-mean and pseudo-label
scores as well as the distance-based baseline selectors.  All accumulation
happens in float64 regardless of the storage dtype, with a fixed reduction
order, so results are bit-identical across runs and thread counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, EmptyClassError, ValidationError
from .io import FeatureMatrix, LabelVector


@dataclass(eq=False)
class CentroidSet:
    """Per-class mean feature vectors for one extractor."""

    extractor_id: str
    centroids: np.ndarray  # (c, k) float64
    class_sizes: np.ndarray  # (c,) int64

    @property
    def c(self) -> int:
        return self.centroids.shape[0]

    @property
    def k(self) -> int:
        return self.centroids.shape[1]


@dataclass(eq=False)
class RankTable:
    """1-based intra-class distance ranks, one per sample.

    Within each class of size s the ranks are exactly the permutation
    {1, ..., s}; rank 1 is the sample closest to its class centroid, with
    distance ties broken by ascending sample index.
    """

    extractor_id: str
    ranks: np.ndarray  # (n,) int64, 1-based


def class_centroids(f: FeatureMatrix, y: LabelVector) -> CentroidSet:
    """Arithmetic mean feature vector of every class.

    Accumulates in float64 in ascending sample-index order per class.
    """
    if f.n != y.n:
        raise ValidationError(f"matrix has n={f.n}, labels have n={y.n}")
    data = f.data.astype(np.float64, copy=False)
    sizes = y.class_sizes()
    if (sizes == 0).any():
        empty = np.flatnonzero(sizes == 0).tolist()
        raise EmptyClassError(f"cannot take centroid of empty classes {empty}")
    centroids = np.empty((y.c, f.k), dtype=np.float64)
    for c in range(y.c):
        centroids[c] = data[y.class_indices(c)].sum(axis=0) / sizes[c]
    return CentroidSet(
        extractor_id=f.extractor_id,
        centroids=centroids,
        class_sizes=sizes.astype(np.int64),
    )


def centroid_distances(f: FeatureMatrix, cs: CentroidSet) -> np.ndarray:
    """Euclidean distance from every sample to every class centroid.

    Returns an (n, c) float64 matrix.  Distances are computed from explicit
    differences (not the expanded dot-product identity), so a sample that
    equals its centroid yields exactly 0.
    """
    if f.k != cs.k:
        raise DimensionMismatchError(
            f"matrix has k={f.k}, centroids have k={cs.k}"
        )
    data = f.data.astype(np.float64, copy=False)
    out = np.empty((f.n, cs.c), dtype=np.float64)
    for c in range(cs.c):
        diff = data - cs.centroids[c]
        out[:, c] = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    return out


def own_centroid_distances(
    f: FeatureMatrix, y: LabelVector, cs: CentroidSet | None = None
) -> np.ndarray:
    """Distance from every sample to the centroid of its own class."""
    if cs is None:
        cs = class_centroids(f, y)
    dists = centroid_distances(f, cs)
    return dists[np.arange(f.n), y.labels]


def intra_class_ranks(
    d_own: np.ndarray, y: LabelVector, extractor_id: str = ""
) -> RankTable:
    """Rank samples within their class by ascending own-centroid distance.

    Ties are broken by ascending original sample index, so the result is a
    deterministic permutation of {1, ..., |class|} per class.
    """
    d_own = np.asarray(d_own, dtype=np.float64)
    if d_own.shape != (y.n,):
        raise DimensionMismatchError(
            f"distances have shape {d_own.shape}, expected ({y.n},)"
        )
    if not np.isfinite(d_own).all():
        raise ValidationError("distances must be finite")
    ranks = np.empty(y.n, dtype=np.int64)
    for c in range(y.c):
        members = y.class_indices(c)
        # np.argsort(kind="stable") on the distances keeps ascending-index
        # order among ties because `members` is already sorted.
        order = members[np.argsort(d_own[members], kind="stable")]
        ranks[order] = np.arange(1, members.size + 1)
    return RankTable(extractor_id=extractor_id, ranks=ranks)
