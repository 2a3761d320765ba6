"""Synthetic multi-extractor feature bundles for desk-scale validation.

Each class is a Gaussian cluster around a randomly placed centroid; the
two knobs that matter are the inter-centroid scale ``separation`` and the
intra-class standard deviation ``spread``.  A large separation/spread
ratio gives trivially separable classes; a ratio near or below 1 gives the
fine-grained regime (small inter-class, large intra-class differences).
Class sizes can decay geometrically to a requested imbalance ratio, and
symmetric label noise is applied as a separate step over clean labels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .io import FeatureBundle, FeatureMatrix, LabelVector


@dataclass(frozen=True)
class SynthSpec:
    """Shape and regime of one synthetic bundle."""

    c: int
    per_class: int
    dims: tuple[int, ...]
    separation: float = 10.0
    spread: float = 1.0
    imbalance_ratio: float = 1.0
    noise_rate: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.c < 2:
            raise ValidationError(f"need >= 2 classes, got {self.c}")
        if self.per_class < 1:
            raise ValidationError(f"need >= 1 sample per class, got {self.per_class}")
        if len(self.dims) < 1 or any(k < 1 for k in self.dims):
            raise ValidationError(f"dims must be nonempty positive, got {self.dims}")
        if self.separation <= 0:
            raise ValidationError("separation must be > 0")
        if self.spread < 0:
            raise ValidationError("spread must be >= 0")
        if self.imbalance_ratio < 1:
            raise ValidationError("imbalance ratio must be >= 1")
        if not (0.0 <= self.noise_rate <= 1.0):
            raise ValidationError("noise rate must be in [0, 1]")
        object.__setattr__(self, "dims", tuple(self.dims))


def class_sizes(spec: SynthSpec) -> np.ndarray:
    """Geometrically decaying class sizes with max/min = imbalance ratio.

    Class k holds round(per_class * mu^k) samples with mu chosen so the
    last class is per_class / ratio; exact equality for ratio 1.
    """
    if spec.imbalance_ratio == 1.0:
        return np.full(spec.c, spec.per_class, dtype=np.int64)
    mu = spec.imbalance_ratio ** (-1.0 / (spec.c - 1))
    sizes = np.floor(spec.per_class * mu ** np.arange(spec.c) + 0.5)
    return np.maximum(sizes.astype(np.int64), 1)


def _centroids(rng: np.random.Generator, c: int, k: int, separation: float) -> np.ndarray:
    """Random Gaussian directions rescaled so the closest pair sits at
    ``separation``; every other pair is at least that far apart."""
    pts = rng.standard_normal((c, k))
    diffs = pts[:, None, :] - pts[None, :, :]
    dists = np.sqrt((diffs**2).sum(axis=2))
    min_dist = dists[np.triu_indices(c, k=1)].min()
    return pts * (separation / min_dist)


def generate(spec: SynthSpec) -> FeatureBundle:
    """Deterministic labeled Gaussian-cluster bundle (clean labels).

    Every extractor's matrix is drawn from its own sub-seeded stream, so
    the views are independent; matrices are stored as float32 like loaded
    data.  Apply :func:`inject_symmetric_noise` separately for noisy labels.
    """
    sizes = class_sizes(spec)
    labels = np.repeat(np.arange(spec.c, dtype=np.int64), sizes)
    y = LabelVector(labels=labels, c=spec.c)
    matrices = []
    for i, k in enumerate(spec.dims):
        rng = np.random.default_rng([spec.seed, i])
        centroids = _centroids(rng, spec.c, k, spec.separation)
        samples = np.repeat(centroids, sizes, axis=0)
        if spec.spread > 0:
            samples = samples + spec.spread * rng.standard_normal(samples.shape)
        matrices.append(
            FeatureMatrix(extractor_id=f"synth{i}", data=samples.astype(np.float32))
        )
    return FeatureBundle(matrices=tuple(matrices), labels=y)


def inject_symmetric_noise(y: LabelVector, eta: float, seed: int) -> LabelVector:
    """Flip each label with probability eta, uniformly to another class.

    A flipped label is never equal to the original.  Deterministic per seed.
    """
    if not (0.0 <= eta <= 1.0):
        raise ValidationError(f"noise rate must be in [0, 1], got {eta}")
    rng = np.random.default_rng([seed])
    labels = y.labels.copy()
    flip = rng.random(y.n) < eta
    # Uniform draw over the c-1 other classes: shift draws at or above the
    # original label up by one.
    draws = rng.integers(0, y.c - 1, size=y.n)
    flipped = draws + (draws >= labels)
    labels[flip] = flipped[flip]
    return LabelVector(labels=labels, c=y.c)
