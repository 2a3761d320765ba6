"""Shared fixtures: a hand-checkable two-extractor bundle and random bundles."""

import numpy as np
import pytest

from fselect import FeatureBundle, FeatureMatrix, LabelVector


@pytest.fixture
def chain_bundle() -> FeatureBundle:
    """2-class, 6-sample, 2-extractor fixture with hand-computable geometry.

    Extractor "a" (k=2): class 0 centroid (4,0), class 1 centroid (0,8);
    every sample pseudo-classified correctly.  Extractor "b" (k=3): class 0
    centroid (10,0,0), class 1 centroid (0,6,0); sample 1 lands nearer the
    other class's centroid and is the only pseudo-label miss.
    """
    a = FeatureMatrix(
        "a",
        np.array(
            [[0, 0], [2, 0], [10, 0], [0, 4], [0, 6], [0, 14]], dtype=np.float64
        ),
    )
    b = FeatureMatrix(
        "b",
        np.array(
            [
                [9, 0, 0],
                [1, 0, 0],
                [20, 0, 0],
                [0, 2, 0],
                [0, 12, 0],
                [0, 4, 0],
            ],
            dtype=np.float64,
        ),
    )
    y = LabelVector(np.array([0, 0, 0, 1, 1, 1]), c=2)
    return FeatureBundle((a, b), y)


def random_bundle(
    rng: np.random.Generator,
    n: int = 60,
    c: int = 3,
    dims: tuple[int, ...] = (4, 7),
    scale: float = 3.0,
) -> FeatureBundle:
    """Random float64 bundle with every class represented."""
    labels = np.concatenate(
        [np.arange(c), rng.integers(0, c, size=n - c)]
    ).astype(np.int64)
    rng.shuffle(labels)
    y = LabelVector(labels, c=c)
    matrices = []
    for i, k in enumerate(dims):
        shift = rng.normal(scale=scale, size=(c, k))
        data = shift[labels] + rng.normal(size=(n, k))
        matrices.append(FeatureMatrix(f"m{i}", data))
    return FeatureBundle(tuple(matrices), y)
