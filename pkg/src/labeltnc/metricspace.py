"""Distance kernels: pairwise and point-to-centroid distances, affine
distance wrappers, min-max canonicalization, and neighbor ranks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from labeltnc.core import LabeledDataset, NonFinite


@dataclass(frozen=True)
class DistanceOracle:
    """Euclidean distance wrapped as ``alpha * d + beta``.

    The identity oracle (``alpha=1, beta=0``) gives raw geometry. Non-trivial
    wrappers exist to probe scale and shift invariance of a measure.
    """

    alpha: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if not self.beta >= 0:
            raise ValueError("beta must be >= 0")

    @property
    def is_identity(self) -> bool:
        return self.alpha == 1.0 and self.beta == 0.0

    def transform(self, d: np.ndarray) -> np.ndarray:
        if self.is_identity:
            return d
        return self.alpha * d + self.beta

    def pairwise(self, points: np.ndarray) -> np.ndarray:
        return pairwise_distances(points, self)

    def between(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Distances from every row of ``a`` to every row of ``b``."""
        return self.transform(cdist(a, b))


IDENTITY = DistanceOracle()


def pairwise_distances(data: np.ndarray, oracle: DistanceOracle = IDENTITY) -> np.ndarray:
    """Full N x N matrix of wrapped distances; the diagonal holds ``beta``."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim == 1:
        data = data[:, None]
    if not np.all(np.isfinite(data)):
        raise NonFinite("non-finite coordinate in distance input")
    return oracle.transform(squareform(pdist(data)))


@dataclass(frozen=True)
class CanonicalMap:
    """The affine map ``e -> (e - lo) / (hi - lo)`` found by :func:`canonicalize`."""

    lo: float
    hi: float

    @property
    def degenerate(self) -> bool:
        return not self.hi > self.lo

    def apply(self, e: np.ndarray) -> np.ndarray:
        """Map further distances (e.g. to centroids) into canonical units, clamped at 0."""
        e = np.asarray(e, dtype=np.float64)
        if self.degenerate:
            return np.ones_like(e)
        return np.maximum((e - self.lo) / (self.hi - self.lo), 0.0)


def canonicalize(distances: np.ndarray) -> tuple[np.ndarray, CanonicalMap]:
    """Min-max normalize the off-diagonal entries to ``[0, 1]``.

    Any map ``alpha * d + beta`` applied to the input cancels out. When every
    off-diagonal entry is equal they all map to 1.
    """
    distances = np.asarray(distances, dtype=np.float64)
    n = distances.shape[0]
    if n < 2:
        raise ValueError("canonicalize needs at least 2 points")
    off = ~np.eye(n, dtype=bool)
    vals = distances[off]
    cmap = CanonicalMap(float(vals.min()), float(vals.max()))
    out = np.zeros_like(distances)
    if cmap.degenerate:
        out[off] = 1.0
    else:
        out[off] = (vals - cmap.lo) / (cmap.hi - cmap.lo)
    return out, cmap


def canonical_condensed(condensed: np.ndarray) -> np.ndarray:
    """Same map as :func:`canonicalize`, on a condensed (pdist-order) vector."""
    lo, hi = condensed.min(), condensed.max()
    if not hi > lo:
        return np.ones_like(condensed)
    return (condensed - lo) / (hi - lo)


@dataclass(frozen=True, eq=False)
class RankTable:
    """``ranks[i, j]`` is the neighbor rank (1..N-1) of j around i; diagonal 0."""

    ranks: np.ndarray
    order: np.ndarray  # order[i] lists neighbors of i, nearest first, self excluded

    @property
    def n(self) -> int:
        return self.ranks.shape[0]

    def knn(self, i: int, k: int) -> np.ndarray:
        return self.order[i, :k]

    def knn_mask(self, k: int) -> np.ndarray:
        """Boolean N x N mask, True where j is among the k nearest of i."""
        return (self.ranks >= 1) & (self.ranks <= k)


def rank_table(distances: np.ndarray) -> RankTable:
    """Neighbor ranks per row; ties go to the lower point index."""
    d = np.array(distances, dtype=np.float64, copy=True)
    n = d.shape[0]
    np.fill_diagonal(d, -np.inf)
    order = np.argsort(d, axis=1, kind="stable")
    ranks = np.empty((n, n), dtype=np.int64)
    rows = np.arange(n)[:, None]
    ranks[rows, order] = np.arange(n)[None, :]
    return RankTable(ranks=ranks, order=order[:, 1:])


def class_centroids(data: LabeledDataset) -> tuple[np.ndarray, np.ndarray]:
    """Per-class means (k x dim, row c is class code c) and the global mean."""
    centroids = np.stack([data.points[idx].mean(axis=0) for idx in data.class_indices])
    return centroids, data.points.mean(axis=0)
