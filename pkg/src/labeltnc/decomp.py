"""PCA and Ward-linkage agglomerative clustering with multi-level cuts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from labeltnc.core import BadRange, NoConvergence, RankTooLarge, remap_labels


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # dim x r, orthonormal columns
    eigenvalues: np.ndarray
    explained_ratio: np.ndarray

    @property
    def rank(self) -> int:
        return self.components.shape[1]


def pca_fit(data: np.ndarray, r: int | None = None) -> PcaModel:
    """Principal components from the eigendecomposition of the covariance.

    Components are sign-normalized so their largest-magnitude loading is
    positive, which makes fits reproducible across runs.
    """
    data = np.asarray(data, dtype=np.float64)
    n, dim = data.shape
    if n < 2:
        raise RankTooLarge("PCA needs at least 2 points")
    max_rank = min(n - 1, dim)
    r = max_rank if r is None else r
    if not 1 <= r <= max_rank:
        raise RankTooLarge(f"rank {r} exceeds min(N-1, dim) = {max_rank}")
    mean = data.mean(axis=0)
    centered = data - mean
    cov = centered.T @ centered / (n - 1)
    try:
        evals, evecs = np.linalg.eigh(cov)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    evals = evals[::-1]
    evecs = evecs[:, ::-1]
    evals = np.where(evals < 0, 0.0, evals)
    pivot = np.argmax(np.abs(evecs), axis=0)
    signs = np.sign(evecs[pivot, np.arange(dim)])
    evecs = evecs * np.where(signs == 0, 1.0, signs)
    total = float(np.trace(cov))
    ratio = evals / total if total > 0 else np.zeros_like(evals)
    return PcaModel(mean, evecs[:, :r], evals[:r], ratio[:r])


def pca_project(model: PcaModel, data: np.ndarray, component_range: tuple[int, int]) -> np.ndarray:
    """Coordinates on components ``a..b`` (1-based, inclusive)."""
    a, b = component_range
    if not 1 <= a <= b <= model.rank:
        raise BadRange(f"component range [{a}..{b}] outside 1..{model.rank}")
    return (np.asarray(data, dtype=np.float64) - model.mean) @ model.components[:, a - 1 : b]


def pca_reconstruct(model: PcaModel, coords: np.ndarray, component_range: tuple[int, int]) -> np.ndarray:
    a, b = component_range
    return coords @ model.components[:, a - 1 : b].T + model.mean


@dataclass(frozen=True, eq=False)
class Dendrogram:
    """Merge list in the scipy linkage layout: rows ``(left, right, height, size)``.

    Leaves are nodes ``0..N-1``; the merge in row s creates node ``N + s``.
    """

    merges: np.ndarray

    @property
    def n_leaves(self) -> int:
        return self.merges.shape[0] + 1

    @property
    def heights(self) -> np.ndarray:
        return self.merges[:, 2]


def ward_dendrogram(data: np.ndarray) -> Dendrogram:
    """Ward agglomeration via Lance-Williams updates on squared distances.

    Heights are the square roots of the updated squared distances (for two
    singletons, their Euclidean distance). Among equal candidate merges the
    one with the smallest (row, column) slot wins. Row minima are cached and
    refreshed only when invalidated, which gives the same result as scanning
    the whole matrix every step.
    """
    data = np.asarray(data, dtype=np.float64)
    n = data.shape[0]
    if n < 2:
        raise ValueError("Ward clustering needs at least 2 points")
    d2 = squareform(pdist(data, "sqeuclidean"))
    np.fill_diagonal(d2, np.inf)
    size = np.ones(n)
    node = np.arange(n)
    active = np.ones(n, dtype=bool)
    row_arg = np.argmin(d2, axis=1)
    row_min = d2[np.arange(n), row_arg]
    merges = np.empty((n - 1, 4))

    for step in range(n - 1):
        i = int(np.argmin(np.where(active, row_min, np.inf)))
        j = int(row_arg[i])
        dij = d2[i, j]
        a, b = sorted((node[i], node[j]))
        merges[step] = (a, b, np.sqrt(dij), size[i] + size[j])

        nw = size
        new = ((size[i] + nw) * d2[i] + (size[j] + nw) * d2[j] - nw * dij) / (size[i] + size[j] + nw)
        new[~active] = np.inf
        new[i] = new[j] = np.inf
        d2[i, :] = new
        d2[:, i] = new
        d2[j, :] = np.inf
        d2[:, j] = np.inf
        active[j] = False
        size[i] += size[j]
        node[i] = n + step

        row_arg[i] = np.argmin(d2[i])
        row_min[i] = d2[i, row_arg[i]]
        others = active.copy()
        others[i] = False
        stale = others & ((row_arg == i) | (row_arg == j))
        better = others & ~stale & ((new < row_min) | ((new == row_min) & (i < row_arg)))
        row_arg[better] = i
        row_min[better] = new[better]
        for r in np.flatnonzero(stale):
            row_arg[r] = np.argmin(d2[r])
            row_min[r] = d2[r, row_arg[r]]
    return Dendrogram(merges)


@dataclass(frozen=True, eq=False)
class CutLevel:
    level: int
    threshold: float
    labels: np.ndarray
    k: int

    @property
    def usable(self) -> bool:
        """At least two clusters, so a CVM can be evaluated on it."""
        return self.k >= 2


def _components(dendrogram: Dendrogram, threshold: float) -> np.ndarray:
    n = dendrogram.n_leaves
    parent = np.arange(2 * n - 1)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s, (a, b, h, _) in enumerate(dendrogram.merges):
        if h <= threshold:
            parent[find(int(a))] = n + s
            parent[find(int(b))] = n + s
    roots = np.array([find(x) for x in range(n)])
    return remap_labels(roots)[0]


def cut_levels(dendrogram: Dendrogram, levels: int = 20, anchor: str = "min") -> list[CutLevel]:
    """Partitions at ``levels`` evenly spaced height thresholds.

    Level l uses threshold ``h0 + l * (h_max - h0) / levels`` where h0 is
    the lowest merge height (``anchor="min"``) or 0 (``anchor="zero"``).
    Higher levels are coarser; the last one merges everything.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    h = dendrogram.heights
    h_max = float(h.max())
    h0 = float(h.min()) if anchor == "min" else 0.0
    if anchor not in ("min", "zero"):
        raise ValueError("anchor must be 'min' or 'zero'")
    out = []
    for level in range(1, levels + 1):
        t = h_max if level == levels else h0 + level * (h_max - h0) / levels
        labels = _components(dendrogram, t)
        out.append(CutLevel(level, t, labels, int(labels.max()) + 1))
    return out
