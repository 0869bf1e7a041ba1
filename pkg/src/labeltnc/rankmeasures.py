"""Label-free competitor measures (T&C, MRRE, KL density) and the plain
label baseline (a CVM applied to the embedding alone)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from labeltnc.core import CvmConfig, EvalPair, InvalidK, LabeledDataset
from labeltnc.cvm import CvmResult, evaluate_cvm
from labeltnc.metricspace import RankTable, canonical_condensed, pairwise_distances, rank_table


@dataclass(frozen=True)
class NeighborConfig:
    k_list: tuple[int, ...] = (5, 10, 15, 20, 25)
    sigma_list: tuple[float, ...] = (0.01, 0.1, 1.0)

    def check(self, n: int) -> None:
        if not self.k_list:
            raise InvalidK("k_list is empty")
        for k in self.k_list:
            # the T&C normalizer N k (2N - 3k - 1) must stay positive
            if k < 1 or not 3 * k < 2 * n - 1:
                raise InvalidK(f"k={k} is invalid for N={n}; need 1 <= k < (2N-1)/3")
        if not self.sigma_list or min(self.sigma_list) <= 0:
            raise ValueError("sigma_list must hold positive values")


@dataclass(frozen=True)
class PairedScore:
    first: float
    second: float
    per_param: dict = field(default_factory=dict)


def _ranks(pair: EvalPair) -> tuple[RankTable, RankTable]:
    return (
        rank_table(pairwise_distances(pair.original.points)),
        rank_table(pairwise_distances(pair.embedding.points)),
    )


def _clamp(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def trust_cont(pair: EvalPair, config: NeighborConfig = NeighborConfig(), ranks=None) -> PairedScore:
    """Trustworthiness and continuity averaged over ``config.k_list``."""
    n = pair.n
    config.check(n)
    rx, rz = ranks or _ranks(pair)
    per_k = {}
    for k in config.k_list:
        nn_x, nn_z = rx.knn_mask(k), rz.knn_mask(k)
        false_nb = nn_z & ~nn_x
        missing_nb = nn_x & ~nn_z
        norm = 2.0 / (n * k * (2 * n - 3 * k - 1))
        t = 1.0 - norm * float((rx.ranks[false_nb] - k).sum())
        c = 1.0 - norm * float((rz.ranks[missing_nb] - k).sum())
        per_k[k] = (_clamp(t), _clamp(c))
    vals = np.array(list(per_k.values()))
    return PairedScore(float(vals[:, 0].mean()), float(vals[:, 1].mean()), per_k)


def mrre(pair: EvalPair, config: NeighborConfig = NeighborConfig(), ranks=None) -> PairedScore:
    """Mean relative rank errors as ``(false, missing)`` quality scores.

    The false variant sums over the embedding's neighbors and divides by the
    embedding rank; the missing variant does the same from the data side.
    """
    n = pair.n
    config.check(n)
    rx, rz = ranks or _ranks(pair)
    diff = np.abs(rx.ranks - rz.ranks).astype(np.float64)
    per_k = {}
    for k in config.k_list:
        t = np.arange(1, k + 1)
        c = n * float(np.sum(np.abs(n - 2 * t + 1) / t))
        nn_x, nn_z = rx.knn_mask(k), rz.knn_mask(k)
        err_false = float((diff[nn_z] / rz.ranks[nn_z]).sum()) / c
        err_missing = float((diff[nn_x] / rx.ranks[nn_x]).sum()) / c
        per_k[k] = (_clamp(1.0 - err_false), _clamp(1.0 - err_missing))
    vals = np.array(list(per_k.values()))
    return PairedScore(float(vals[:, 0].mean()), float(vals[:, 1].mean()), per_k)


def _density(points: np.ndarray, sigma: float) -> np.ndarray:
    d = squareform(canonical_condensed(pdist(points)))
    phi = np.exp(-(d**2) / sigma)
    np.fill_diagonal(phi, 0.0)
    phi = phi.sum(axis=1)
    return phi / phi.sum()


def kl_density(pair: EvalPair, config: NeighborConfig = NeighborConfig()) -> PairedScore:
    """KL divergence of the embedding's kernel density from the data's.

    Returns ``(kl, quality)`` with ``quality = 1 / (1 + kl)``; kl is averaged
    over ``config.sigma_list``.
    """
    if not config.sigma_list or min(config.sigma_list) <= 0:
        raise ValueError("sigma_list must hold positive values")
    per_sigma = {}
    for sigma in config.sigma_list:
        p_x = _density(pair.original.points, sigma)
        p_z = _density(pair.embedding.points, sigma)
        per_sigma[sigma] = float(np.sum(p_x * np.log(p_x / p_z)))
    kl = float(np.mean(list(per_sigma.values())))
    return PairedScore(kl, min(1.0 / (1.0 + kl), 1.0), per_sigma)


def label_baseline(embedding: LabeledDataset, config: CvmConfig) -> CvmResult:
    """The configured CVM on the embedding alone, all classes at once."""
    return evaluate_cvm(embedding, config)
