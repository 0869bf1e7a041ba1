"""Label-Trustworthiness and Label-Continuity.

A CVM is applied to every pair of classes in both spaces, giving two
symmetric class-pairwise matrices. Their difference splits into a part where
the embedding lost separation (False Groups) and a part where it gained
separation (Missing Groups); each is averaged over the class pairs.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from labeltnc.core import CvmConfig, EvalPair, LabeledDataset, LtncError, check_dataset
from labeltnc.cvm import dsc_pair_matrix, evaluate_cvm
from labeltnc.metricspace import IDENTITY, DistanceOracle

GUIDELINES = {
    "A": "embedding preserves how well the classes are clustered in the original space",
    "B": "Missing Groups: some classes look more separated in the embedding than they are in the data",
    "C": "False Groups: some classes that are separated in the data look merged in the embedding",
    "D": "both False and Missing Groups are strong; this combination is atypical, check the inputs",
}


@dataclass(frozen=True, eq=False)
class ClmMatrix:
    values: np.ndarray
    space_tag: str = "original"

    @property
    def k(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Interpretation:
    quadrant: str
    guideline: str
    unlikely: bool
    severe: bool
    hi: float
    lo: float


@dataclass(frozen=True, eq=False)
class DistortionReport:
    m_x: ClmMatrix
    m_z: ClmMatrix
    m_star: np.ndarray
    m_fg: np.ndarray
    m_mg: np.ndarray
    label_t: float
    label_c: float
    interpretation: Interpretation
    cvm_id: str
    pair_contributions: list[dict] = field(default_factory=list)

    @property
    def quadrant(self) -> str:
        return self.interpretation.quadrant


def class_pairs(k: int) -> list[tuple[int, int]]:
    return list(combinations(range(k), 2))


def clm_matrix(
    data: LabeledDataset,
    config: CvmConfig,
    oracle: DistanceOracle = IDENTITY,
    space_tag: str = "original",
    threads: int = 1,
) -> ClmMatrix:
    """Symmetric k x k matrix of CVM scores over every pair of classes.

    The pair (i, j) is scored on the points of classes i and j only. Its
    random stream is ``(config.seed, i, j)``, so the same pair sees the same
    permutations in X and in Z.
    """
    check_dataset(data)
    if config.cvm_id == "dsc":
        # centroid-based: one pass over all points scores every pair
        values = dsc_pair_matrix(data, oracle)
        values.setflags(write=False)
        return ClmMatrix(values, space_tag)
    k = data.k
    pairs = class_pairs(k)

    def score(pair):
        i, j = pair
        try:
            return evaluate_cvm(data.restrict(pair), config, oracle, stream=(i, j)).score
        except LtncError as exc:
            raise type(exc)(f"class pair ({i}, {j}): {exc}") from exc

    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scores = list(pool.map(score, pairs))
    else:
        scores = [score(p) for p in pairs]

    values = np.zeros((k, k))
    for (i, j), s in zip(pairs, scores):
        values[i, j] = values[j, i] = s
    values.setflags(write=False)
    return ClmMatrix(values, space_tag)


def interpret(label_t: float, label_c: float, hi: float = 0.9, lo: float = 0.7) -> Interpretation:
    """Place a (Label-T, Label-C) pair into guideline quadrant A-D.

    ``hi`` splits high from low; a low score under ``lo`` marks the finding
    as severe.
    """
    if not 0.0 <= lo <= hi <= 1.0:
        raise ValueError("need 0 <= lo <= hi <= 1")
    t_high, c_high = label_t >= hi, label_c >= hi
    if t_high and c_high:
        q = "A"
    elif t_high:
        q = "B"
    elif c_high:
        q = "C"
    else:
        q = "D"
    severe = min(label_t, label_c) < lo
    return Interpretation(q, GUIDELINES[q], q == "D", severe, hi, lo)


def distortions(m_x: ClmMatrix, m_z: ClmMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    m_star = m_x.values - m_z.values
    m_fg = np.where(m_star > 0, m_star, 0.0)
    m_mg = np.where(m_star < 0, -m_star, 0.0)
    return m_star, m_fg, m_mg


def label_tnc(
    pair: EvalPair,
    config: CvmConfig,
    hi: float = 0.9,
    lo: float = 0.7,
    threads: int = 1,
) -> DistortionReport:
    m_x = clm_matrix(pair.original, config, space_tag="original", threads=threads)
    m_z = clm_matrix(pair.embedding, config, space_tag="embedding", threads=threads)
    m_star, m_fg, m_mg = distortions(m_x, m_z)
    iu = np.triu_indices(pair.k, 1)
    label_t = 1.0 - float(m_fg[iu].mean())
    label_c = 1.0 - float(m_mg[iu].mean())
    contributions = [
        {"i": int(i), "j": int(j), "m_x": float(m_x.values[i, j]), "m_z": float(m_z.values[i, j]),
         "fg": float(m_fg[i, j]), "mg": float(m_mg[i, j])}
        for i, j in zip(*iu)
    ]
    return DistortionReport(
        m_x=m_x,
        m_z=m_z,
        m_star=m_star,
        m_fg=m_fg,
        m_mg=m_mg,
        label_t=label_t,
        label_c=label_c,
        interpretation=interpret(label_t, label_c, hi, lo),
        cvm_id=config.cvm_id,
        pair_contributions=contributions,
    )
