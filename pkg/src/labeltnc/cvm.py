"""Clustering validation measures (CVMs) and the invariance-axiom harness.

``dsc`` and ``ch_btwn`` are the two measures admissible for Label-T&C:
both are invariant to scaling and shifting of the distance function and
map chance-level clusterings to 0 and perfect ones to 1. ``silhouette_cvm``
is kept as a reference that is *not* shift invariant.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
from scipy.spatial.distance import pdist, squareform

from labeltnc.core import (
    ClassTooSmall,
    CvmConfig,
    DegenerateLabels,
    LabeledDataset,
)
from labeltnc.metricspace import IDENTITY, DistanceOracle, canonical_condensed, class_centroids

EPS = 1e-12
_MC_CHUNK = 512


@dataclass(frozen=True)
class CvmResult:
    score: float
    cvm_id: str
    diagnostics: dict[str, Any] = field(default_factory=dict)


def _require_classes(data: LabeledDataset) -> None:
    if data.k < 2:
        raise DegenerateLabels(f"CVM needs at least 2 classes, got {data.k}")


def dsc(data: LabeledDataset, oracle: DistanceOracle = IDENTITY) -> CvmResult:
    """Distance consistency, rescaled so chance is 0 and perfect is 1.

    A point is consistent when its own class centroid is at least as close as
    every other centroid (ties count for the own class).
    """
    _require_classes(data)
    centroids, _ = class_centroids(data)
    d = oracle.between(data.points, centroids)
    rows = np.arange(data.n)
    own = d[rows, data.codes]
    d[rows, data.codes] = np.inf
    consistent = own <= d.min(axis=1)
    f_own = float(np.count_nonzero(consistent)) / data.n
    score = min(max(2.0 * f_own - 1.0, 0.0), 1.0)
    return CvmResult(score, "dsc", {"f_own": f_own})


def dsc_pair_matrix(data: LabeledDataset, oracle: DistanceOracle = IDENTITY) -> np.ndarray:
    """DSC of every class pair at once, equal to ``dsc(data.restrict((i, j)))``.

    Restricting to two classes leaves their centroids unchanged, so one
    N x k table of point-to-centroid distances answers every pair.
    """
    _require_classes(data)
    centroids, _ = class_centroids(data)
    d = oracle.between(data.points, centroids)
    own = d[np.arange(data.n), data.codes]
    k = data.k
    # hits[c, j]: members of class c at least as close to their centroid as to centroid j
    hits = np.zeros((k, k), dtype=np.int64)
    for c, idx in enumerate(data.class_indices):
        hits[c] = np.count_nonzero(own[idx, None] <= d[idx], axis=0)
    sizes = data.class_sizes()
    out = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            f_own = float(hits[i, j] + hits[j, i]) / int(sizes[i] + sizes[j])
            out[i, j] = out[j, i] = min(max(2.0 * f_own - 1.0, 0.0), 1.0)
    return out


def _canonical_sq(data: LabeledDataset, oracle: DistanceOracle) -> np.ndarray:
    d = oracle.transform(pdist(data.points))
    return squareform(canonical_condensed(d) ** 2)


def _between_ratio(e2: np.ndarray, codes: np.ndarray, sizes: np.ndarray) -> np.ndarray:
    """Between-class share of total scatter for each row of ``codes``.

    Scatter is computed from squared canonical distances: the within part of
    class c is ``sum_{i,j in c} e2[i,j] / (2 n_c)``, i.e. the squared distance
    of members to their class centroid in the space the distances live in.
    """
    n = e2.shape[0]
    total = e2.sum() / (2.0 * n)
    within = np.zeros(codes.shape[0])
    for c, n_c in enumerate(sizes):
        h = (codes == c).astype(np.float64)
        within += np.einsum("ij,ij->i", h @ e2, h) / (2.0 * n_c)
    between = total - within
    return between / (total + EPS), between, within


def ch_btwn(
    data: LabeledDataset,
    oracle: DistanceOracle = IDENTITY,
    config: CvmConfig | None = None,
    stream: tuple[int, ...] = (),
) -> CvmResult:
    """Between-dataset Calinski-Harabasz score, chance-normalized.

    Distances are min-max canonicalized first, which removes any scale and
    shift. The raw score is separability / (separability + compactness).
    Its expectation under ``mc_count`` size-preserving label permutations is
    subtracted out so that chance maps to 0. ``stream`` extends the seed (the
    class-pair index when called per pair); data never enters the seed.
    """
    config = config or CvmConfig("ch_btwn")
    _require_classes(data)
    if config.mc_count < 1:
        raise ValueError("mc_count must be >= 1")
    e2 = _canonical_sq(data, oracle)
    codes = np.asarray(data.codes)
    sizes = data.class_sizes()
    raw_arr, sep, comp = _between_ratio(e2, codes[None, :], sizes)
    raw = float(raw_arr[0])

    rng = np.random.default_rng(np.random.SeedSequence([config.seed, *stream]))
    null = np.empty(config.mc_count)
    for start in range(0, config.mc_count, _MC_CHUNK):
        stop = min(start + _MC_CHUNK, config.mc_count)
        perms = rng.permuted(np.tile(codes, (stop - start, 1)), axis=1)
        null[start:stop] = _between_ratio(e2, perms, sizes)[0]
    mu = float(null.mean())

    if mu >= 1.0 - 1e-9:
        score = 0.0
    else:
        score = min(max((raw - mu) / (1.0 - mu), 0.0), 1.0)
    diag = {
        "raw": raw,
        "null_mean": mu,
        "null_std": float(null.std()),
        "separability": float(sep[0]),
        "compactness": float(comp[0]),
        "mc_count": config.mc_count,
    }
    return CvmResult(score, "ch_btwn", diag)


def silhouette_cvm(data: LabeledDataset, oracle: DistanceOracle = IDENTITY) -> CvmResult:
    """Mean silhouette coefficient mapped from [-1, 1] to [0, 1]."""
    _require_classes(data)
    sizes = data.class_sizes()
    if sizes.min() < 2:
        small = int(np.argmin(sizes))
        raise ClassTooSmall(f"class {small} has {sizes[small]} member(s); silhouette needs 2")
    d = oracle.pairwise(data.points)
    onehot = np.zeros((data.n, data.k))
    onehot[np.arange(data.n), data.codes] = 1.0
    sums = d @ onehot
    rows = np.arange(data.n)
    own = data.codes
    # the diagonal carries beta under a shifted oracle; it is not a neighbor
    a = (sums[rows, own] - d[rows, rows]) / (sizes[own] - 1)
    means = sums / sizes[None, :]
    means[rows, own] = np.inf
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    s = np.where(denom > 0, (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
    s_mean = float(s.mean())
    score = min(max((s_mean + 1.0) / 2.0, 0.0), 1.0)
    return CvmResult(score, "silhouette", {"silhouette": s_mean})


def evaluate_cvm(
    data: LabeledDataset,
    config: CvmConfig,
    oracle: DistanceOracle = IDENTITY,
    stream: tuple[int, ...] = (),
) -> CvmResult:
    if config.cvm_id == "dsc":
        return dsc(data, oracle)
    if config.cvm_id == "ch_btwn":
        return ch_btwn(data, oracle, config, stream)
    if config.cvm_id == "silhouette":
        return silhouette_cvm(data, oracle)
    raise ValueError(f"unknown cvm {config.cvm_id!r}")


# -- axiom harness ----------------------------------------------------------

AXIOMS = ("scale", "shift", "range", "hyperparameter")
STABILITY_MC = (100, 1000, 10000)


@dataclass
class AxiomResult:
    passed: bool
    tolerance: float
    max_delta: float
    witness: dict[str, Any] | None = None


@dataclass
class AxiomReport:
    cvm_id: str
    trials: int
    seed: int
    results: dict[str, AxiomResult]

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "cvm": self.cvm_id,
            "trials": self.trials,
            "seed": self.seed,
            "axioms": {name: asdict(self.results[name]) for name in AXIOMS},
        }

    def lines(self) -> list[str]:
        out = []
        for name in AXIOMS:
            r = self.results[name]
            verdict = "PASS" if r.passed else "FAIL"
            line = f"{name:15s} {verdict}  max_delta={r.max_delta:.6g} tol={r.tolerance:g}"
            if not r.passed and r.witness is not None:
                wit = ", ".join(f"{k}={_fmt(v)}" for k, v in r.witness.items())
                line += f"\n    witness: {wit}"
            out.append(line)
        return out


def _fmt(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def default_tolerance(cvm_id: str) -> float:
    return {"dsc": 0.0, "ch_btwn": 0.02, "silhouette": 0.02}[cvm_id]


def _two_gaussians(rng: np.random.Generator) -> tuple[LabeledDataset, dict[str, Any]]:
    n = int(rng.integers(20, 201))
    dim = int(rng.integers(2, 51))
    n0 = int(rng.integers(n // 4, n - n // 4 + 1))
    separation = float(rng.uniform(0.0, 6.0))
    direction = rng.normal(size=dim)
    direction /= np.linalg.norm(direction)
    pts = rng.normal(size=(n, dim))
    pts[n0:] += separation * direction
    labels = np.r_[np.zeros(n0, dtype=int), np.ones(n - n0, dtype=int)]
    meta = {"n": n, "dim": dim, "separation": separation}
    return LabeledDataset(pts, labels), meta


def _best_case(rng: np.random.Generator, dim: int) -> LabeledDataset:
    pts = rng.normal(scale=0.1, size=(200, dim))
    pts[100:, 0] += 100.0
    return LabeledDataset(pts, np.repeat([0, 1], 100))


def _chance_case(rng: np.random.Generator) -> tuple[LabeledDataset, int]:
    # Labels independent of position. Large N and low dimension keep the
    # finite-sample bias of centroid measures (a point pulls its own class
    # centroid toward itself) well under the 0.1 bound.
    dim = int(rng.integers(2, 4))
    pts = rng.normal(size=(2000, dim))
    return LabeledDataset(pts, rng.permutation(np.repeat([0, 1], 1000))), dim


def check_axioms(
    cvm: CvmConfig,
    trials: int = 100,
    seed: int = 0,
    tol: float | None = None,
    range_trials: int = 5,
    stability_trials: int = 3,
) -> AxiomReport:
    """Probe scale, shift, range and hyperparameter-stability requirements.

    Failures are recorded with a concrete witness, never raised.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tol = default_tolerance(cvm.cvm_id) if tol is None else tol
    worst = {name: (-1.0, None) for name in ("scale", "shift")}

    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        data, meta = _two_gaussians(rng)
        alpha = float(rng.uniform(0.1, 10.0))
        beta = float(rng.uniform(0.1, 100.0))
        base = evaluate_cvm(data, cvm).score
        for name, oracle in (("scale", DistanceOracle(alpha=alpha)), ("shift", DistanceOracle(beta=beta))):
            moved = evaluate_cvm(data, cvm, oracle).score
            delta = abs(moved - base)
            if delta > worst[name][0]:
                wit = {"trial": t, **meta, "alpha": oracle.alpha, "beta": oracle.beta,
                       "score": base, "score_transformed": moved, "delta": delta}
                worst[name] = (delta, wit)

    results = {}
    for name, (delta, wit) in worst.items():
        results[name] = AxiomResult(delta <= tol, tol, delta, wit)

    # range: best-case instances must reach >= 0.9, chance instances <= 0.1
    range_fail = None
    range_delta = 0.0
    for t in range(range_trials):
        rng = np.random.default_rng([seed, 10**6 + t])
        dim = int(rng.integers(2, 51))
        best = evaluate_cvm(_best_case(rng, dim), cvm).score
        chance_data, chance_dim = _chance_case(rng)
        chance = evaluate_cvm(chance_data, cvm).score
        shortfall = max(0.9 - best, chance - 0.1, 0.0)
        range_delta = max(range_delta, shortfall)
        if shortfall > 0 and range_fail is None:
            range_fail = {"trial": t, "dim": dim, "best_case_score": best,
                          "chance_dim": chance_dim, "chance_score": chance}
    results["range"] = AxiomResult(range_fail is None, 0.0, range_delta, range_fail)

    # hyperparameter stability only concerns the Monte-Carlo count of ch_btwn
    stab_fail = None
    stab_delta = 0.0
    if cvm.cvm_id == "ch_btwn":
        for t in range(stability_trials):
            rng = np.random.default_rng([seed, t])
            data, meta = _two_gaussians(rng)
            scores = [ch_btwn(data, config=CvmConfig("ch_btwn", mc, cvm.seed)).score for mc in STABILITY_MC]
            spread = max(scores) - min(scores)
            stab_delta = max(stab_delta, spread)
            if spread > 0.05 and stab_fail is None:
                stab_fail = {"trial": t, **meta, **{f"mc_{mc}": s for mc, s in zip(STABILITY_MC, scores)}}
    results["hyperparameter"] = AxiomResult(stab_fail is None, 0.05, stab_delta, stab_fail)

    return AxiomReport(cvm.cvm_id, trials, seed, results)
