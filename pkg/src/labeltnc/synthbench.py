"""Synthetic sensitivity experiments A, B-1, B-2, C, D, E, F.

Experiments A-C keep the data fixed and distort the embedding (False
Groups); D-F keep the embedding fixed and distort the data (Missing
Groups). Every schedule is a deterministic function of its parameters and
seed, and the fixed side is the same object at every step.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from labeltnc.core import CvmConfig, EvalPair, InsufficientDims, LabeledDataset, LtncError, validate_pair
from labeltnc.decomp import pca_fit, pca_project
from labeltnc.ltnc import label_tnc
from labeltnc.metricspace import pairwise_distances, rank_table
from labeltnc.rankmeasures import NeighborConfig, kl_density, label_baseline, mrre, trust_cont

EXPERIMENTS = ("A", "B1", "B2", "C", "D", "E", "F")
N_CLUSTERS = 6


@dataclass(frozen=True)
class DiscBallParams:
    n_per_cluster: int = 100
    hd_dim: int = 100
    hd_radius: float = 5.0
    hd_distance: float = 10.0
    ld_radius: float = 1.5
    ld_distance: float = 4.0


@dataclass(frozen=True, eq=False)
class Step:
    parameter: float
    pair: EvalPair
    meta: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class ExperimentSchedule:
    experiment_id: str
    parameter_name: str
    steps: list[Step]
    seed: int | None
    params: dict[str, Any] = field(default_factory=dict)

    def __len__(self):
        return len(self.steps)


# -- geometry ---------------------------------------------------------------


def uniform_ball(rng: np.random.Generator, n: int, dim: int, radius: float) -> np.ndarray:
    """Points uniform in a ``dim``-ball: random direction times ``radius * u**(1/dim)``."""
    direction = rng.normal(size=(n, dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    return direction * (radius * rng.random(n) ** (1.0 / dim))[:, None]


def planar_center(dim: int, distance: float, angle_deg: float) -> np.ndarray:
    c = np.zeros(dim)
    theta = np.deg2rad(angle_deg)
    c[0] = distance * np.cos(theta)
    c[1] = distance * np.sin(theta)
    return c


def _offsets(params: DiscBallParams, seed: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    rng = np.random.default_rng(seed)
    hd = [uniform_ball(rng, params.n_per_cluster, params.hd_dim, params.hd_radius) for _ in range(N_CLUSTERS)]
    ld = [uniform_ball(rng, params.n_per_cluster, 2, params.ld_radius) for _ in range(N_CLUSTERS)]
    return hd, ld


def _place(offsets: list[np.ndarray], centers: list[np.ndarray]) -> np.ndarray:
    return np.vstack([o + c for o, c in zip(offsets, centers)])


def _cluster_labels(n_per_cluster: int) -> np.ndarray:
    return np.repeat(np.arange(N_CLUSTERS), n_per_cluster)


def _ring(dim: int, distance: float, angles=None) -> list[np.ndarray]:
    angles = [60.0 * m for m in range(N_CLUSTERS)] if angles is None else angles
    return [planar_center(dim, distance, a) for a in angles]


def gen_discs_and_balls(
    n_per_cluster: int = 100, seed: int = 42, params: DiscBallParams | None = None
) -> tuple[LabeledDataset, LabeledDataset]:
    """Six 100-D hyperballs and six matching 2-D discs, 60 degrees apart."""
    params = params or DiscBallParams(n_per_cluster=n_per_cluster)
    if params.n_per_cluster < 2:
        raise ValueError("n_per_cluster must be >= 2")
    hd_off, ld_off = _offsets(params, seed)
    labels = _cluster_labels(params.n_per_cluster)
    hd = LabeledDataset(_place(hd_off, _ring(params.hd_dim, params.hd_distance)), labels)
    ld = LabeledDataset(_place(ld_off, _ring(2, params.ld_distance)), labels)
    return hd, ld


def schedule_b(variant: str, n_per_cluster: int = 100, seed: int = 42, n_steps: int = 25) -> ExperimentSchedule:
    """B1 closes the angle inside three adjacent disc pairs; B2 pulls all discs to the origin."""
    variant = variant.upper()
    params = DiscBallParams(n_per_cluster=n_per_cluster)
    hd, _ = gen_discs_and_balls(seed=seed, params=params)
    _, ld_off = _offsets(params, seed)
    labels = _cluster_labels(n_per_cluster)
    steps = []
    if variant == "B1":
        grid = np.linspace(60.0, 0.0, n_steps)
        for g in grid:
            angles = []
            for p in range(N_CLUSTERS // 2):
                mid = 120.0 * p + 30.0
                angles += [mid - g / 2.0, mid + g / 2.0]
            ld = LabeledDataset(_place(ld_off, _ring(2, params.ld_distance, angles)), labels)
            steps.append(Step(float(g), validate_pair(hd, ld)))
        name = "angle_deg"
    elif variant == "B2":
        grid = np.linspace(params.ld_distance, 0.0, n_steps)
        for r in grid:
            ld = LabeledDataset(_place(ld_off, _ring(2, r)), labels)
            steps.append(Step(float(r), validate_pair(hd, ld)))
        name = "center_distance"
    else:
        raise ValueError(f"variant must be B1 or B2, got {variant!r}")
    return ExperimentSchedule(variant, name, steps, seed, {"n_per_cluster": n_per_cluster})


def schedule_e(n_per_cluster: int = 100, seed: int = 42, n_steps: int = 25, start: float = 4.0) -> ExperimentSchedule:
    """Fixed separated discs; the hyperballs move from distance ``start`` to the origin."""
    params = DiscBallParams(n_per_cluster=n_per_cluster)
    _, ld = gen_discs_and_balls(seed=seed, params=params)
    hd_off, _ = _offsets(params, seed)
    labels = _cluster_labels(n_per_cluster)
    steps = []
    for r in np.linspace(start, 0.0, n_steps):
        hd = LabeledDataset(_place(hd_off, _ring(params.hd_dim, r)), labels)
        steps.append(Step(float(r), validate_pair(hd, ld)))
    return ExperimentSchedule("E", "center_distance", steps, seed, {"n_per_cluster": n_per_cluster})


# -- randomization (A, D) ---------------------------------------------------


def schedule_randomize(target: str, base: EvalPair, seed: int = 42, n_steps: int = 21) -> ExperimentSchedule:
    """Progressively randomize one side of ``base``.

    ``target="embedding"`` (A): each selected point is resampled uniformly in
    the embedding's bounding box. ``target="original"`` (D): the selected
    rows are shuffled among themselves, so the point cloud is unchanged but
    positions no longer match labels. Selection is nested across steps: a
    point selected at probability p stays selected at every larger p.
    """
    if target not in ("embedding", "original"):
        raise ValueError("target must be 'embedding' or 'original'")
    side = base.embedding if target == "embedding" else base.original
    pts = side.points
    rng = np.random.default_rng(seed)
    u = rng.random(base.n)
    replacement = rng.uniform(pts.min(axis=0), pts.max(axis=0), size=pts.shape)
    steps = []
    for s, p in enumerate(np.linspace(0.0, 1.0, n_steps)):
        selected = u < p
        if not selected.any():
            moved = side
        elif target == "embedding":
            moved = side.with_points(np.where(selected[:, None], replacement, pts))
        else:
            idx = np.flatnonzero(selected)
            perm = np.random.default_rng([seed, s]).permutation(idx)
            new = pts.copy()
            new[idx] = pts[perm]
            moved = side.with_points(new)
        pair = EvalPair(base.original, moved) if target == "embedding" else EvalPair(moved, base.embedding)
        steps.append(Step(float(p), pair, {"selected": int(selected.sum())}))
    exp_id = "A" if target == "embedding" else "D"
    return ExperimentSchedule(exp_id, "probability", steps, seed, {"target": target})


# -- PCA schedules (C, F) ---------------------------------------------------


def schedule_pca(variant: str, data: LabeledDataset, n_steps: int = 10, width: int = 20) -> ExperimentSchedule:
    """C: embeddings on the top m PCs, m = 10..1. F: data on PCs i..i+19, i = 1..10."""
    variant = variant.upper()
    if variant == "C":
        need = n_steps
    elif variant == "F":
        need = n_steps + width - 1
    else:
        raise ValueError(f"variant must be C or F, got {variant!r}")
    if data.dim < need or data.n - 1 < need:
        raise InsufficientDims(f"experiment {variant} needs {need} principal components; data has dim={data.dim}, N={data.n}")
    model = pca_fit(data.points, need)
    steps = []
    if variant == "C":
        for m in range(n_steps, 0, -1):
            z = data.with_points(pca_project(model, data.points, (1, m)))
            ratio = float(model.explained_ratio[:m].sum())
            steps.append(Step(float(m), validate_pair(data, z), {"explained_ratio": ratio}))
        name = "n_components"
    else:
        z = data.with_points(pca_project(model, data.points, (1, 2)))
        for i in range(1, n_steps + 1):
            x = data.with_points(pca_project(model, data.points, (i, i + width - 1)))
            ratio = float(model.explained_ratio[i - 1 : i + width - 1].sum())
            steps.append(Step(float(i), validate_pair(x, z), {"explained_ratio": ratio}))
        name = "first_component"
    return ExperimentSchedule(variant, name, steps, None, {"width": width})


def synthetic_gaussians(
    n_per_cluster: int = 100, dim: int = 200, k: int = 6, seed: int = 42, center_scale: float = 0.5
) -> LabeledDataset:
    """Fallback for experiments A, C, D, F: k unit-variance Gaussians in ``dim`` dimensions.

    Centers are drawn with per-coordinate standard deviation ``center_scale``.
    """
    rng = np.random.default_rng(seed)
    centers = rng.normal(scale=center_scale, size=(k, dim))
    pts = np.vstack([c + rng.normal(size=(n_per_cluster, dim)) for c in centers])
    return LabeledDataset(pts, np.repeat(np.arange(k), n_per_cluster))


def synthetic_base_pair(seed: int = 42, **kwargs) -> EvalPair:
    """Synthetic data with its top-2 PCA embedding, the base of experiments A and D."""
    data = synthetic_gaussians(seed=seed, **kwargs)
    z = pca_project(pca_fit(data.points, 2), data.points, (1, 2))
    return validate_pair(data, data.with_points(z))


def build_schedule(
    experiment: str, n_per_cluster: int = 100, seed: int = 42, data: LabeledDataset | None = None
) -> ExperimentSchedule:
    experiment = experiment.upper()
    if experiment in ("B1", "B2"):
        return schedule_b(experiment, n_per_cluster, seed)
    if experiment == "E":
        return schedule_e(n_per_cluster, seed)
    if experiment in ("A", "D"):
        if data is None:
            base = synthetic_base_pair(seed=seed, n_per_cluster=n_per_cluster)
        else:
            z = pca_project(pca_fit(data.points, 2), data.points, (1, 2))
            base = validate_pair(data, data.with_points(z))
        return schedule_randomize("embedding" if experiment == "A" else "original", base, seed)
    if experiment in ("C", "F"):
        data = data if data is not None else synthetic_gaussians(n_per_cluster=n_per_cluster, seed=seed)
        return schedule_pca(experiment, data)
    raise ValueError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")


# -- runner -----------------------------------------------------------------

DEFAULT_MEASURES = ("label_tnc[dsc]", "label_tnc[ch_btwn]", "trust_cont", "mrre", "kl", "baseline[dsc]")


def _cvm_of(measure: str) -> str:
    return measure[measure.index("[") + 1 : -1]


def measure_columns(measure: str) -> list[str]:
    if measure.startswith("label_tnc["):
        c = _cvm_of(measure)
        return [f"label_t[{c}]", f"label_c[{c}]"]
    if measure.startswith("baseline["):
        return [measure]
    return {
        "trust_cont": ["trustworthiness", "continuity"],
        "mrre": ["mrre_false", "mrre_missing"],
        "kl": ["kl_quality"],
    }[measure]


def normalize_measure(measure: str) -> str:
    if measure == "baseline":
        return "baseline[dsc]"
    if measure.startswith("ltnc["):
        return "label_tnc[" + measure[5:]
    try:
        measure_columns(measure)
    except (KeyError, ValueError):
        raise ValueError(f"unknown measure {measure!r}") from None
    return measure


@dataclass(frozen=True, eq=False)
class SensitivityCurve:
    experiment_id: str
    parameter_name: str
    columns: list[str]
    rows: list[tuple]
    metadata: dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        j = self.columns.index(name)
        return np.array([row[2 + j] for row in self.rows])

    @property
    def parameters(self) -> np.ndarray:
        return np.array([row[1] for row in self.rows])


def evaluate_step(
    pair: EvalPair,
    measures: list[str],
    mc_count: int = 200,
    seed: int = 42,
    neighbors: NeighborConfig = NeighborConfig(),
) -> list[float]:
    scores: list[float] = []
    ranks = None
    for m in measures:
        if m.startswith("label_tnc["):
            rep = label_tnc(pair, CvmConfig(_cvm_of(m), mc_count, seed))
            scores += [rep.label_t, rep.label_c]
        elif m.startswith("baseline["):
            scores.append(label_baseline(pair.embedding, CvmConfig(_cvm_of(m), mc_count, seed)).score)
        elif m in ("trust_cont", "mrre"):
            if ranks is None:
                ranks = (
                    rank_table(pairwise_distances(pair.original.points)),
                    rank_table(pairwise_distances(pair.embedding.points)),
                )
            res = (trust_cont if m == "trust_cont" else mrre)(pair, neighbors, ranks)
            scores += [res.first, res.second]
        elif m == "kl":
            scores.append(kl_density(pair, neighbors).second)
        else:
            raise ValueError(f"unknown measure {m!r}")
    return scores


def run_experiment(
    schedule: ExperimentSchedule,
    measures=DEFAULT_MEASURES,
    mc_count: int = 200,
    seed: int = 42,
    neighbors: NeighborConfig = NeighborConfig(),
    threads: int = 1,
) -> SensitivityCurve:
    """Evaluate every measure at every step of ``schedule``."""
    measures = [normalize_measure(m) for m in measures]
    columns = [c for m in measures for c in measure_columns(m)]

    def one(indexed):
        s, step = indexed
        try:
            return evaluate_step(step.pair, measures, mc_count, seed, neighbors)
        except LtncError as exc:
            raise type(exc)(f"step {s}: {exc}") from exc

    items = list(enumerate(schedule.steps))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, items))
    else:
        results = [one(it) for it in items]
    rows = [(s, step.parameter, *scores) for (s, step), scores in zip(items, results)]
    meta = {
        "experiment": schedule.experiment_id,
        "seed": schedule.seed,
        "mc_count": mc_count,
        "cvm_seed": seed,
        "k_list": list(neighbors.k_list),
        "sigma_list": list(neighbors.sigma_list),
        **schedule.params,
    }
    return SensitivityCurve(schedule.experiment_id, schedule.parameter_name, columns, rows, meta)
