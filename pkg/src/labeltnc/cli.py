"""Command-line interface: eval, bench, generate, cluster-labels, axioms.

Exit codes: 0 success, 2 input error, 3 precondition violation,
4 axiom failure under ``axioms --strict``.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from labeltnc import __version__
from labeltnc.core import CvmConfig, InputError, LabeledDataset, LtncError, validate_pair
from labeltnc.cvm import check_axioms
from labeltnc.decomp import cut_levels, ward_dendrogram
from labeltnc.io import (
    ReportDocument,
    dumps,
    plain,
    read_labels,
    read_matrix_csv,
    write_curve,
    write_labels,
    write_matrix_csv,
    write_report,
)
from labeltnc.ltnc import label_tnc
from labeltnc.metricspace import pairwise_distances, rank_table
from labeltnc.rankmeasures import NeighborConfig, kl_density, label_baseline, mrre, trust_cont
from labeltnc.synthbench import EXPERIMENTS, build_schedule, normalize_measure, run_experiment

THREADS_ENV = "LABELTNC_THREADS"
EVAL_MEASURES = ("ltnc", "trust_cont", "mrre", "kl", "baseline")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _bench_measures(text: str) -> list[str]:
    try:
        return [normalize_measure(m.strip()) for m in text.split(",") if m.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _eval_measures(text: str) -> list[str]:
    names = [m.strip() for m in text.split(",") if m.strip()]
    unknown = sorted(set(names) - set(EVAL_MEASURES))
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown measure(s) {', '.join(unknown)}; choose from {','.join(EVAL_MEASURES)}")
    return names


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _load_dataset(points_path, labels_path, header: bool) -> LabeledDataset:
    points = read_matrix_csv(points_path, header)
    labels = read_labels(labels_path)
    if len(labels) != len(points):
        raise InputError(f"{labels_path}: {len(labels)} labels for {len(points)} rows in {points_path}")
    return LabeledDataset(points, labels)


# -- eval -------------------------------------------------------------------


def _flat(m):
    return [float(v) for v in m.reshape(-1)]


def evaluate_report(pair, args, inputs: dict) -> tuple[ReportDocument, list[str]]:
    cvms = args.cvm or ["dsc", "ch_btwn"]
    measures = args.measures or list(EVAL_MEASURES)
    neighbors = NeighborConfig(tuple(args.k_list), tuple(args.sigma_list))
    timing: dict[str, float] = {}
    summary: list[str] = []
    ltnc_block = {}
    competitors: dict = {}

    def timed(name, fn):
        t0 = time.perf_counter()
        out = fn()
        timing[name] = time.perf_counter() - t0
        return out

    if "ltnc" in measures:
        for cvm in cvms:
            cfg = CvmConfig(cvm, args.mc_count, args.seed)
            rep = timed(f"label_tnc[{cvm}]", lambda: label_tnc(pair, cfg, args.hi, args.lo, args.threads))
            ltnc_block[cvm] = {
                "label_t": rep.label_t,
                "label_c": rep.label_c,
                "quadrant": rep.quadrant,
                "guideline": rep.interpretation.guideline,
                "unlikely": rep.interpretation.unlikely,
                "k": pair.k,
                "clm_matrix_x": _flat(rep.m_x.values),
                "clm_matrix_z": _flat(rep.m_z.values),
                "m_fg": _flat(rep.m_fg),
                "m_mg": _flat(rep.m_mg),
            }
            summary.append(
                f"label_tnc[{cvm}]  label_t={rep.label_t:.3f}  label_c={rep.label_c:.3f}  "
                f"quadrant={rep.quadrant} ({rep.interpretation.guideline})"
            )
    ranks = None
    if "trust_cont" in measures or "mrre" in measures:
        neighbors.check(pair.n)
        ranks = timed("ranks", lambda: (
            rank_table(pairwise_distances(pair.original.points)),
            rank_table(pairwise_distances(pair.embedding.points)),
        ))
    if "trust_cont" in measures:
        tc = timed("trust_cont", lambda: trust_cont(pair, neighbors, ranks))
        competitors["trustworthiness"], competitors["continuity"] = tc.first, tc.second
        summary.append(f"trust_cont  trustworthiness={tc.first:.3f}  continuity={tc.second:.3f}")
    if "mrre" in measures:
        mr = timed("mrre", lambda: mrre(pair, neighbors, ranks))
        competitors["mrre_false"], competitors["mrre_missing"] = mr.first, mr.second
        summary.append(f"mrre  mrre_false={mr.first:.3f}  mrre_missing={mr.second:.3f}")
    if "kl" in measures:
        kl = timed("kl", lambda: kl_density(pair, neighbors))
        competitors["kl"], competitors["kl_quality"] = kl.first, kl.second
        summary.append(f"kl  kl={kl.first:.6g}  quality={kl.second:.3f}")
    if "baseline" in measures:
        base = {}
        for cvm in cvms:
            cfg = CvmConfig(cvm, args.mc_count, args.seed)
            base[cvm] = timed(f"baseline[{cvm}]", lambda: label_baseline(pair.embedding, cfg).score)
            summary.append(f"baseline[{cvm}]  score={base[cvm]:.3f}")
        competitors["baseline"] = base

    metadata = {
        "tool": "labeltnc",
        "tool_version": __version__,
        "inputs": inputs,
        "n": pair.n,
        "k": pair.k,
        "dim_original": pair.original.dim,
        "dim_embedding": pair.embedding.dim,
        "seed": args.seed,
        "mc_count": args.mc_count,
        "k_list": list(args.k_list),
        "sigma_list": list(args.sigma_list),
        "thresholds": {"hi": args.hi, "lo": args.lo},
    }
    doc = ReportDocument(metadata, ltnc_block, competitors, timing if args.timing else None)
    return doc, summary


def cmd_eval(args) -> int:
    x = _load_dataset(args.data, args.labels, args.header)
    z = LabeledDataset(read_matrix_csv(args.embedding, args.header), x.labels)
    pair = validate_pair(x, z)
    inputs = {"data": str(args.data), "embedding": str(args.embedding), "labels": str(args.labels)}
    doc, summary = evaluate_report(pair, args, inputs)
    if args.out:
        write_report(doc, args.out)
    for line in summary:
        print(line)
    return 0


# -- bench / generate ---------------------------------------------------------


def _bench_data(args, experiment: str):
    """User data for A, C, D, F, or None to use the synthetic fallback."""
    if args.data is None:
        if experiment in ("C", "F") and not args.synthetic_fallback:
            raise LtncError(f"experiment {experiment.lower()} needs --data/--labels or --synthetic-fallback")
        return None
    if args.labels is None:
        raise LtncError("--data requires --labels")
    return _load_dataset(args.data, args.labels, args.header)


def cmd_bench(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for exp in args.experiment:
        exp = exp.upper()
        schedule = build_schedule(exp, args.n_per_cluster, args.seed, _bench_data(args, exp))
        curve = run_experiment(
            schedule,
            args.measures or ["label_tnc[dsc]", "label_tnc[ch_btwn]"],
            mc_count=args.mc_count,
            seed=args.seed,
            neighbors=NeighborConfig(tuple(args.k_list), tuple(args.sigma_list)),
            threads=args.threads,
        )
        write_curve(curve, out / exp.lower())
        print(f"{exp}: {len(curve.rows)} steps -> {out / exp.lower()}.csv, .json")
    return 0


def cmd_generate(args) -> int:
    out = Path(args.out)
    for exp in args.experiment:
        exp = exp.upper()
        schedule = build_schedule(exp, args.n_per_cluster, args.seed, _bench_data(args, exp))
        d = out / exp.lower()
        d.mkdir(parents=True, exist_ok=True)
        write_labels(d / "labels.txt", schedule.steps[0].pair.original.labels)
        manifest = {"experiment": exp, "parameter_name": schedule.parameter_name, "seed": schedule.seed, "steps": []}
        for s, step in enumerate(schedule.steps):
            write_matrix_csv(d / f"step_{s:02d}_original.csv", step.pair.original.points)
            write_matrix_csv(d / f"step_{s:02d}_embedding.csv", step.pair.embedding.points)
            manifest["steps"].append({"step_index": s, "parameter": step.parameter, **step.meta})
        (d / "schedule.json").write_text(dumps(plain(manifest)))
        print(f"{exp}: {len(schedule.steps)} steps -> {d}")
    return 0


# -- cluster-labels / axioms --------------------------------------------------


def cmd_cluster_labels(args) -> int:
    points = read_matrix_csv(args.data, args.header)
    if args.linkage != "ward":
        raise LtncError(f"unsupported linkage {args.linkage!r}")
    cuts = cut_levels(ward_dendrogram(points), args.levels, args.anchor)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for cut in cuts:
        status = "usable" if cut.usable else "unusable (k<2)"
        if cut.usable:
            write_labels(out / f"level_{cut.level:02d}.txt", cut.labels)
        print(f"level {cut.level:2d}  threshold={cut.threshold:.6g}  k={cut.k}  {status}")
    return 0


def cmd_axioms(args) -> int:
    failed = False
    reports = []
    for cvm in args.cvm or ["dsc", "ch_btwn", "silhouette"]:
        rep = check_axioms(CvmConfig(cvm, args.mc_count, args.seed), args.trials, args.seed)
        reports.append(rep.to_dict())
        print(f"[{cvm}]")
        for line in rep.lines():
            print("  " + line)
        failed |= not rep.all_passed
    if args.out:
        Path(args.out).write_text(dumps({"reports": reports}))
    return 4 if failed and args.strict else 0


# -- parser -------------------------------------------------------------------


def _common_measure_flags(p, mc_default=200):
    p.add_argument("--mc-count", type=int, default=mc_default, help="Monte-Carlo permutations for ch_btwn")
    p.add_argument("--seed", type=int, default=42, help="random seed")
    p.add_argument("--k-list", type=_int_list, default=(5, 10, 15, 20, 25), help="neighbor counts for T&C and MRRE")
    p.add_argument("--sigma-list", type=_float_list, default=(0.01, 0.1, 1.0), help="kernel widths for KL")
    p.add_argument("--threads", type=int, default=_default_threads(),
                   help=f"worker threads (env {THREADS_ENV}); never changes output")
    p.add_argument("--header", action="store_true", help="CSV inputs have a header row")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="labeltnc", description=__doc__.splitlines()[0], formatter_class=fmt)
    parser.add_argument("--version", action="version", version=f"labeltnc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate an embedding", formatter_class=fmt)
    p.add_argument("--data", required=True, help="original data CSV (N x D)")
    p.add_argument("--embedding", required=True, help="embedding CSV (N x d)")
    p.add_argument("--labels", required=True, help="label file, one integer per line")
    p.add_argument("--cvm", action="append", choices=["dsc", "ch_btwn", "silhouette"],
                   help="CVM for Label-T&C and the baseline; repeatable (default: dsc and ch_btwn)")
    p.add_argument("--measures", type=_eval_measures, default=None,
                   help=f"comma-separated subset of {','.join(EVAL_MEASURES)} (default: all)")
    p.add_argument("--hi", type=float, default=0.9, help="high-score threshold for the quadrant")
    p.add_argument("--lo", type=float, default=0.7, help="severity threshold for the quadrant")
    p.add_argument("--out", default=None, help="report JSON path")
    p.add_argument("--timing", action="store_true", help="record wall times in the report (makes it run-dependent)")
    _common_measure_flags(p)
    p.set_defaults(func=cmd_eval)

    for name, func, helptext in (("bench", cmd_bench, "run sensitivity experiments"),
                                 ("generate", cmd_generate, "write experiment datasets")):
        p = sub.add_parser(name, help=helptext, formatter_class=fmt)
        p.add_argument("--experiment", action="append", required=True, type=str.lower,
                       choices=[e.lower() for e in EXPERIMENTS], help="experiment id; repeatable")
        p.add_argument("--n-per-cluster", type=int, default=100, help="points per cluster for synthetic data")
        p.add_argument("--data", default=None, help="data CSV for experiments a, c, d, f")
        p.add_argument("--labels", default=None, help="labels for --data")
        p.add_argument("--synthetic-fallback", action="store_true",
                       help="use the built-in 6-Gaussian 200-D data for c/f")
        p.add_argument("--out", required=True, help="output directory")
        if name == "bench":
            p.add_argument("--measures", type=_bench_measures, default=None,
                           help="comma-separated measures, e.g. label_tnc[dsc],trust_cont,mrre,kl,baseline[dsc] "
                                "(default: label_tnc[dsc],label_tnc[ch_btwn])")
        _common_measure_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("cluster-labels", help="multi-level Ward labels", formatter_class=fmt)
    p.add_argument("--data", required=True, help="data CSV")
    p.add_argument("--levels", type=int, default=20, help="number of threshold levels")
    p.add_argument("--linkage", default="ward", choices=["ward"], help="linkage criterion")
    p.add_argument("--anchor", default="min", choices=["min", "zero"], help="lowest threshold anchor")
    p.add_argument("--header", action="store_true", help="CSV input has a header row")
    p.add_argument("--out", required=True, help="output directory for level_XX.txt files")
    p.set_defaults(func=cmd_cluster_labels)

    p = sub.add_parser("axioms", help="check CVM invariance axioms", formatter_class=fmt)
    p.add_argument("--cvm", action="append", choices=["dsc", "ch_btwn", "silhouette"],
                   help="CVM to check; repeatable (default: all three)")
    p.add_argument("--trials", type=int, default=100, help="random trials")
    p.add_argument("--mc-count", type=int, default=1000, help="Monte-Carlo permutations for ch_btwn")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--strict", action="store_true", help="exit 4 if any axiom fails")
    p.add_argument("--out", default=None, help="optional JSON path for the reports")
    p.set_defaults(func=cmd_axioms)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LtncError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
