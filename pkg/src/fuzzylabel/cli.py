"""Command-line entry point: ``fuzzylabel <command> [options]``.

Exit codes: 0 success, 2 invalid plan or arguments, 3 data error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path


from .dataset import DataError, LabelMode, load_arff, load_csv, load_fuzzy_csv, save_csv, save_fuzzy_csv, standardize
from .fcm import FcmConfig
from .flgen import FLGenLP, PropagationConfig, flgen_lp
from .graph import GraphConfig
from .harness import (ARMS, SMOOTH_GRID, ClassifierSettings, ExperimentPlan, PlanError, emit_report,
                      format_summary, load_report, run_comparison, run_three_arm)
from .synthdata import SynthConfig, gen_multi_label, gen_single_label

EXIT_PLAN = 2
EXIT_DATA = 3


def _sigma(text):
    if text == "median":
        return "median"
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected 'median' or a positive number") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("kernel sigma must be positive")
    return value


def _graph_knn(text):
    if text == "full":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer or 'full'") from None


def _add_generation(p):
    g = p.add_argument_group("fuzzy label generation")
    g.add_argument("--alpha", type=float, default=0.5, help="propagation weight on neighbors (0 < alpha < 1)")
    g.add_argument("--tol", type=float, default=1e-6, help="max-norm change that stops propagation")
    g.add_argument("--max-iter", type=int, default=1000)
    g.add_argument("--no-clip", action="store_true", help="do not clamp generated labels into [0, 1]")
    g.add_argument("--fcm-k", type=int, default=None, help="cluster count (default: number of labels)")
    g.add_argument("--fcm-m", type=float, default=2.0, help="fuzzifier, > 1")
    g.add_argument("--fcm-tol", type=float, default=1e-5)
    g.add_argument("--fcm-seed", type=int, default=0,
                   help="FCM seed for gen-labels; experiments derive one per fold from --seed")
    g.add_argument("--kernel-sigma", type=_sigma, default="median")
    g.add_argument("--graph-knn", type=_graph_knn, default=None, help="keep k nearest neighbors per row, or 'full'")
    g.add_argument("--no-symmetrize", action="store_true")
    g.add_argument("--normalization", choices=("symmetric", "row"), default="symmetric")


def _add_data(p, required=True):
    p.add_argument("--data", required=required, help="dataset CSV with sidecar .json descriptor")
    p.add_argument("--label-cols", type=int, default=None, help="label column count (overrides descriptor)")
    p.add_argument("--mode", choices=("single", "multi"), default=None)
    p.add_argument("--fuzzy", default=None, help="CSV of true fuzzy labels aligned with --data")


def _add_experiment(p):
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output directory for the report")
    p.add_argument("--jobs", type=int, default=1, help="folds evaluated concurrently")
    p.add_argument("--no-standardize", action="store_true")
    p.add_argument("--k", type=int, nargs="+", default=None, help="K grid")


def _add_single(p):
    p.add_argument("--epsilon", type=float, default=1e-10, help="distance offset in 1/(d + eps) weights")
    p.add_argument("--baseline", choices=("majority", "soft"), default="majority")


def _add_multi(p):
    p.add_argument("--smooth", type=float, nargs="+", default=None, help="smoothing grid")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--as-printed", action="store_true", help="swapped indicator and unnormalized posterior")
    p.add_argument("--classic-mlknn", action="store_true", help="leave-one-out histogram likelihoods")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fuzzylabel", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic dataset with true fuzzy labels")
    p.add_argument("--mode", choices=("single", "multi"), default="single")
    p.add_argument("--n-total", type=int, default=None)
    p.add_argument("--k-clusters", type=int, default=3)
    p.add_argument("--dims", type=int, default=None)
    p.add_argument("--phi", type=float, default=SynthConfig.phi)
    p.add_argument("--rho", type=float, default=SynthConfig.rho)
    p.add_argument("--noise-sigma", type=float, default=SynthConfig.noise_sigma)
    p.add_argument("--alpha-offset", type=float, default=SynthConfig.alpha_offset)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default=None)
    p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("gen-labels", help="generate fuzzy labels for a dataset")
    p.add_argument("--in", dest="data", required=True, help="dataset CSV")
    p.add_argument("--out", required=True, help="fuzzy label CSV to write")
    p.add_argument("--label-cols", type=int, default=None)
    p.add_argument("--mode", choices=("single", "multi"), default=None)
    p.add_argument("--no-standardize", action="store_true")
    _add_generation(p)

    for name, mode in (("run-single", "single"), ("run-multi", "multi")):
        p = sub.add_parser(name, help=f"three-arm {mode}-label experiment (synthetic data unless --data)")
        _add_data(p, required=False)
        p.add_argument("--arms", nargs="+", choices=ARMS, default=None)
        _add_experiment(p)
        _add_generation(p)
        if mode == "single":
            _add_single(p)
        else:
            _add_multi(p)
        p.set_defaults(run_mode=mode)

    p = sub.add_parser("compare", help="baseline vs fuzzy-label classifier over the parameter grid")
    _add_data(p)
    _add_experiment(p)
    _add_generation(p)
    _add_single(p)
    _add_multi(p)

    p = sub.add_parser("report", help="print a saved report and optionally rewrite its files")
    p.add_argument("--in", dest="report", required=True, help="report directory or report.json")
    p.add_argument("--out", default=None, help="rewrite JSON/CSV files into this directory")
    p.add_argument("--format", choices=("json", "csv", "both"), default="both")

    p = sub.add_parser("convert-arff", help="convert a MULAN ARFF file to CSV plus descriptor")
    p.add_argument("--in", dest="data", required=True)
    p.add_argument("--labels", type=int, required=True, help="number of trailing label attributes")
    p.add_argument("--out", required=True, help="CSV path to write")
    return ap


def _generator(args) -> FLGenLP:
    try:
        return FLGenLP(
            FcmConfig(k=args.fcm_k, fuzzifier=args.fcm_m, tol=args.fcm_tol, seed=args.fcm_seed),
            GraphConfig(kernel_sigma=args.kernel_sigma, knn=args.graph_knn, symmetrize=not args.no_symmetrize,
                        normalization=args.normalization),
            PropagationConfig(alpha=args.alpha, tol=args.tol, max_iter=args.max_iter, clip=not args.no_clip),
        )
    except ValueError as exc:
        raise PlanError(str(exc)) from None


def _load(args, mode=None):
    path = Path(args.data)
    mode = args.mode or mode
    if path.suffix.lower() == ".arff":
        raise DataError(f"{path}: convert ARFF files with 'fuzzylabel convert-arff' first")
    ds = load_csv(path, args.label_cols, mode)
    fuzzy = getattr(args, "fuzzy", None)
    if fuzzy is None and path.with_suffix(".fuzzy.csv").exists():
        fuzzy = path.with_suffix(".fuzzy.csv")
    if fuzzy is not None:
        ds = ds.with_fuzzy(load_fuzzy_csv(fuzzy))
    if mode is not None and ds.mode is not LabelMode.parse(mode):
        raise PlanError(f"{path} is a {ds.mode.value}-label dataset, expected {mode}")
    return ds


def _classifier(args) -> ClassifierSettings:
    return ClassifierSettings(
        epsilon=getattr(args, "epsilon", 1e-10),
        threshold=getattr(args, "threshold", 0.5),
        as_printed=getattr(args, "as_printed", False),
        conditioning="classic" if getattr(args, "classic_mlknn", False) else "fuzzy",
        baseline=getattr(args, "baseline", "majority"),
    )


def _finish(report, out):
    print(format_summary(report))
    if out:
        for path in emit_report(report, out):
            print(f"wrote {path}")


def cmd_synth(args):
    single = args.mode == "single"
    factory = SynthConfig.single_label if single else SynthConfig.multi_label
    kw = {"k_clusters": args.k_clusters, "phi": args.phi, "rho": args.rho, "noise_sigma": args.noise_sigma,
          "alpha_offset": args.alpha_offset, "seed": args.seed}
    if args.n_total is not None:
        kw["n_total"] = args.n_total
    if args.dims is not None:
        kw["dims"] = args.dims
    try:
        config = factory(**kw)
        ds = gen_single_label(config) if single else gen_multi_label(config)
    except ValueError as exc:
        raise PlanError(str(exc)) from None
    name = args.name or f"synthetic-{args.mode}-{args.seed}"
    out = Path(args.out)
    csv_path = save_csv(ds, out / f"{name}.csv")
    fuzzy_path = save_fuzzy_csv(ds.fuzzy, out / f"{name}.fuzzy.csv", ds.label_names)
    print(f"wrote {csv_path}, {csv_path.with_suffix('.json')}, {fuzzy_path}")


def cmd_gen_labels(args):
    ds = _load(args)
    gen = _generator(args)
    X = ds.features if args.no_standardize else standardize(ds.features)[0]
    res = flgen_lp(X, ds.logical, gen.fcm_config, gen.graph_config, gen.prop_config)
    path = save_fuzzy_csv(res.fuzzy, args.out, ds.label_names)
    state = "converged" if res.converged else "did not converge"
    print(f"wrote {path} ({ds.n_samples} rows, {ds.n_labels} labels; {state} after {res.iterations} iterations)")


def cmd_run(args):
    mode = args.run_mode
    if args.data:
        ds = _load(args, mode)
    else:
        config = (SynthConfig.single_label if mode == "single" else SynthConfig.multi_label)(seed=args.seed)
        ds = gen_single_label(config) if mode == "single" else gen_multi_label(config)
    arms = tuple(args.arms) if args.arms else tuple(a for a in ARMS if a != "true_fuzzy" or ds.fuzzy is not None)
    plan = ExperimentPlan(
        dataset=ds, arms=arms, k_grid=tuple(args.k) if args.k else None,
        smooth_grid=tuple(args.smooth) if getattr(args, "smooth", None) else (0.05,),
        fold_count=args.folds, seed=args.seed, generator=_generator(args),
        standardize=not args.no_standardize, classifier=_classifier(args), jobs=args.jobs,
    )
    _finish(run_three_arm(plan), args.out)


def cmd_compare(args):
    ds = _load(args)
    grids = {}
    if args.k:
        grids["k"] = args.k
    grids["smoothing"] = args.smooth or SMOOTH_GRID
    report = run_comparison(ds, grids=grids, folds=args.folds, seed=args.seed, generator=_generator(args),
                            classifier=_classifier(args), standardize=not args.no_standardize, jobs=args.jobs)
    _finish(report, args.out)


def cmd_report(args):
    report = load_report(args.report)
    print(format_summary(report))
    if args.out:
        formats = ("json", "csv") if args.format == "both" else (args.format,)
        for path in emit_report(report, args.out, formats):
            print(f"wrote {path}")


def cmd_convert_arff(args):
    ds = load_arff(args.data, args.labels)
    path = save_csv(ds, args.out)
    print(f"wrote {path} and {path.with_suffix('.json')} ({ds.n_samples} rows, {ds.n_labels} labels)")


COMMANDS = {"synth": cmd_synth, "gen-labels": cmd_gen_labels, "run-single": cmd_run, "run-multi": cmd_run,
            "compare": cmd_compare, "report": cmd_report, "convert-arff": cmd_convert_arff}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except PlanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PLAN
    except (DataError, OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
