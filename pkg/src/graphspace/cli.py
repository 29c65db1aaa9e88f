"""Command-line interface.

    graphspace run <experiment> --seed S --out DIR [options]
    graphspace dataset-build --seed S --out DIR [options]
    graphspace enumerate --n N [--stats out.csv] [options]
    graphspace gen <kind> --n N [kind flags] --seed S --out FILE

Exit codes: 0 ok, 2 configuration error, 3 sampling failure, 4 numeric
failure. A JSON config file passed via --config overrides flags.
"""

from __future__ import annotations

import argparse
import json
import sys

from .enumeration import connected_count, scan_labeled_space
from .errors import ConvergenceError, SamplingError
from .experiments import (EXPERIMENTS, ExperimentConfig, dataset_build,
                          run_experiment)
from .properties import PROPERTY_NAMES

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SAMPLING = 3
EXIT_NUMERIC = 4


def parse_int_list(text: str, step: int = 1):
    """'5..15' (inclusive range), '5,10,20' or a single integer."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1, step))
    if "," in text:
        return [int(x) for x in text.split(",") if x]
    return [int(text)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphspace",
        description="graph-property experiments over labeled-graph spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, required=True,
                       help="master RNG seed (mandatory)")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"),
                       default="csv")
        p.add_argument("--force", action="store_true",
                       help="overwrite existing output files")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--config", help="JSON file whose keys override flags")

    run = sub.add_parser("run", help="run an experiment")
    run.add_argument("experiment", choices=EXPERIMENTS)
    common(run)
    run.add_argument("--n", help="vertex counts: 'A..B', 'a,b,c' or single")
    run.add_argument("--step", type=int, default=1,
                     help="step for '--n A..B' ranges")
    run.add_argument("--samples", type=int)
    run.add_argument("--p", default="0.5",
                     help="ER probability; a float or 'log' for log(n)/n")
    run.add_argument("--sizes", help="stability sample sizes, comma list")
    run.add_argument("--repeats", type=int)
    run.add_argument("--runs", type=int)
    run.add_argument("--decimals", type=int, default=2)
    run.add_argument("--band", default="0.47,0.52")
    run.add_argument("--count", type=int, default=1000,
                     help="graphs per generator class")
    run.add_argument("--dataset", help="pre-built dataset CSV")
    run.add_argument("--subset-size", dest="subset_size", type=int, default=2)
    run.add_argument("--trees", type=int, default=100)
    run.add_argument("--threshold", type=float, default=0.20)
    run.add_argument("--contains", choices=PROPERTY_NAMES,
                     help="restrict sweep to subsets containing this property")
    run.add_argument("--random-extra", dest="random_extra", type=int,
                     default=0,
                     help="add this many random other subsets to the sweep")
    run.add_argument("--dims", type=int, default=2)
    run.add_argument("--hard-cap", dest="hard_cap", type=int, default=100_000)
    run.add_argument("--no-exact", dest="exact", action="store_false",
                     help="skip exact matrices in the correlations experiment")

    build = sub.add_parser("dataset-build", help="build a labeled dataset")
    common(build)
    build.add_argument("--specs", help="JSON file: list of "
                       "{label, count, spec:{kind,n,params}}")
    build.add_argument("--n", type=int, default=100)
    build.add_argument("--count", type=int, default=1000)
    build.add_argument("--band", default="0.47,0.52")
    build.add_argument("--name", default="dataset.csv")

    enum = sub.add_parser("enumerate", help="exact labeled-graph statistics")
    common(enum)
    enum.add_argument("--n", type=int, required=True)
    enum.add_argument("--stats", help="write per-property stats CSV here")

    gen = sub.add_parser("gen", help="generate one graph as an edge-list file")
    gen.add_argument("kind", choices=("er", "sbm", "nws", "geometric", "ba"))
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--stream", type=int, default=0)
    gen.add_argument("--out", required=True, help="edge-list output file")
    gen.add_argument("--force", action="store_true")
    gen.add_argument("--p", type=float, help="er: edge probability")
    gen.add_argument("--blocks", type=int, help="sbm: block count")
    gen.add_argument("--probs", help="sbm: JSON probability matrix")
    gen.add_argument("--k", type=int, help="nws: even ring degree")
    gen.add_argument("--p-s", dest="p_s", type=float,
                     help="nws: shortcut probability")
    gen.add_argument("--radius", type=float, help="geometric: threshold")
    gen.add_argument("--m", type=int, help="ba: attachment count")

    return parser


def _apply_config_file(args: argparse.Namespace) -> None:
    # per the experiment contract, config-file values override flags
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="ascii") as fh:
            overrides = json.load(fh)
        for key, value in overrides.items():
            setattr(args, key.replace("-", "_"), value)


def _run(args: argparse.Namespace) -> int:
    params = {}
    if args.n:
        params["ns"] = parse_int_list(str(args.n), step=args.step)
        if len(params["ns"]) == 1:
            params["n"] = params["ns"][0]
    if args.samples is not None:
        params["samples"] = args.samples
    params["p"] = args.p
    if args.sizes:
        params["sizes"] = parse_int_list(args.sizes)
    if args.repeats is not None:
        params["repeats"] = args.repeats
    if args.runs is not None:
        params["runs"] = args.runs
    params["decimals"] = args.decimals
    params["band"] = [float(x) for x in str(args.band).split(",")]
    params["count"] = args.count
    if args.dataset:
        params["dataset"] = args.dataset
    params["subset_size"] = args.subset_size
    params["trees"] = args.trees
    params["threshold"] = args.threshold
    if args.contains:
        params["contains"] = args.contains
    params["random_extra"] = args.random_extra
    params["dims"] = args.dims
    params["hard_cap"] = args.hard_cap
    params["exact"] = args.exact

    cfg = ExperimentConfig(experiment=args.experiment, seed=args.seed,
                           out=args.out, fmt=args.fmt, force=args.force,
                           threads=args.threads, params=params)
    written = run_experiment(cfg)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _dataset_build(args: argparse.Namespace) -> int:
    params = {
        "band": [float(x) for x in str(args.band).split(",")],
        "n": args.n,
        "count": args.count,
        "name": args.name,
    }
    if args.specs:
        with open(args.specs, "r", encoding="ascii") as fh:
            params["specs"] = json.load(fh)
    cfg = ExperimentConfig(experiment="dataset-build", seed=args.seed,
                           out=args.out, fmt=args.fmt, force=args.force,
                           threads=args.threads, params=params)
    for path in dataset_build(cfg):
        print(f"wrote {path}")
    return EXIT_OK


def _enumerate(args: argparse.Namespace) -> int:
    n = args.n
    count = connected_count(n)
    total = 1 << (n * (n - 1) // 2)
    print(f"n={n}: {count} connected of {total} labeled graphs "
          f"({count / total:.4%})")
    if args.stats:
        cfg = ExperimentConfig(experiment="enumerate", seed=args.seed,
                               out=args.out, fmt=args.fmt, force=args.force,
                               threads=args.threads,
                               params={"n": n, "stats": args.stats})
        scan = scan_labeled_space(n, workers=args.threads)
        rows = []
        for summary in scan.property_stats():
            rows.append([summary.name, summary.count, summary.mean,
                         summary.variance, summary.minimum, summary.maximum]
                        + [q for _, q in summary.quantiles])
        header = ["property", "count", "mean", "variance", "min", "max",
                  "q05", "q25", "q50", "q75", "q95"]
        from .experiments import write_csv
        path = write_csv(cfg, args.stats, header, rows)
        print(f"wrote {path}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args)
        if args.command == "run":
            return _run(args)
        if args.command == "dataset-build":
            return _dataset_build(args)
        return _enumerate(args)
    except SamplingError as exc:
        print(f"sampling failure: {exc}", file=sys.stderr)
        return EXIT_SAMPLING
    except ConvergenceError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, FileExistsError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
