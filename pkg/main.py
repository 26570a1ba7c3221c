# main.py
"""
Main entry point for the Re-ISDA benchmark.
CLI for bundle generation, method comparison, block-size sweeps and the
exhaustive oracle.

Exit codes: 0 success, 1 a method run or file write failed, 2 usage or
config error.
"""

import argparse
import logging
import os
import sys

from core.config import config
from core.errors import ConfigError, InvalidInputError, OutputError
from core.utils import parse_int_list, setup_logging

logger = logging.getLogger("main")


def _float_list(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _int_list(text: str) -> list:
    try:
        return parse_int_list(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reisda",
        description="Re-ISDA benchmark - domain adaptation for regression",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py gen friedman -o data/friedman
  python main.py gen friedman --shift 0 -o data/friedman0
  python main.py gen motion --subjects 6 -o data/motion
  python main.py run configs/friedman.json
  python main.py sweep configs/friedman.json --etas 2,3,5
  python main.py oracle data/tiny --grid 0,1,2,3 --eta 1
        """,
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING (default from REISDA_LOG_LEVEL)")
    subparsers = parser.add_subparsers(dest="command", help="Command")

    # gen
    gp = subparsers.add_parser("gen", help="Write a synthetic benchmark bundle")
    gen_sub = gp.add_subparsers(dest="generator", help="Benchmark family")

    fp = gen_sub.add_parser("friedman", help="Halton-sampled Friedman function with shifted targets")
    fp.add_argument("--n-source", type=int, default=80)
    fp.add_argument("--n-target", type=int, default=41)
    fp.add_argument("--low", type=float, default=0.2, help="Domain lower bound")
    fp.add_argument("--high", type=float, default=1.2, help="Domain upper bound")
    fp.add_argument("--shift", type=float, default=0.2, help="Per-dimension target shift")
    fp.add_argument("--dims", type=int, default=5)
    fp.add_argument("-o", "--output", required=True, help="Bundle directory")

    mp = gen_sub.add_parser("motion", help="Multi-subject flexion time series")
    mp.add_argument("--subjects", type=int, default=6)
    mp.add_argument("--frames", type=int, default=60, help="Frames per subject")
    mp.add_argument("--noise", type=float, default=0.01)
    mp.add_argument("--seed", type=int, default=0)
    mp.add_argument("--target-subject", type=int, default=-1, help="Subject used as target (default last)")
    mp.add_argument("-o", "--output", required=True, help="Bundle directory")

    # run
    rp = subparsers.add_parser("run", help="Compare the configured methods over seeds")
    rp.add_argument("config", help="Experiment config (JSON)")
    rp.add_argument("-o", "--output", default=None, help="Output directory (overrides the config)")
    rp.add_argument("-w", "--workers", type=int, default=None, help="Parallel runs")

    # sweep
    sp = subparsers.add_parser("sweep", help="Re-ISDA block-size sweep")
    sp.add_argument("config", help="Experiment config (JSON)")
    sp.add_argument("--etas", type=_int_list, required=True, help="Comma-separated block sizes, e.g. 2,3,5")
    sp.add_argument("--seeds", type=_int_list, default=None, help="Override the config seeds")
    sp.add_argument("-o", "--output", default=None, help="Output directory (overrides the config)")
    sp.add_argument("-w", "--workers", type=int, default=None, help="Parallel runs")

    # oracle
    op = subparsers.add_parser("oracle", help="Exhaustive optimum vs greedy labelings on a tiny bundle")
    op.add_argument("bundle", help="Bundle directory")
    op.add_argument("--eta", type=int, default=1)
    op.add_argument("--grid", type=_float_list, default=None, help="Candidate labels, e.g. 0,1,2,3")
    op.add_argument("--grid-points", type=int, default=4, help="Evenly spaced grid over the source labels")
    op.add_argument("--alpha", type=float, default=1e-3, help="Ridge penalty")
    op.add_argument("-o", "--output", default=None, help="Output directory (default: the bundle)")
    return parser


def cmd_gen(args) -> int:
    from datagen.friedman import FriedmanBenchmarkSpec, make_friedman_benchmark
    from datagen.motion import MotionSpec, make_motion_dataset
    from pipeline.bundle import bundle_from_motion, bundle_from_scored, write_bundle

    if args.generator == "friedman":
        spec = FriedmanBenchmarkSpec(
            n_source=args.n_source, n_target=args.n_target, domain_low=args.low,
            domain_high=args.high, shift=args.shift, dims=args.dims,
        )
        meta = {"generator": "friedman", "n_source": spec.n_source, "n_target": spec.n_target,
                "domain_low": spec.domain_low, "domain_high": spec.domain_high,
                "shift": spec.shift, "dims": spec.dims}
        bundle = bundle_from_scored(make_friedman_benchmark(spec, reorder=False), meta)
    else:
        spec = MotionSpec(n_subjects=args.subjects, frames=args.frames, noise=args.noise, seed=args.seed)
        meta = {"generator": "motion", "n_subjects": spec.n_subjects, "frames": spec.frames,
                "noise": spec.noise, "seed": spec.seed}
        bundle = bundle_from_motion(make_motion_dataset(spec), args.target_subject, meta)
    paths = write_bundle(bundle, args.output)
    print(f"  Bundle: {args.output} ({', '.join(sorted(paths))})")
    return 0


def cmd_run(args) -> int:
    from domain.models import load_experiment_config
    from pipeline.experiment_pipeline import ExperimentPipeline

    cfg = load_experiment_config(args.config)
    pipeline = ExperimentPipeline(cfg, config_dir=os.path.dirname(os.path.abspath(args.config)),
                                  output_dir=args.output)
    report = pipeline.run(max_workers=args.workers)
    return 1 if report.any_failed else 0


def cmd_sweep(args) -> int:
    from domain.models import load_experiment_config
    from pipeline.experiment_pipeline import ExperimentPipeline

    cfg = load_experiment_config(args.config)
    pipeline = ExperimentPipeline(cfg, config_dir=os.path.dirname(os.path.abspath(args.config)),
                                  output_dir=args.output)
    sweep = pipeline.sweep(args.etas, seeds=args.seeds, max_workers=args.workers)
    return 1 if sweep.any_failed else 0


def cmd_oracle(args) -> int:
    from pipeline.oracle_pipeline import run_oracle

    result = run_oracle(
        args.bundle, args.output or args.bundle, eta=args.eta,
        grid=args.grid, grid_points=args.grid_points, alpha=args.alpha,
    )
    print(f"  Oracle minimum: {result['min_total_loss']:.6f} over {result['evaluated']} labelings")
    for name, g in sorted(result["greedy"].items()):
        print(f"  {name}: total {g['total_loss']:.6f} (gap {g['gap']:.6f})")
    return 0


COMMANDS = {"gen": cmd_gen, "run": cmd_run, "sweep": cmd_sweep, "oracle": cmd_oracle}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level or config.log.level)

    if not args.command or (args.command == "gen" and not args.generator):
        parser.print_help(sys.stderr)
        return 2

    try:
        return COMMANDS[args.command](args)
    except (ConfigError, InvalidInputError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    except OutputError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
