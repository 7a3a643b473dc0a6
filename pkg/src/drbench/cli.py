"""Command-line entry points.

    drbench run --config run.cfg [--datasets seeds,ionosphere] [--dr tsne,mds]
                [--classifiers knn,enn,svm] [--repeats R] [--seed S]
                [--out DIR] [--format csv|markdown|all]
    drbench validate-data --config run.cfg

Exit codes: 0 success, 1 config error, 2 data error, 3 numerical failure.
"""

import argparse
import sys
from pathlib import Path

from .config import ConfigError, parse_config
from .datasets import DatasetError, load_dataset, read_manifest
from .harness import emit_report, run_pipeline
from .numerics import ConvergenceError
from .tsne import CalibrationError, DivergenceError

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


def build_parser():
    parser = argparse.ArgumentParser(prog="drbench")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--manifest", help="dataset manifest (INI)")
        p.add_argument("--datasets", help="comma-separated dataset names")

    run = sub.add_parser("run", help="run the benchmark matrix")
    add_common(run)
    run.add_argument("--dr", help="comma-separated DR methods (tsne,mds)")
    run.add_argument("--classifiers", help="comma-separated classifiers (knn,enn,svm)")
    run.add_argument("--repeats", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--k", type=int, help="neighbor count for KNN/ENN")
    run.add_argument("--svm-c", dest="svm_c", type=float)
    run.add_argument("--perplexity", type=float)
    run.add_argument("--iterations", type=int)
    run.add_argument("--learning-rate", dest="learning_rate", type=float)
    run.add_argument("--test-fraction", dest="test_fraction", type=float)
    run.add_argument("--out", help="output directory")
    run.add_argument("--format", choices=("csv", "markdown", "all"))

    val = sub.add_parser("validate-data", help="ingestion dry-run")
    add_common(val)
    return parser


def load_config(args):
    text = ""
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        text = path.read_text()
    overrides = {
        k: v
        for k, v in vars(args).items()
        if k not in ("command", "config") and v is not None
    }
    return parse_config(text, overrides)


def cmd_run(args):
    config = load_config(args)
    report = run_pipeline(config)
    for name, msg in report.skipped:
        print(f"skipped {name}: {msg}", file=sys.stderr)
    if not report.rows:
        print("error: every dataset was skipped", file=sys.stderr)
        return EXIT_DATA
    for path in emit_report(report, config.out, config.format):
        print(f"wrote {path}")
    return EXIT_OK


def cmd_validate_data(args):
    config = load_config(args)
    entries = read_manifest(config.manifest)
    if config.datasets:
        entries = [e for e in entries if e.name in config.datasets]
    failures = 0
    for entry in entries:
        try:
            ds = load_dataset(entry)
        except DatasetError as exc:
            print(f"{entry.name}: ERROR {exc}")
            failures += 1
            continue
        sizes = ",".join(str(s) for s in ds.class_sizes())
        print(
            f"{ds.name}: n={ds.features.shape[0]} m={ds.features.shape[1]} "
            f"classes={ds.n_classes} ({sizes}) dropped_rows={ds.dropped_row_count}"
        )
    return EXIT_DATA if failures else EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        return cmd_validate_data(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DatasetError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConvergenceError, CalibrationError, DivergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
