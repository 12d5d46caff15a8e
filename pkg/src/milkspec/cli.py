"""Command-line driver for the batch analysis pipeline.

Every subcommand reads the JSON config, narrows the analysis selection
(``run`` keeps the config's own list), applies flag overrides, and executes
the pipeline. Exit codes: 0 success, 2 config error, 3 data error,
4 degenerate analysis input.
"""

from __future__ import annotations

import argparse
import json
import sys

from milkspec import __version__
from milkspec.errors import ConfigError, ConvergenceError, DataFormatError, DegenerateDataError
from milkspec.pipeline import PipelineConfig, run_pipeline

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_DEGENERATE = 4

# subcommand -> analysis selection forced onto the config ("run" keeps the
# config's own list, "report" is the descriptive group-summary path)
_SUBCOMMAND_ANALYSES = {
    "ingest": ["ingest"],
    "features": ["features"],
    "correlate": ["correlate"],
    "pca": ["pca"],
    "mnf-cluster": ["mnf_cluster"],
    "regress": ["regress"],
    "classify": ["classify"],
    "cluster-validate": ["cluster_validate"],
    "report": ["group_summary"],
    "run": None,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="milkspec",
        description="Milk quality analysis from visible and hyperspectral imaging",
    )
    parser.add_argument("--version", action="version", version=f"milkspec {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMAND_ANALYSES:
        sub = subparsers.add_parser(name, help=f"run the {name} stage")
        sub.add_argument("--config", required=True, help="pipeline config JSON")
        sub.add_argument("--seed", type=int, default=None, help="override the config seed")
        sub.add_argument("--out", default=None, help="override the output directory")
    return parser


def _load_config(args) -> PipelineConfig:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {args.config}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")

    selection = _SUBCOMMAND_ANALYSES[args.command]
    if selection is not None:
        raw["analyses"] = selection
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.out is not None:
        raw["out_dir"] = args.out
    return PipelineConfig.from_dict(raw)


def _exit_code(bundle) -> int:
    worst = EXIT_OK
    for diagnostic in bundle.diagnostics:
        cls = diagnostic.get("error_class", "")
        if cls == "ConfigError":
            worst = max(worst, EXIT_CONFIG)
        elif cls == "DataFormatError":
            worst = max(worst, EXIT_DATA)
        elif cls in ("DegenerateDataError", "ConvergenceError"):
            worst = max(worst, EXIT_DEGENERATE)
        elif diagnostic.get("kind") == "failure":
            worst = max(worst, EXIT_DATA)
    return worst


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args)
        bundle = run_pipeline(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DegenerateDataError, ConvergenceError) as exc:
        print(f"degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE

    for diagnostic in bundle.diagnostics:
        print(f"[{diagnostic['stage']}] {diagnostic['kind']}: {diagnostic['error']}", file=sys.stderr)
    for name in sorted(bundle.artifacts):
        print(name)
    return _exit_code(bundle)


if __name__ == "__main__":
    sys.exit(main())
