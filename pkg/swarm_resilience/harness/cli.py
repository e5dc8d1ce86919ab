# swarm_resilience/harness/cli.py

"""
Command-line front end.

Subcommands:
    run           Simulate a single trial and write its artifacts.
    sweep         Run a Monte Carlo sweep and write aggregate CSVs.
    backup-layer  Build a graph and its backup layer, write the layer CSV.
    validate      Check a configuration and optionally a graph file.

Exit codes: 0 success, 1 configuration error, 2 runtime failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from swarm_resilience.abmc.paths import build_backup_layer, write_backup_layer_csv
from swarm_resilience.app_config import get_app_config
from swarm_resilience.errors import ConfigError, SwarmResilienceError
from swarm_resilience.graph.serialization import read_graph, write_graph
from swarm_resilience.graph.validation import validate_hhc
from swarm_resilience.harness.reports import emit_reports, emit_trial_reports
from swarm_resilience.harness.sweep import parse_config, run_sweep
from swarm_resilience.models.scenario_config import ScenarioConfig, SweepSpec
from swarm_resilience.sim.trial import build_scenario_graphs, run_trial
from swarm_resilience.utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarm-resilience",
        description="Backup-path consensus, fault detection and swarm simulation experiments.",
    )
    parser.add_argument("--log-level", help="Override the configured log level (DEBUG, INFO, ...).")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, seed_help: str) -> None:
        p.add_argument("--config", required=True, help="Scenario or sweep YAML file.")
        p.add_argument("--seed", type=int, help=seed_help)
        p.add_argument("--out", help="Output directory (defaults to $SWARM_RESILIENCE_OUT or the settings).")

    run = sub.add_parser("run", help="Simulate a single trial.")
    common(run, "Override the scenario seed.")
    run.add_argument("--mitigation", choices=["on", "off"], help="Override mitigation_enabled.")

    sweep = sub.add_parser("sweep", help="Run a Monte Carlo sweep.")
    common(sweep, "Override the sweep seed base.")
    sweep.add_argument("--parallel", type=int, help="Worker processes.")
    sweep.add_argument("--mitigation", choices=["on", "off"], help="Override mitigation_enabled of the base scenario.")
    sweep.add_argument("--no-progress", action="store_true", help="Hide the progress bar.")

    layer = sub.add_parser("backup-layer", help="Build the backup layer of a scenario graph.")
    common(layer, "Override the scenario seed.")
    layer.add_argument("--graph", help="Read the graph from a file instead of generating it.")
    layer.add_argument("--graph-out", help="Also write the graph in text form to this path.")

    validate = sub.add_parser("validate", help="Validate a configuration and optionally a graph file.")
    validate.add_argument("--config", required=True, help="Scenario or sweep YAML file.")
    validate.add_argument("--graph", help="Graph file to check against the HHC rules.")
    return parser


def _output_dir(args: argparse.Namespace) -> Path:
    if args.out:
        return Path(args.out)
    return get_app_config().output_dir()


def _scenario(args: argparse.Namespace) -> ScenarioConfig:
    cfg = parse_config(args.config)
    if not isinstance(cfg, ScenarioConfig):
        raise ConfigError(f"{args.config}: expected a scenario, found a sweep")
    update = {}
    if args.seed is not None:
        update["seed"] = args.seed
    if getattr(args, "mitigation", None):
        update["mitigation_enabled"] = args.mitigation == "on"
    return ScenarioConfig.from_dict({**cfg.to_dict(), **update}) if update else cfg


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _scenario(args)
    metrics = run_trial(cfg)
    files = emit_trial_reports(metrics, _output_dir(args), layer=metrics.backup_layer)
    print(
        f"accuracy={metrics.accuracy:.4f} fpr={metrics.false_positive_rate:.4f} "
        f"final_fraction={metrics.final_fraction:.4f} runtime={metrics.runtime_s:.2f}s"
    )
    for path in files:
        print(path)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = parse_config(args.config)
    if not isinstance(spec, SweepSpec):
        raise ConfigError(f"{args.config}: expected a sweep with 'axes', found a scenario")
    data = spec.to_dict()
    if args.seed is not None:
        data["seed_base"] = args.seed
    if args.mitigation:
        data.setdefault("base", {})["mitigation_enabled"] = args.mitigation == "on"
    spec = SweepSpec.from_dict(data)

    settings = get_app_config()
    parallelism = args.parallel if args.parallel is not None else settings.get_int("Sweep", "parallelism", 1)
    progress = settings.get_bool("Sweep", "progress_bar", True) and not args.no_progress
    agg = run_sweep(spec, parallelism=parallelism, progress=progress)
    for path in emit_reports(agg, _output_dir(args)):
        print(path)
    return EXIT_OK if agg.failed_trials == 0 else EXIT_RUNTIME


def cmd_backup_layer(args: argparse.Namespace) -> int:
    cfg = _scenario(args)
    if args.graph:
        g = read_graph(args.graph)
    else:
        _, g = build_scenario_graphs(cfg)
    layer = build_backup_layer(g, cfg.abmc)
    outdir = _output_dir(args)
    outdir.mkdir(parents=True, exist_ok=True)
    print(write_backup_layer_csv(layer, outdir / "backup_layer.csv"))
    if args.graph_out:
        print(write_graph(g, args.graph_out))
    print(
        f"covered={len(layer.paths)} unreachable={list(layer.unreachable)} "
        f"passes={layer.passes} converged={layer.converged}"
    )
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = parse_config(args.config)
    print(f"{args.config}: valid {type(cfg).__name__}")
    if args.graph:
        report = validate_hhc(read_graph(args.graph))
        print(report)
        if not report.valid:
            return EXIT_CONFIG
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "backup-layer": cmd_backup_layer,
    "validate": cmd_validate,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(get_app_config(), level=args.log_level)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (SwarmResilienceError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as e:
        logger.exception(f"{args.command} failed unexpectedly")
        print(f"Error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
