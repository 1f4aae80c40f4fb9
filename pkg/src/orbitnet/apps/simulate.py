import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from typing import List, Tuple

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_RUNTIME_ERROR = 2

SCENARIO_NAMES = ["earth-observation", "lunar", "mars", "walker", "cubesat", "lunar-mars"]
DELIVERY_MODES = ["best-effort", "saf", "ltp"]


def _add_scenario_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('--scenario', type=str, required=True, help=f"Scenario name, one of: {', '.join(SCENARIO_NAMES)}")
    parser.add_argument('--delivery', type=str, default=None, choices=DELIVERY_MODES, help='[Optional] Delivery mode (defaults to saf)')
    parser.add_argument('--loss', type=float, default=None, help='[Optional] Per-link loss probability overriding the scenario default')
    parser.add_argument('--duration', type=float, default=None, help='[Optional] Simulated seconds overriding the scenario default')
    parser.add_argument('--seed', type=int, default=None, help='[Optional] Random seed (defaults to 0)')
    parser.add_argument('--min-time-delta', type=float, default=None, help='[Optional] Minimum simulated seconds between topology refreshes')
    parser.add_argument('--lookahead-resolution', type=float, default=None, help='[Optional] Seconds between lookahead topology samples')
    parser.add_argument('--lookahead-steps', type=int, default=None, help='[Optional] Number of lookahead topology samples')
    parser.add_argument('--tle-file', type=str, default=None, help='[Optional] TLE file for the cubesat scenario')
    parser.add_argument('--config', type=str, default=None, help='[Optional] JSON file of scenario overrides, flags take precedence')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='''
        Discrete-event simulator for satellite and interplanetary networks.
        "run" simulates a reference scenario and writes its event log and summary,
        "snapshot" exports node positions and active links at one instant,
        "summarize" computes the summary of existing event logs,
        "batch" runs scenario x delivery mode x loss combinations in parallel.
    ''')
    subparsers = parser.add_subparsers(dest='command', required=True)

    run = subparsers.add_parser('run', help='Run a scenario')
    _add_scenario_arguments(run)
    run.add_argument('--out', type=str, default=None, help='[Optional] Path to export the event log to (JSON lines, gzip if it ends with .gz)')
    run.add_argument('--summary-out', type=str, default=None, help='[Optional] Path to export the summary table to as csv')
    run.add_argument('--aggregate-only', action='store_true', default=False, help='[Optional] Keep aggregate statistics only, no event log')
    run.add_argument('--progress', action='store_true', default=False, help='[Optional] Show a progress bar over simulated time')

    snapshot = subparsers.add_parser('snapshot', help='Export the topology of a scenario at one instant')
    _add_scenario_arguments(snapshot)
    snapshot.add_argument('--time', type=float, default=0.0, help='[Optional] Simulation time of the snapshot (defaults to 0)')
    snapshot.add_argument('--out', type=str, required=True, help='Path to export the snapshot to as csv')

    summarize = subparsers.add_parser('summarize', help='Summarize existing event logs')
    summarize.add_argument('--logs', type=str, nargs='+', required=True, help='Event log files')
    summarize.add_argument('--summary-out', type=str, default=None, help='[Optional] Path to export the summary table to as csv')
    summarize.add_argument('--saturation', type=int, nargs=2, default=None, metavar=('SENDER', 'RECEIVER'), help='[Optional] Link direction to compute the saturation time series for')
    summarize.add_argument('--bin', type=float, default=60.0, help='[Optional] Saturation bin width in seconds (defaults to 60)')
    summarize.add_argument('--saturation-out', type=str, default=None, help='[Optional] Path to export the saturation time series to as csv')

    batch = subparsers.add_parser('batch', help='Run many scenario configurations in parallel')
    batch.add_argument('--scenarios', type=str, nargs='+', required=True, help='Scenario names')
    batch.add_argument('--modes', type=str, nargs='+', default=DELIVERY_MODES, choices=DELIVERY_MODES, help='[Optional] Delivery modes (defaults to all)')
    batch.add_argument('--losses', type=float, nargs='+', default=None, help='[Optional] Loss probabilities (defaults to each scenario default)')
    batch.add_argument('--duration', type=float, default=None, help='[Optional] Simulated seconds overriding the scenario default')
    batch.add_argument('--seed', type=int, default=0, help='[Optional] Random seed (defaults to 0)')
    batch.add_argument('--workers', type=int, default=None, help='[Optional] Number of worker processes (defaults to the CPU count)')
    batch.add_argument('--summary-out', type=str, default=None, help='[Optional] Path to export the summary table to as csv')
    return parser


def load_scenario(args: argparse.Namespace):
    """
    Build the scenario named on the command line and apply the config file and flag overrides, in that order.
    """
    from orbitnet.scenarios import create_scenario, apply_config

    kwargs = {}
    if args.tle_file is not None:
        if args.scenario != "cubesat":
            raise ValueError(f"--tle-file only applies to the cubesat scenario, not {args.scenario}")
        kwargs["tle_path"] = args.tle_file
    spec = create_scenario(args.scenario, **kwargs)

    if args.config is not None:
        with open(args.config, "r") as f:
            spec = apply_config(spec, json.load(f))
    flags = {
        "delivery_mode": args.delivery,
        "loss": args.loss,
        "duration_s": args.duration,
        "seed": args.seed,
        "min_time_delta": args.min_time_delta,
        "lookahead_resolution": args.lookahead_resolution,
        "lookahead_steps": args.lookahead_steps,
    }
    return apply_config(spec, {key: value for key, value in flags.items() if value is not None})


def _print_scenario_arguments(args: argparse.Namespace):
    print(f"Scenario: \n\t\t\t{args.scenario}")
    print(f"Delivery Mode: \n\t\t\t{args.delivery}")
    print(f"Loss: \n\t\t\t{args.loss}")
    print(f"Duration: \n\t\t\t{args.duration}")
    print(f"Seed: \n\t\t\t{args.seed}")
    print(f"Config File: \n\t\t\t{args.config}")


def run_command(args: argparse.Namespace) -> int:
    from orbitnet.metrics import summary_table
    from orbitnet.scenarios import build_simulation

    if args.aggregate_only and args.out:
        raise ValueError("--out needs the event log, it cannot be combined with --aggregate-only")
    spec = load_scenario(args)
    simulation = build_simulation(spec, aggregate_only=args.aggregate_only)

    try:
        summary = simulation.run(spec.duration_s, progress=args.progress)
    except Exception as err:
        print(f"Simulation failed at t={simulation.time}: {err}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR

    if args.out:
        simulation.event_log.export(args.out)
    table = summary_table([(spec.name, spec.delivery_mode.value, summary.stats)])
    print(table.to_string(index=False))
    if args.summary_out:
        table.to_csv(args.summary_out, index=False)
    print("Simulation finished!")
    return EXIT_OK


def snapshot_command(args: argparse.Namespace) -> int:
    from orbitnet.scenarios import topology_snapshot

    spec = load_scenario(args)
    frame = topology_snapshot(spec, args.time)
    frame.to_csv(args.out, index=False)
    print(f"Wrote {int((frame['record'] == 'node').sum())} nodes and {int((frame['record'] == 'link').sum())} "
          f"links at t={args.time} to {args.out}")
    print("Snapshot finished!")
    return EXIT_OK


def summarize_command(args: argparse.Namespace) -> int:
    import pandas as pd
    from orbitnet.event_log import EventLog
    from orbitnet.metrics import summarize, summary_table, saturation_timeseries

    rows = []
    for path in args.logs:
        log = EventLog.create_from_file(path)
        rows.append((path, "-", summarize(log)))
        if args.saturation is not None:
            series = saturation_timeseries(log, tuple(args.saturation), args.bin)
            frame = pd.DataFrame(series, columns=["Bin Start (s)", "Utilization (%)"])
            if args.saturation_out:
                frame.to_csv(args.saturation_out, index=False)
            else:
                print(frame.to_string(index=False))
    table = summary_table(rows)
    print(table.to_string(index=False))
    if args.summary_out:
        table.to_csv(args.summary_out, index=False)
    print("Summary finished!")
    return EXIT_OK


def run_batch_item(name: str, mode: str, loss: float, duration: float, seed: int) -> Tuple[str, str, object]:
    """Run one configuration with aggregate statistics only, in a worker process."""
    from orbitnet.scenarios import create_scenario, apply_config, build_simulation

    overrides = {"delivery_mode": mode, "seed": seed}
    if loss is not None:
        overrides["loss"] = loss
    if duration is not None:
        overrides["duration_s"] = duration
    spec = apply_config(create_scenario(name), overrides)
    simulation = build_simulation(spec, aggregate_only=True)
    summary = simulation.run(spec.duration_s)
    label = name if loss is None else f"{name} (loss {loss})"
    return label, mode, summary.stats


def batch_command(args: argparse.Namespace) -> int:
    from orbitnet.errors import UnknownScenarioError
    from orbitnet.metrics import summary_table
    from orbitnet.scenarios import SCENARIOS

    for name in args.scenarios:
        if name not in SCENARIOS:
            raise UnknownScenarioError(name, SCENARIOS)
    configurations = list(product(args.scenarios, args.modes, args.losses or [None]))
    with ProcessPoolExecutor(max_workers=args.workers) as executor:
        futures = [executor.submit(run_batch_item, name, mode, loss, args.duration, args.seed)
                   for name, mode, loss in configurations]
        try:
            rows: List[Tuple[str, str, object]] = [future.result() for future in futures]
        except Exception as err:
            print(f"Batch run failed: {err}", file=sys.stderr)
            return EXIT_RUNTIME_ERROR
    table = summary_table(rows)
    print(table.to_string(index=False))
    if args.summary_out:
        table.to_csv(args.summary_out, index=False)
    print("Batch finished!")
    return EXIT_OK


COMMANDS = {
    "run": run_command,
    "snapshot": snapshot_command,
    "summarize": summarize_command,
    "batch": batch_command,
}


def main(argv: List[str] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    print("\nCommand-line Arguments:")
    print(f"Command: \n\t\t\t{args.command}")
    if args.command in ("run", "snapshot"):
        _print_scenario_arguments(args)
    if args.command == "run":
        print(f"Log Path: \n\t\t\t{args.out}")
        print(f"Summary Path: \n\t\t\t{args.summary_out}")
        print(f"Aggregate Only: \n\t\t\t{args.aggregate_only}\n")
    elif args.command == "snapshot":
        print(f"Time: \n\t\t\t{args.time}")
        print(f"Snapshot Path: \n\t\t\t{args.out}\n")
    elif args.command == "summarize":
        print(f"Logs: \n\t\t\t{args.logs}\n")
    else:
        print(f"Scenarios: \n\t\t\t{args.scenarios}")
        print(f"Delivery Modes: \n\t\t\t{args.modes}")
        print(f"Losses: \n\t\t\t{args.losses}\n")

    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError) as err:
        print(f"Configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except RuntimeError as err:
        print(f"Runtime error: {err}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
