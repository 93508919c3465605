#!/usr/bin/env python3
"""
satsim - TCP over a satellite ATM-UBR bottleneck

Subcommands:
  run             simulate one scenario point, one CSV row
  sweep           simulate a buffer-size grid, CSV rows plus a summary
  mac-table       media access comparison table (and slotted ALOHA curve)
  contract-check  GCRA conformance of an arrival-trace file

Exit status: 0 success, 2 configuration error, 3 runtime/accounting error.
"""
import argparse
import logging
import sys
from typing import List, Optional

import numpy as np

from core.errors import ConfigError, SimulationError
from core.settings import Settings
from services.contract_service import check_arrivals
from services.experiment_service import results_frame, run_point, run_sweep, summarize
from services.mac_models import aloha_curve_frame, peak_throughput, protocol_table_frame
from storage.result_writer import ResultWriter, frame_to_csv
from utils.trace_reader import read_arrival_trace
from utils.validation import validate_config_readable, validate_output_writable, validate_run_flags

logger = logging.getLogger('satsim')

EXIT_OK = 0


def configure_logging(level: str, log_file: Optional[str] = None):
    """Root logger to stderr (stdout carries CSV), optionally also to a file"""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        handlers=handlers,
        force=True
    )


def build_parser() -> argparse.ArgumentParser:
    # Global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default=argparse.SUPPRESS, help='YAML scenario file')
    common.add_argument('--out', default=argparse.SUPPRESS, help='output CSV (default: standard output)')
    common.add_argument('--seed', type=int, default=argparse.SUPPRESS, help='start-jitter seed')
    common.add_argument('--scale', type=float, default=argparse.SUPPRESS, help='bandwidth scaling factor')
    common.add_argument('--policy', choices=['selective_drop', 'tail_drop'], default=argparse.SUPPRESS,
                        help='switch drop policy')
    common.add_argument('--jobs', type=int, default=argparse.SUPPRESS, help='parallel sweep workers')
    common.add_argument('--police', action='store_true', default=argparse.SUPPRESS,
                        help='drop cells that violate the traffic contract')
    common.add_argument('--warmup', type=float, default=argparse.SUPPRESS,
                        help='seconds excluded from goodput')
    common.add_argument('--log-level', default=argparse.SUPPRESS,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='logging level (default INFO)')
    common.add_argument('--log-file', default=argparse.SUPPRESS, help='also log to this file')

    parser = argparse.ArgumentParser(
        prog='satsim',
        description='Simulate TCP over a satellite ATM-UBR bottleneck',
        parents=[common]
    )
    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('run', parents=[common], help='simulate one scenario point')
    sub.add_parser('sweep', parents=[common], help='simulate a buffer-size sweep')

    mac = sub.add_parser('mac-table', parents=[common], help='print the media access comparison')
    mac.add_argument('--curve', action='store_true', help='also print the slotted ALOHA curve')
    mac.add_argument('--g-max', type=float, default=5.0, help='largest offered load on the curve')
    mac.add_argument('--g-step', type=float, default=0.1, help='offered load step on the curve')

    contract = sub.add_parser('contract-check', parents=[common], help='check an arrival trace')
    contract.add_argument('trace', help='file with one arrival time (seconds) per line')
    return parser


def load_settings(args: argparse.Namespace) -> Settings:
    """Settings from --config with the global flag overrides applied"""
    settings = Settings(getattr(args, 'config', None))
    settings.set('run.seed', getattr(args, 'seed', None))
    settings.set('scenario.scale', getattr(args, 'scale', None))
    settings.set('switch.policy', getattr(args, 'policy', None))
    settings.set('run.jobs', getattr(args, 'jobs', None))
    settings.set('run.warmup', getattr(args, 'warmup', None))
    if getattr(args, 'police', False):
        settings.set('run.police', True)
    return settings


def cmd_run(settings: Settings, writer: ResultWriter) -> int:
    cfg = settings.scenario_config()
    result = run_point(cfg, record_trace=logger.isEnabledFor(logging.DEBUG))
    if result.trace_digest:
        logger.debug(f"Trace digest {result.trace_digest}")
    return EXIT_OK if writer.write(results_frame([result])) else SimulationError.EXIT_CODE


def cmd_sweep(settings: Settings, writer: ResultWriter) -> int:
    spec = settings.sweep_spec()
    jobs = int(settings.get('run', 'jobs', 1))
    success, message, outcome = run_sweep(
        spec, jobs=jobs,
        on_result=lambda index, r: logger.debug(f"Point {index + 1} done: {r!r}")
    )
    frame = results_frame(outcome.results)
    written = writer.write(frame, summarize(outcome.results), None if success else message)
    if not success:
        return outcome.error.EXIT_CODE
    return EXIT_OK if written else SimulationError.EXIT_CODE


def cmd_mac_table(args: argparse.Namespace, writer: ResultWriter) -> int:
    text = frame_to_csv(protocol_table_frame())
    if args.curve:
        if args.g_step <= 0 or args.g_max < 0:
            raise ConfigError("--g-step must be > 0 and --g-max >= 0", field='mac-table')
        grid = np.round(np.arange(0.0, args.g_max + args.g_step / 2, args.g_step), 10)
        g_peak, s_peak = peak_throughput()
        text += '\n' + frame_to_csv(aloha_curve_frame(grid))
        text += f"# peak throughput {s_peak:.6f} at G={g_peak:.6f}\n"
    return EXIT_OK if writer.write_text(text) else SimulationError.EXIT_CODE


def cmd_contract_check(args: argparse.Namespace, settings: Settings, writer: ResultWriter) -> int:
    arrivals = read_arrival_trace(args.trace)
    frame, summary = check_arrivals(settings.contract(), arrivals)
    logger.info(
        f"Contract check of {args.trace}: {summary['non_conforming']} of {summary['cells']} cells "
        f"non-conforming, burst tolerance {summary['burst_tolerance_s']:.6f} s"
    )
    return EXIT_OK if writer.write(frame) else SimulationError.EXIT_CODE


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(getattr(args, 'log_level', 'INFO'), getattr(args, 'log_file', None))

    checks = [
        validate_config_readable(getattr(args, 'config', None)),
        validate_output_writable(getattr(args, 'out', None)),
        validate_run_flags(getattr(args, 'jobs', None), getattr(args, 'scale', None),
                           getattr(args, 'warmup', None), getattr(args, 'policy', None)),
    ]
    problems = [message for ok, message in checks if not ok]
    if problems:
        logger.error("; ".join(problems))
        return ConfigError.EXIT_CODE

    writer = ResultWriter(getattr(args, 'out', None))
    try:
        if args.command == 'mac-table':
            return cmd_mac_table(args, writer)
        settings = load_settings(args)
        if args.command == 'run':
            return cmd_run(settings, writer)
        if args.command == 'sweep':
            return cmd_sweep(settings, writer)
        return cmd_contract_check(args, settings, writer)
    except SimulationError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.EXIT_CODE


if __name__ == '__main__':
    sys.exit(main())
