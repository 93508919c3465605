"""
Experiment service

Runs single scenario points and buffer-size sweeps, serially or across worker
processes, and turns results into tables.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Tuple

import pandas as pd

from core.errors import ConfigError, SimulationError, SweepPointError
from core.topology import build, buffer_for_fraction
from models.run_result import CSV_COLUMNS, RunResult
from models.scenario import ScenarioConfig, SweepSpec
from services.metrics import build_run_result

logger = logging.getLogger(__name__)


class SweepOutcome:
    """Results of a sweep, in point-then-seed order, and the error that stopped it"""

    def __init__(self, results: List[RunResult], total_points: int, error: Optional[SimulationError] = None):
        self.results = results
        self.total_points = total_points
        self.error = error

    @property
    def aborted(self) -> bool:
        return self.error is not None


def run_point(cfg: ScenarioConfig, record_trace: bool = False) -> RunResult:
    """
    Build, simulate and measure one scenario

    Args:
        cfg: Validated scenario
        record_trace: Hash the event trace into the result

    Returns:
        RunResult of the run
    """
    logger.info(f"Running {cfg!r}")
    net = build(cfg, record_trace=record_trace)
    processed = net.run()
    result = build_run_result(net, processed)
    logger.info(f"Finished {result!r} after {processed} events")
    return result


def expand_sweep(spec: SweepSpec) -> List[ScenarioConfig]:
    """
    Every scenario of a sweep

    Args:
        spec: Sweep description

    Returns:
        Configs ordered by N, then buffer value, then seed

    Raises:
        ConfigError: If a buffer fraction rounds to zero cells
    """
    configs = []
    for n_sources in spec.n_sources:
        for value in spec.values:
            if spec.axis == SweepSpec.AXIS_FRACTION:
                cells = buffer_for_fraction(spec.base, value)
                if cells < 1:
                    raise ConfigError(f"fraction {value} gives {cells} cells", field='sweep.values')
                fraction = value
            else:
                cells, fraction = int(value), None
            for seed in spec.seeds:
                configs.append(spec.base.copy_with(
                    n_sources=n_sources, buffer_cells=cells, buffer_rtt_fraction=fraction, seed=seed
                ))
    return configs


def _run_point_task(cfg_data: Dict[str, Any]) -> Dict[str, Any]:
    """Worker-process entry point; plain dictionaries cross the process boundary"""
    return run_point(ScenarioConfig.from_dict(cfg_data)).to_dict()


def _point_error(index: int, cfg: ScenarioConfig, exc: Exception) -> SimulationError:
    """The error that stops a sweep; anything not a SimulationError becomes a SweepPointError"""
    if isinstance(exc, SimulationError):
        return exc
    logger.debug(f"Point {index + 1} ({cfg!r}) raised", exc_info=exc)
    wrapped = SweepPointError(f"point {index + 1} ({cfg!r}) failed: {type(exc).__name__}: {exc}")
    wrapped.__cause__ = exc
    return wrapped


def run_sweep(
    spec: SweepSpec,
    jobs: int = 1,
    on_result: Optional[Callable[[int, RunResult], None]] = None
) -> Tuple[bool, str, SweepOutcome]:
    """
    Run every point of a sweep

    Points may finish in any order across workers; results are always
    returned in expand_sweep order. The first failing point stops the sweep.

    Args:
        spec: Sweep description
        jobs: Worker processes (1 runs in this process)
        on_result: Called with (index, result) for each completed point, in order

    Returns:
        Tuple of (success, message, outcome)
    """
    configs = expand_sweep(spec)
    total = len(configs)
    results: List[Optional[RunResult]] = [None] * total
    error: Optional[SimulationError] = None
    logger.info(f"Sweep of {total} runs over {spec.point_count} points ({spec!r}) with {jobs} job(s)")

    if jobs <= 1:
        for index, cfg in enumerate(configs):
            try:
                results[index] = run_point(cfg)
            except Exception as e:
                error = _point_error(index, cfg, e)
                break
            if on_result:
                on_result(index, results[index])
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = [executor.submit(_run_point_task, cfg.to_dict()) for cfg in configs]
            for index, future in enumerate(futures):
                try:
                    results[index] = RunResult.from_dict(future.result())
                except Exception as e:
                    error = _point_error(index, configs[index], e)
                    for pending in futures[index + 1:]:
                        pending.cancel()
                    break
                if on_result:
                    on_result(index, results[index])

    done = [r for r in results if r is not None]
    outcome = SweepOutcome(done, total, error)
    if error is not None:
        logger.error(f"Sweep aborted after {len(done)} of {total} runs: {error}")
        return False, f"sweep aborted after {len(done)} of {total} runs: {error}", outcome
    return True, f"{total} runs completed", outcome


def results_frame(results: List[RunResult]) -> pd.DataFrame:
    """One row per result in the fixed CSV column order"""
    frame = pd.DataFrame([r.to_row() for r in results], columns=CSV_COLUMNS)
    # None (no traffic) becomes NaN so the column stays float
    frame['fairness'] = pd.to_numeric(frame['fairness'])
    return frame


def summarize(results: List[RunResult]) -> pd.DataFrame:
    """
    Per-point statistics over repetitions

    Args:
        results: Sweep results

    Returns:
        DataFrame keyed by (scenario, n_sources, buffer_cells) with mean,
        min and max efficiency, mean fairness and the repetition count
    """
    frame = results_frame(results)
    if frame.empty:
        return pd.DataFrame(columns=['scenario', 'n_sources', 'buffer_cells', 'runs', 'efficiency_mean',
                                     'efficiency_min', 'efficiency_max', 'fairness_mean'])
    grouped = frame.groupby(['scenario', 'n_sources', 'buffer_cells'], sort=False)
    summary = grouped.agg(
        runs=('seed', 'count'),
        efficiency_mean=('efficiency', 'mean'),
        efficiency_min=('efficiency', 'min'),
        efficiency_max=('efficiency', 'max'),
        fairness_mean=('fairness', 'mean'),
    )
    return summary.reset_index()
