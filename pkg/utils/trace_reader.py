"""
Arrival-trace reader - one decimal timestamp (seconds) per line
"""
import logging
from pathlib import Path
from typing import List

from core.errors import ConfigError, SchedulingError

logger = logging.getLogger(__name__)


def parse_arrival_trace(lines) -> List[float]:
    """
    Parse arrival times

    Blank lines and lines starting with '#' are skipped.

    Args:
        lines: Iterable of text lines

    Returns:
        Arrival times in seconds, non-decreasing

    Raises:
        ConfigError: On a line that is not a non-negative decimal number
        SchedulingError: If an arrival precedes the one before it
    """
    arrivals: List[float] = []
    for number, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith('#'):
            continue
        try:
            value = float(text)
        except ValueError:
            raise ConfigError(f"line {number}: not a decimal timestamp: {text!r}", field='trace') from None
        if value < 0 or value != value:
            raise ConfigError(f"line {number}: timestamp must be >= 0: {text!r}", field='trace')
        if arrivals and value < arrivals[-1]:
            raise SchedulingError(f"line {number}: arrival {value} precedes {arrivals[-1]}")
        arrivals.append(value)
    return arrivals


def read_arrival_trace(path: str) -> List[float]:
    """
    Read an arrival-trace file

    Args:
        path: Trace file path

    Returns:
        Arrival times in seconds
    """
    trace_path = Path(path)
    if not trace_path.exists():
        raise ConfigError(f"Trace file not found: {path}", field='trace')
    with open(trace_path, 'r') as f:
        arrivals = parse_arrival_trace(f)
    logger.debug(f"Read {len(arrivals)} arrivals from {path}")
    return arrivals
