"""
Contract service

Conformance of a recorded arrival trace against a traffic descriptor.
"""
import logging
from typing import List, Tuple

import pandas as pd

from core.errors import ConfigError
from core.simulator import to_ticks
from engines.traffic_contract import NON_CONFORMING, burst_tolerance, check_trace
from models.traffic import TrafficDescriptor

logger = logging.getLogger(__name__)


def check_arrivals(descriptor: TrafficDescriptor, arrivals: List[float]) -> Tuple[pd.DataFrame, dict]:
    """
    Classify every arrival of a trace

    Args:
        descriptor: Contract (pcr required; scr and mbs enable the SCR bucket)
        arrivals: Arrival times in seconds, non-decreasing

    Returns:
        Tuple of (frame with columns cell, arrival_s, verdict; summary counters)
    """
    if descriptor is None:
        raise ConfigError("contract-check needs a pcr", field='contract.pcr')
    verdicts = check_trace(descriptor, [to_ticks(a) for a in arrivals])
    frame = pd.DataFrame({
        'cell': range(len(arrivals)),
        'arrival_s': arrivals,
        'verdict': verdicts,
    })
    non_conforming = sum(1 for v in verdicts if v == NON_CONFORMING)
    summary = {
        'cells': len(verdicts),
        'non_conforming': non_conforming,
        'burst_tolerance_s': burst_tolerance(descriptor)
        if descriptor.scr is not None and descriptor.mbs is not None else 0.0,
    }
    logger.debug(f"{non_conforming} of {len(verdicts)} cells non-conforming to {descriptor}")
    return frame, summary
