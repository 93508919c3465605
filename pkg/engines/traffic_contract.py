"""
Traffic contract engine - Burst Tolerance, GCRA conformance and the ingress
policer attached to source VCs
"""
import logging
from typing import Dict, List, Optional, Tuple

from core.errors import ContractError, SchedulingError
from core.simulator import to_ticks
from models.traffic import GcraState, TrafficDescriptor

logger = logging.getLogger(__name__)

CONFORMING = 'conforming'
NON_CONFORMING = 'non_conforming'


def burst_tolerance(descriptor: TrafficDescriptor) -> float:
    """
    Burst Tolerance BT = (MBS - 1)(1/SCR - 1/PCR)

    Args:
        descriptor: Descriptor carrying scr and mbs

    Returns:
        Burst tolerance in seconds (>= 0)

    Raises:
        ContractError: If scr or mbs is missing
    """
    if descriptor.scr is None or descriptor.mbs is None:
        raise ContractError(f"Contract incomplete: burst tolerance needs scr and mbs ({descriptor})")
    return (descriptor.mbs - 1) * (1.0 / descriptor.scr - 1.0 / descriptor.pcr)


def burst_tolerance_ticks(descriptor: TrafficDescriptor) -> int:
    """
    Burst tolerance in ticks, derived from the rounded increments

    Using the already-rounded bucket increments keeps the MBS boundary exact:
    MBS back-to-back cells at PCR conform and cell MBS+1 does not.
    """
    if descriptor.scr is None or descriptor.mbs is None:
        raise ContractError(f"Contract incomplete: burst tolerance needs scr and mbs ({descriptor})")
    return (descriptor.mbs - 1) * (to_ticks(1.0 / descriptor.scr) - to_ticks(1.0 / descriptor.pcr))


def make_pcr_bucket(descriptor: TrafficDescriptor) -> GcraState:
    """GCRA(1/PCR, CDVT)"""
    return GcraState(to_ticks(1.0 / descriptor.pcr), to_ticks(descriptor.cdvt))


def make_dual_buckets(descriptor: TrafficDescriptor) -> Tuple[GcraState, GcraState]:
    """
    Build GCRA(1/PCR, CDVT) and GCRA(1/SCR, BT + CDVT) from one descriptor

    Args:
        descriptor: Descriptor carrying scr and mbs

    Returns:
        Tuple of (pcr_state, scr_state)
    """
    pcr_state = make_pcr_bucket(descriptor)
    scr_limit = burst_tolerance_ticks(descriptor) + to_ticks(descriptor.cdvt)
    scr_state = GcraState(to_ticks(1.0 / descriptor.scr), scr_limit)
    return pcr_state, scr_state


def _check_order(state: GcraState, arrival: int):
    if state.last_arrival is not None and arrival < state.last_arrival:
        raise SchedulingError(f"GCRA arrival {arrival} precedes previous arrival {state.last_arrival}")


def gcra_check(state: GcraState, arrival: int) -> Tuple[str, GcraState]:
    """
    Single-bucket conformance test

    Args:
        state: Bucket state (updated in place)
        arrival: Arrival tick, non-decreasing across calls

    Returns:
        Tuple of (verdict, state)

    Raises:
        SchedulingError: If arrival is earlier than the previous one
    """
    _check_order(state, arrival)
    state.last_arrival = arrival
    if state.conforms(arrival):
        state.commit(arrival)
        return CONFORMING, state
    return NON_CONFORMING, state


def dual_bucket_check(pcr_state: GcraState, scr_state: GcraState, arrival: int) -> str:
    """
    Coupled PCR/SCR conformance test

    A cell conforms only if it conforms to both buckets; neither bucket is
    updated for a non-conforming cell.

    Args:
        pcr_state: GCRA(1/PCR, CDVT) state
        scr_state: GCRA(1/SCR, BT + CDVT) state
        arrival: Arrival tick

    Returns:
        CONFORMING or NON_CONFORMING
    """
    _check_order(pcr_state, arrival)
    _check_order(scr_state, arrival)
    pcr_state.last_arrival = arrival
    scr_state.last_arrival = arrival

    if pcr_state.conforms(arrival) and scr_state.conforms(arrival):
        pcr_state.commit(arrival)
        scr_state.commit(arrival)
        return CONFORMING
    return NON_CONFORMING


def check_trace(descriptor: TrafficDescriptor, arrivals: List[int]) -> List[str]:
    """
    Verdict for every cell of an arrival sequence against a fresh contract

    Uses the coupled dual bucket when the descriptor has scr and mbs, the
    PCR bucket alone otherwise.

    Args:
        descriptor: Contract to test against
        arrivals: Arrival ticks, non-decreasing

    Returns:
        CONFORMING / NON_CONFORMING per arrival
    """
    if descriptor.scr is not None and descriptor.mbs is not None:
        pcr_state, scr_state = make_dual_buckets(descriptor)
        return [dual_bucket_check(pcr_state, scr_state, arrival) for arrival in arrivals]
    state = make_pcr_bucket(descriptor)
    return [gcra_check(state, arrival)[0] for arrival in arrivals]


class Policer:
    """Per-VC ingress policer; observe-only unless enforcing"""

    def __init__(self, descriptor: TrafficDescriptor, enforce: bool = False):
        """
        Initialize Policer

        Args:
            descriptor: Contract of the policed VC
            enforce: Drop non-conforming cells instead of only counting them
        """
        self.descriptor = descriptor
        self.enforce = enforce
        self._pcr_state = make_pcr_bucket(descriptor)
        self._scr_state: Optional[GcraState] = None
        if descriptor.scr is not None and descriptor.mbs is not None:
            self._pcr_state, self._scr_state = make_dual_buckets(descriptor)
        self.cells_checked = 0
        self.cells_non_conforming = 0

    def admit(self, arrival: int) -> bool:
        """
        Police one cell

        Args:
            arrival: Tick at which the cell enters the network

        Returns:
            True if the cell may proceed
        """
        self.cells_checked += 1
        if self._scr_state is not None:
            verdict = dual_bucket_check(self._pcr_state, self._scr_state, arrival)
        else:
            verdict, _ = gcra_check(self._pcr_state, arrival)

        if verdict == NON_CONFORMING:
            self.cells_non_conforming += 1
            return not self.enforce
        return True

    def get_stats(self) -> Dict[str, int]:
        """Counters for the run result"""
        return {
            'cells_checked': self.cells_checked,
            'cells_non_conforming': self.cells_non_conforming
        }
