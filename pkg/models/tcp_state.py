"""
TCP connection state - sender congestion/SACK state and receiver reassembly state
"""
from typing import Any, Dict, Iterable, List, Optional, Set, Tuple

from core.errors import ConfigError

DEFAULT_MSS = 9180


def merge_ranges(starts: Iterable[int], length: int) -> List[Tuple[int, int]]:
    """
    Collapse fixed-length segments into sorted disjoint ranges

    Args:
        starts: Segment start sequence numbers
        length: Segment length in bytes

    Returns:
        Sorted list of [start, end) ranges
    """
    ranges: List[Tuple[int, int]] = []
    for start in sorted(starts):
        if ranges and ranges[-1][1] == start:
            ranges[-1] = (ranges[-1][0], start + length)
        else:
            ranges.append((start, start + length))
    return ranges


class TcpConnState:
    """
    Sender-side state of one greedy SACK TCP connection

    Sequence numbers are unbounded ints. Every data segment is exactly one
    MSS and starts at a multiple of MSS, so the scoreboard is kept as sets of
    segment start numbers.
    """

    def __init__(
        self,
        rcv_wnd: int,
        mss: int = DEFAULT_MSS,
        initial_rto: float = 3.0,
        min_rto: float = 0.2,
        max_rto: float = 64.0,
        granularity: float = 0.1,
        initial_ssthresh: Optional[int] = None
    ):
        """
        Initialize TcpConnState

        Args:
            rcv_wnd: Receiver window in bytes
            mss: Maximum segment size in bytes
            initial_rto: Retransmission timeout before the first RTT sample (seconds)
            min_rto: Lower RTO clamp (seconds)
            max_rto: Upper RTO clamp, also the backoff cap (seconds)
            granularity: Timer tick; RTO values are rounded up to it (seconds)
            initial_ssthresh: Starting ssthresh in bytes (defaults to rcv_wnd)
        """
        errors = []
        if mss <= 0:
            errors.append("mss must be > 0")
        if rcv_wnd < mss:
            errors.append("rcv_wnd must be at least one mss")
        if not 0 < min_rto <= max_rto:
            errors.append("rto bounds must satisfy 0 < min_rto <= max_rto")
        if granularity <= 0:
            errors.append("timer granularity must be > 0")
        if errors:
            raise ConfigError(f"TCP parameter validation failed: {'; '.join(errors)}", field='tcp')

        self.mss = mss
        self.rcv_wnd = rcv_wnd
        self.cwnd = mss
        self.ssthresh = initial_ssthresh if initial_ssthresh is not None else rcv_wnd
        self.snd_una = 0
        self.snd_nxt = 0

        self.rtt_srtt: Optional[float] = None
        self.rtt_var: Optional[float] = None
        self.rto = initial_rto
        self.min_rto = min_rto
        self.max_rto = max_rto
        self.granularity = granularity

        # Scoreboard: starts of segments known SACKed / deemed lost / retransmitted
        self.sacked: Set[int] = set()
        self.lost: Set[int] = set()
        self.retransmitted: Set[int] = set()
        # First-transmission send ticks for RTT sampling (Karn's rule)
        self.send_times: Dict[int, int] = {}

        self.dupacks = 0
        self.in_recovery = False
        self.recover = 0
        self.timer: Optional[int] = None

        # Counters
        self.bytes_sent_new = 0
        self.segments_sent = 0
        self.segments_retransmitted = 0
        self.fast_retransmits = 0
        self.timeouts = 0

    @property
    def flight_size(self) -> int:
        """Outstanding bytes, snd_nxt - snd_una"""
        return self.snd_nxt - self.snd_una

    @property
    def pipe(self) -> int:
        """
        Bytes estimated in the network

        Outstanding bytes less SACKed bytes less bytes deemed lost and not yet
        retransmitted. Outside recovery this equals snd_nxt - snd_una - sacked.
        """
        return self.snd_nxt - self.snd_una - (len(self.sacked) + len(self.lost)) * self.mss

    @property
    def sack_scoreboard(self) -> List[Tuple[int, int]]:
        """Known-SACKed ranges, sorted and disjoint"""
        return merge_ranges(self.sacked, self.mss)

    @property
    def retransmit_queue(self) -> List[Tuple[int, int]]:
        """Ranges awaiting retransmission, lowest first"""
        return [(start, start + self.mss) for start in sorted(self.lost)]

    def to_dict(self) -> Dict[str, Any]:
        """Snapshot for logging and tests"""
        return {
            'mss': self.mss,
            'cwnd': self.cwnd,
            'ssthresh': self.ssthresh,
            'rcv_wnd': self.rcv_wnd,
            'snd_una': self.snd_una,
            'snd_nxt': self.snd_nxt,
            'rtt_srtt': self.rtt_srtt,
            'rtt_var': self.rtt_var,
            'rto': self.rto,
            'sack_scoreboard': self.sack_scoreboard,
            'retransmit_queue': self.retransmit_queue,
            'timer': self.timer,
            'in_recovery': self.in_recovery
        }

    def __repr__(self) -> str:
        return (f"TcpConnState(cwnd={self.cwnd}, ssthresh={self.ssthresh}, una={self.snd_una}, "
                f"nxt={self.snd_nxt}, pipe={self.pipe})")


class ReceiverState:
    """Receiver-side state: cumulative point and out-of-order ranges"""

    RECENT_LIMIT = 16

    def __init__(self):
        self.rcv_nxt = 0
        # Sorted disjoint [start, end) ranges above rcv_nxt
        self.scoreboard: List[List[int]] = []
        # Start numbers of recently received out-of-order segments, newest first
        self.recent: List[int] = []
        self.bytes_delivered = 0
        self.segments_received = 0
        self.duplicates = 0

    def __repr__(self) -> str:
        return f"ReceiverState(rcv_nxt={self.rcv_nxt}, ooo={self.scoreboard})"
