"""
Discrete-event simulator - integer nanosecond clock, time-ordered event queue
and the run loop every network element schedules against.
"""
import hashlib
import heapq
import logging
from decimal import Decimal, ROUND_HALF_UP
from typing import Any, Callable, Dict, List, Optional, Tuple

from core.errors import SchedulingError

logger = logging.getLogger(__name__)

# SimTime is a plain int: nanoseconds since simulation start
TICKS_PER_SECOND = 10 ** 9

CELL_BITS = 424


def to_ticks(seconds: float) -> int:
    """
    Convert seconds to whole nanoseconds, rounding half up

    The float is converted through its shortest repr so that 0.275 becomes
    exactly 275000000 on every platform.

    Args:
        seconds: Duration or instant in seconds (non-negative)

    Returns:
        Integer tick count
    """
    scaled = Decimal(repr(float(seconds))) * TICKS_PER_SECOND
    return int(scaled.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def to_seconds(ticks: int) -> float:
    """Convert ticks back to seconds"""
    return ticks / TICKS_PER_SECOND


def cell_ticks(cells: int, rate_bps: int) -> int:
    """
    Serialization time of a run of back-to-back cells, rounded half up

    Computed for the whole run rather than summing per-cell rounded values,
    so a busy port never drifts away from its nominal rate.

    Args:
        cells: Number of 53-byte cells
        rate_bps: Cell-layer link rate in bits per second (integer)

    Returns:
        Ticks needed to transmit the cells
    """
    numerator = cells * CELL_BITS * TICKS_PER_SECOND
    return (2 * numerator + rate_bps) // (2 * rate_bps)


class SimEvent:
    """One scheduled occurrence delivered to a registered component"""

    __slots__ = ('fire_at', 'seq', 'target', 'kind', 'payload')

    def __init__(self, fire_at: int, target: str, kind: str, payload: Any = None, seq: int = -1):
        """
        Initialize a SimEvent

        Args:
            fire_at: Tick at which the event fires
            target: Registered name of the component to notify
            kind: Event kind understood by the target ('cell', 'tx_done', 'rto', ...)
            payload: Opaque event body
            seq: Tie-break counter, assigned by the queue on insertion
        """
        self.fire_at = fire_at
        self.seq = seq
        self.target = target
        self.kind = kind
        self.payload = payload

    def __repr__(self) -> str:
        return f"SimEvent(fire_at={self.fire_at}, seq={self.seq}, target={self.target}, kind={self.kind})"


class EventQueue:
    """Binary heap ordered by (fire_at, seq)"""

    def __init__(self):
        self._heap: List[Tuple[int, int, SimEvent]] = []
        self._next_seq = 0

    def push(self, event: SimEvent) -> SimEvent:
        """Insert an event, assigning its sequence number"""
        event.seq = self._next_seq
        self._next_seq += 1
        heapq.heappush(self._heap, (event.fire_at, event.seq, event))
        return event

    def pop(self) -> SimEvent:
        """Remove and return the earliest event"""
        return heapq.heappop(self._heap)[2]

    def peek_time(self) -> Optional[int]:
        """Fire time of the earliest event, or None when empty"""
        return self._heap[0][0] if self._heap else None

    def __len__(self) -> int:
        return len(self._heap)


class Simulator:
    """Single-threaded run loop over an EventQueue"""

    DEFAULT_AUDIT_INTERVAL = 10_000

    def __init__(self, record_trace: bool = False, audit_interval: int = 0):
        """
        Initialize the simulator

        Args:
            record_trace: Hash every processed event into trace_digest
            audit_interval: Run audit callbacks every N events (0 disables)
        """
        self.now = 0
        self.events_processed = 0
        self._queue = EventQueue()
        self._components: Dict[str, Any] = {}
        self._audits: List[Callable[[], None]] = []
        self.audit_interval = audit_interval
        self._trace = hashlib.blake2b(digest_size=16) if record_trace else None

    def register(self, name: str, component: Any):
        """
        Register a component as an event target

        Args:
            name: Unique target name
            component: Object exposing on_event(event)
        """
        if name in self._components:
            raise ValueError(f"Component '{name}' already registered")
        self._components[name] = component

    def add_audit(self, callback: Callable[[], None]):
        """Register a consistency check run every audit_interval events"""
        self._audits.append(callback)

    def schedule(self, event: SimEvent) -> SimEvent:
        """
        Queue an event

        Args:
            event: Event whose fire_at is not earlier than the clock

        Returns:
            The same event with its seq assigned

        Raises:
            SchedulingError: If the event lies in the past
        """
        if event.fire_at < self.now:
            raise SchedulingError(
                f"Event for '{event.target}' scheduled at {event.fire_at} but clock is {self.now}"
            )
        return self._queue.push(event)

    def schedule_at(self, fire_at: int, target: str, kind: str, payload: Any = None) -> SimEvent:
        """Build and queue an event at an absolute tick"""
        return self.schedule(SimEvent(fire_at, target, kind, payload))

    def schedule_in(self, delay: int, target: str, kind: str, payload: Any = None) -> SimEvent:
        """Build and queue an event delay ticks from now"""
        return self.schedule(SimEvent(self.now + delay, target, kind, payload))

    def run_until(self, end: int) -> int:
        """
        Process every event with fire_at <= end in (fire_at, seq) order

        Args:
            end: Last tick to simulate (inclusive)

        Returns:
            Number of events processed by this call
        """
        queue = self._queue
        components = self._components
        trace = self._trace
        audit_every = self.audit_interval if self._audits else 0
        processed = 0

        while len(queue):
            next_time = queue.peek_time()
            if next_time > end:
                break
            event = queue.pop()
            self.now = event.fire_at
            if trace is not None:
                trace.update(f"{event.fire_at}|{event.seq}|{event.target}|{event.kind};".encode())
            components[event.target].on_event(event)
            processed += 1
            if audit_every and (self.events_processed + processed) % audit_every == 0:
                for audit in self._audits:
                    audit()

        if end > self.now:
            self.now = end
        self.events_processed += processed
        logger.debug(f"run_until({end}) processed {processed} events, clock={self.now}")
        return processed

    @property
    def pending(self) -> int:
        """Number of queued events"""
        return len(self._queue)

    @property
    def trace_digest(self) -> Optional[str]:
        """Hex digest over all processed events, when tracing is enabled"""
        return self._trace.hexdigest() if self._trace is not None else None
