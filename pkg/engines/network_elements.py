"""
Network elements wired into the simulator: links, output ports, earth-station
switches and the TCP end systems on either side of the satellite hop
"""
import logging
from collections import deque
from typing import Callable, Deque, Dict, List, Optional, Tuple

from core.errors import AccountingError
from core.simulator import SimEvent, Simulator, cell_ticks
from engines.atm_adaptation import Reassembler, segment
from engines.tcp_endpoint import TcpReceiver, TcpSender
from engines.traffic_contract import Policer
from engines.ubr_switch import DROPPED, SwitchBuffer
from models.cell import Cell
from models.segment import Segment

logger = logging.getLogger(__name__)

# Event kinds
EVENT_CELL = 'cell'
EVENT_TX_DONE = 'tx_done'
EVENT_START = 'start'
EVENT_RTO = 'rto'
EVENT_WARMUP = 'warmup'


class Link:
    """Unidirectional point-to-point link: pure propagation delay, no queue"""

    __slots__ = ('sim', 'name', 'prop_ticks', 'egress', 'cells_carried')

    def __init__(self, sim: Simulator, name: str, prop_ticks: int, egress: str):
        """
        Initialize Link

        Args:
            sim: Simulator the link schedules on
            name: Label used in statistics
            prop_ticks: One-way propagation delay
            egress: Registered name of the element at the far end
        """
        self.sim = sim
        self.name = name
        self.prop_ticks = prop_ticks
        self.egress = egress
        self.cells_carried = 0

    def carry(self, cell: Cell) -> SimEvent:
        """Deliver a fully serialized cell to the far end after the propagation delay"""
        self.cells_carried += 1
        return self.sim.schedule_at(self.sim.now + self.prop_ticks, self.egress, EVENT_CELL, cell)

    @property
    def queue_length(self) -> int:
        """Cells waiting on the link itself; always 0, links never buffer"""
        return 0


class OutputPort:
    """
    Transmitter feeding one Link at a fixed cell rate

    Cells wait in a SwitchBuffer (switch ports) or an unbounded FIFO (host
    NICs). Within a busy period departures are timed from the start of the
    period so serialization never drifts from the nominal rate.
    """

    def __init__(
        self,
        sim: Simulator,
        name: str,
        rate_bps: int,
        link: Link,
        buffer: Optional[SwitchBuffer] = None,
        egress_filter: Optional[Callable[[Cell, int], bool]] = None
    ):
        """
        Initialize OutputPort

        Args:
            sim: Simulator the port schedules on
            name: Registered component name
            rate_bps: Cell-layer rate in bits per second
            link: Link the port transmits onto
            buffer: Finite switch buffer; None for an unbounded host queue
            egress_filter: Called with (cell, now) as each cell leaves; False drops it
        """
        self.sim = sim
        self.name = name
        self.rate_bps = rate_bps
        self.link = link
        self.buffer = buffer
        self.egress_filter = egress_filter
        self._fifo: Deque[Cell] = deque()
        self._in_service: Optional[Cell] = None
        self._busy_start = 0
        self._busy_cells = 0
        self.cells_sent = 0
        self.cells_filtered = 0
        sim.register(name, self)

    @property
    def busy(self) -> bool:
        return self._in_service is not None

    @property
    def queued(self) -> int:
        """Cells waiting, excluding the one being transmitted"""
        return len(self.buffer) if self.buffer is not None else len(self._fifo)

    def offer(self, cell: Cell) -> bool:
        """
        Hand a cell to the port

        Args:
            cell: Cell to transmit

        Returns:
            False if the buffer dropped the cell
        """
        if self.buffer is not None:
            if self.buffer.enqueue_cell(cell, self.sim.now) == DROPPED:
                return False
        else:
            self._fifo.append(cell)
        if self._in_service is None:
            self._busy_start = self.sim.now
            self._busy_cells = 0
            self._start_next()
        return True

    def _dequeue(self) -> Optional[Cell]:
        if self.buffer is not None:
            return self.buffer.dequeue_cell(self.sim.now)
        return self._fifo.popleft() if self._fifo else None

    def _start_next(self):
        cell = self._dequeue()
        self._in_service = cell
        if cell is not None:
            done_at = self._busy_start + cell_ticks(self._busy_cells + 1, self.rate_bps)
            self.sim.schedule_at(done_at, self.name, EVENT_TX_DONE)

    def on_event(self, event: SimEvent):
        cell = self._in_service
        self._busy_cells += 1
        if self.egress_filter is not None and not self.egress_filter(cell, self.sim.now):
            self.cells_filtered += 1
        else:
            self.cells_sent += 1
            self.link.carry(cell)
        self._start_next()

    def check_work_conserving(self):
        """
        Raises:
            AccountingError: If cells wait while the transmitter is idle
        """
        if self._in_service is None and self.queued:
            raise AccountingError(f"{self.name}: idle with {self.queued} cells queued")


class Switch:
    """Output-buffered earth-station switch; routes cells by (direction, vc_id)"""

    def __init__(self, sim: Simulator, name: str):
        self.sim = sim
        self.name = name
        self.routes: Dict[Tuple[str, int], OutputPort] = {}
        self.cells_switched = 0
        sim.register(name, self)

    def add_route(self, direction: str, vc_id: int, port: OutputPort):
        self.routes[(direction, vc_id)] = port

    def on_event(self, event: SimEvent):
        cell: Cell = event.payload
        self.cells_switched += 1
        self.routes[(cell.direction, cell.vc_id)].offer(cell)


class SourceHost:
    """End system running one greedy SACK TCP sender on its own VC"""

    def __init__(
        self,
        sim: Simulator,
        name: str,
        vc_id: int,
        sender: TcpSender,
        policer: Optional[Policer] = None
    ):
        """
        Initialize SourceHost

        Args:
            sim: Simulator the host schedules on
            name: Registered component name
            vc_id: VC carrying this connection
            sender: TCP sender state machine
            policer: Ingress policer applied as cells leave the NIC
        """
        self.sim = sim
        self.name = name
        self.vc_id = vc_id
        self.sender = sender
        self.policer = policer
        self.nic: Optional[OutputPort] = None
        self.reassembler = Reassembler(f"{name}-acks")
        self._next_frame = 0
        self._timer_event_at: Optional[int] = None
        self.cells_emitted = 0
        self.frames_emitted = 0
        sim.register(name, self)

    def attach(self, nic: OutputPort):
        """Connect the NIC port towards switch-1"""
        self.nic = nic

    def police(self, cell: Cell, now: int) -> bool:
        """Egress filter handed to the NIC port"""
        return self.policer.admit(now) if self.policer is not None else True

    def on_event(self, event: SimEvent):
        now = self.sim.now
        if event.kind == EVENT_CELL:
            frame = self.reassembler.receive(event.payload)
            if frame is not None:
                self._transmit(self.sender.on_ack(frame.segment, now))
        elif event.kind == EVENT_RTO:
            self._on_timer(now)
        elif event.kind == EVENT_START:
            logger.debug(f"{self.name}: starting at {now}")
            self._transmit(self.sender.maybe_send(now))
        self._sync_timer()

    def _transmit(self, segments: List[Segment]):
        for seg in segments:
            frame, cells = segment(seg.length, self.vc_id, self._next_frame, seg, Cell.DIRECTION_FORWARD)
            self._next_frame += 1
            self.frames_emitted += 1
            self.cells_emitted += frame.cell_count
            for cell in cells:
                self.nic.offer(cell)

    def _on_timer(self, now: int):
        if now != self._timer_event_at:
            return
        self._timer_event_at = None
        deadline = self.sender.state.timer
        if deadline is None or deadline > now:
            return
        self._transmit(self.sender.on_timeout(now))

    def _sync_timer(self):
        """Keep one timer event pending at or before the sender's deadline"""
        deadline = self.sender.state.timer
        if deadline is None:
            return
        # a pending event earlier than the deadline re-arms itself when it fires
        if self._timer_event_at is None or self._timer_event_at > deadline:
            self._timer_event_at = deadline
            self.sim.schedule_at(deadline, self.name, EVENT_RTO)


class SinkHost:
    """Destination end system: AAL5 reassembly, TCP receiver, ACK generation"""

    def __init__(self, sim: Simulator, name: str, vc_id: int, receiver: Optional[TcpReceiver] = None):
        self.sim = sim
        self.name = name
        self.vc_id = vc_id
        self.receiver = receiver or TcpReceiver(name=f"{name}-tcp")
        self.reassembler = Reassembler(f"{name}-data")
        self.nic: Optional[OutputPort] = None
        self._next_frame = 0
        self.warmup_bytes = 0
        self.cells_emitted = 0
        sim.register(name, self)

    def attach(self, nic: OutputPort):
        """Connect the NIC port towards switch-2"""
        self.nic = nic

    @property
    def bytes_delivered(self) -> int:
        """In-order bytes handed to the application"""
        return self.receiver.state.bytes_delivered

    @property
    def goodput_bytes(self) -> int:
        """Bytes delivered after the warm-up snapshot"""
        return self.bytes_delivered - self.warmup_bytes

    def on_event(self, event: SimEvent):
        if event.kind == EVENT_WARMUP:
            self.warmup_bytes = self.bytes_delivered
            return
        frame = self.reassembler.receive(event.payload)
        if frame is None:
            return
        ack = self.receiver.on_data(frame.segment, self.sim.now)
        ack_frame, cells = segment(0, self.vc_id, self._next_frame, ack, Cell.DIRECTION_REVERSE)
        self._next_frame += 1
        self.cells_emitted += ack_frame.cell_count
        for cell in cells:
            self.nic.offer(cell)
