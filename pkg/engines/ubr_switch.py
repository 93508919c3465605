"""
UBR switch output buffer - FIFO cell queue with per-VC accounting and the
Selective Drop frame discard policy
"""
import logging
from collections import deque
from typing import Any, Deque, Dict, Optional, Tuple

from core.errors import AccountingError, ConfigError
from models.cell import Cell

logger = logging.getLogger(__name__)

POLICY_SELECTIVE_DROP = 'selective_drop'
POLICY_TAIL_DROP = 'tail_drop'
VALID_POLICIES = [POLICY_SELECTIVE_DROP, POLICY_TAIL_DROP]

QUEUED = 'queued'
DROPPED = 'dropped'

CAUSE_SELECTIVE = 'selective'
CAUSE_OVERFLOW = 'overflow'


def selective_drop_predicate(x: int, y_i: int, n_a: int, capacity_k: int,
                             threshold_r: float, threshold_z: float) -> bool:
    """
    (X > R*K) AND (Y_i * N_a / X > Z)

    Args:
        x: Total buffer occupancy in cells
        y_i: Occupancy of the deciding VC
        n_a: Number of VCs with at least one buffered cell
        capacity_k: Buffer capacity in cells
        threshold_r: Occupancy threshold as a fraction of K
        threshold_z: Fair-share scaling threshold

    Returns:
        True if the VC's next frame must be dropped
    """
    return x > threshold_r * capacity_k and y_i * n_a / x > threshold_z


class SwitchBuffer:
    """Output-port buffer of capacity K cells"""

    def __init__(
        self,
        capacity_k: int,
        policy: str = POLICY_SELECTIVE_DROP,
        threshold_r: float = 0.9,
        threshold_z: float = 0.8,
        name: str = 'buffer'
    ):
        """
        Initialize SwitchBuffer

        Args:
            capacity_k: Capacity in cells (>= 1)
            policy: POLICY_SELECTIVE_DROP or POLICY_TAIL_DROP
            threshold_r: R, fraction of K above which Selective Drop engages
            threshold_z: Z in (0, 1], fair-share scaling threshold
            name: Label used in logs and statistics
        """
        errors = []
        if capacity_k < 1:
            errors.append("capacity must be >= 1 cell")
        if policy not in VALID_POLICIES:
            errors.append(f"Invalid policy '{policy}'. Must be one of: {', '.join(VALID_POLICIES)}")
        if not 0 <= threshold_r <= 1:
            errors.append("threshold_r must be in [0, 1]")
        if not 0 < threshold_z <= 1:
            errors.append("threshold_z must be in (0, 1]")
        if errors:
            raise ConfigError(f"Switch buffer validation failed: {'; '.join(errors)}", field='switch')

        self.name = name
        self.capacity_k = capacity_k
        self.policy = policy
        self.threshold_r = threshold_r
        self.threshold_z = threshold_z

        self._queue: Deque[Cell] = deque()
        self.occupancy_x = 0
        # Only VCs with Y_i > 0 are present, so N_a == len(per_vc_y)
        self.per_vc_y: Dict[int, int] = {}
        # vc_id -> (frame_id, cause) of the frame whose remaining cells are discarded
        self.discard_state: Dict[int, Tuple[int, str]] = {}
        self._damaged_frame: Dict[int, int] = {}

        self.cells_received: Dict[int, int] = {}
        self.cells_queued: Dict[int, int] = {}
        self.cells_dropped: Dict[int, int] = {}
        self.cells_dropped_selective = 0
        self.cells_dropped_overflow = 0
        self.frames_dropped_selective = 0
        self.frames_dropped_overflow = 0
        self.max_occupancy = 0
        self._occupancy_area = 0
        self._last_change = 0

    @property
    def active_n_a(self) -> int:
        """Number of VCs with at least one cell in the buffer"""
        return len(self.per_vc_y)

    def __len__(self) -> int:
        return len(self._queue)

    def drop_test(self, vc_id: int) -> bool:
        """
        Selective Drop decision for the first cell of a new frame

        Uses pre-arrival Y_i; does not modify the buffer.

        Args:
            vc_id: VC whose frame is arriving

        Returns:
            True to drop the frame, False to accept it
        """
        return selective_drop_predicate(
            self.occupancy_x,
            self.per_vc_y.get(vc_id, 0),
            self.active_n_a,
            self.capacity_k,
            self.threshold_r,
            self.threshold_z
        )

    def enqueue_cell(self, cell: Cell, now: Optional[int] = None) -> str:
        """
        Offer one cell to the buffer

        Args:
            cell: Arriving cell
            now: Current tick, for time-weighted occupancy

        Returns:
            QUEUED or DROPPED
        """
        vc_id = cell.vc_id
        self.cells_received[vc_id] = self.cells_received.get(vc_id, 0) + 1

        discarding = self.discard_state.get(vc_id)
        if discarding is not None:
            if discarding[0] == cell.frame_id:
                if cell.eom:
                    del self.discard_state[vc_id]
                return self._drop(cell, discarding[1])
            del self.discard_state[vc_id]

        if (cell.index == 0 and self.policy == POLICY_SELECTIVE_DROP and self.drop_test(vc_id)):
            self.frames_dropped_selective += 1
            if not cell.eom:
                self.discard_state[vc_id] = (cell.frame_id, CAUSE_SELECTIVE)
            return self._drop(cell, CAUSE_SELECTIVE)

        if self.occupancy_x >= self.capacity_k:
            if self._damaged_frame.get(vc_id) != cell.frame_id:
                self._damaged_frame[vc_id] = cell.frame_id
                self.frames_dropped_overflow += 1
            if self.policy == POLICY_SELECTIVE_DROP and not cell.eom:
                # partial packet discard: the rest of this frame is dead
                self.discard_state[vc_id] = (cell.frame_id, CAUSE_OVERFLOW)
            return self._drop(cell, CAUSE_OVERFLOW)

        if now is not None:
            self._account_time(now)
        self._queue.append(cell)
        self.occupancy_x += 1
        self.per_vc_y[vc_id] = self.per_vc_y.get(vc_id, 0) + 1
        self.cells_queued[vc_id] = self.cells_queued.get(vc_id, 0) + 1
        if self.occupancy_x > self.max_occupancy:
            self.max_occupancy = self.occupancy_x
        return QUEUED

    def dequeue_cell(self, now: Optional[int] = None) -> Optional[Cell]:
        """
        Remove the head cell (strict FIFO)

        Args:
            now: Current tick, for time-weighted occupancy

        Returns:
            The head cell, or None when the buffer is empty
        """
        if not self._queue:
            return None
        if now is not None:
            self._account_time(now)
        cell = self._queue.popleft()
        self.occupancy_x -= 1
        remaining = self.per_vc_y[cell.vc_id] - 1
        if remaining:
            self.per_vc_y[cell.vc_id] = remaining
        else:
            del self.per_vc_y[cell.vc_id]
        return cell

    def _drop(self, cell: Cell, cause: str) -> str:
        self.cells_dropped[cell.vc_id] = self.cells_dropped.get(cell.vc_id, 0) + 1
        if cause == CAUSE_SELECTIVE:
            self.cells_dropped_selective += 1
        else:
            self.cells_dropped_overflow += 1
        return DROPPED

    def _account_time(self, now: int):
        self._occupancy_area += self.occupancy_x * (now - self._last_change)
        self._last_change = now

    def mean_occupancy(self, now: int) -> float:
        """Time-weighted mean occupancy from tick 0 to now"""
        if now <= 0:
            return 0.0
        area = self._occupancy_area + self.occupancy_x * (now - self._last_change)
        return area / now

    def check_accounting(self):
        """
        Verify occupancy and per-VC counters

        Raises:
            AccountingError: On any inconsistency
        """
        total_y = sum(self.per_vc_y.values())
        if not (self.occupancy_x == total_y == len(self._queue)):
            raise AccountingError(
                f"{self.name}: X={self.occupancy_x}, sum(Y)={total_y}, queue={len(self._queue)}"
            )
        if self.occupancy_x > self.capacity_k:
            raise AccountingError(f"{self.name}: occupancy {self.occupancy_x} exceeds K={self.capacity_k}")
        if any(y <= 0 for y in self.per_vc_y.values()):
            raise AccountingError(f"{self.name}: non-positive per-VC occupancy in {self.per_vc_y}")
        for vc_id, received in self.cells_received.items():
            handled = self.cells_queued.get(vc_id, 0) + self.cells_dropped.get(vc_id, 0)
            if received != handled:
                raise AccountingError(
                    f"{self.name}: VC {vc_id} offered {received} cells but queued+dropped is {handled}"
                )

    def get_stats(self, now: int = 0) -> Dict[str, Any]:
        """Per-run statistics of this buffer"""
        return {
            'name': self.name,
            'capacity_k': self.capacity_k,
            'cells_received': sum(self.cells_received.values()),
            'cells_queued': sum(self.cells_queued.values()),
            'cells_dropped': sum(self.cells_dropped.values()),
            'cells_dropped_selective': self.cells_dropped_selective,
            'cells_dropped_overflow': self.cells_dropped_overflow,
            'frames_dropped_selective': self.frames_dropped_selective,
            'frames_dropped_overflow': self.frames_dropped_overflow,
            'max_occupancy': self.max_occupancy,
            'mean_occupancy': self.mean_occupancy(now),
            'per_vc_received': dict(sorted(self.cells_received.items())),
            'per_vc_queued': dict(sorted(self.cells_queued.items())),
            'per_vc_dropped': dict(sorted(self.cells_dropped.items()))
        }
