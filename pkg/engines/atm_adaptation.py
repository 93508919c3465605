"""
AAL5 adaptation - LLC/SNAP + AAL5 encapsulation arithmetic, segmentation into
cells and per-VC reassembly with all-or-nothing frame semantics
"""
import logging
from typing import Any, Dict, Iterable, List, Optional, Tuple

from core.errors import ReassemblyError
from models.cell import CELL_BYTES, CELL_PAYLOAD_BYTES, ENCAPSULATION_BYTES, Aal5Frame, Cell

logger = logging.getLogger(__name__)


def cells_for_payload(tcp_payload_len: int) -> int:
    """Number of cells needed for a TCP payload of the given length"""
    return -(-(tcp_payload_len + ENCAPSULATION_BYTES) // CELL_PAYLOAD_BYTES)


def segment(
    tcp_payload_len: int,
    vc_id: int,
    frame_id: int = 0,
    tcp_segment: Optional[Any] = None,
    direction: str = Cell.DIRECTION_FORWARD
) -> Tuple[Aal5Frame, List[Cell]]:
    """
    Segment one TCP segment into an AAL5 frame and its ordered cells

    Args:
        tcp_payload_len: TCP payload bytes
        vc_id: Virtual circuit of the frame
        frame_id: Per-VC frame number
        tcp_segment: Segment metadata delivered on reassembly
        direction: Cell direction through the switches

    Returns:
        Tuple of (frame, cells); only the last cell has eom set
    """
    frame = Aal5Frame(vc_id, frame_id, tcp_payload_len, tcp_segment)
    cells = [Cell(frame, index, direction) for index in range(frame.cell_count)]
    return frame, cells


def efficiency_ceiling(mss: int) -> float:
    """
    Fraction of the cell-layer rate available to TCP payload

    Args:
        mss: TCP maximum segment size in bytes

    Returns:
        mss / (53 * ceil((mss + 56) / 48))
    """
    if mss <= 0:
        raise ValueError("mss must be > 0")
    return mss / (CELL_BYTES * cells_for_payload(mss))


class Reassembler:
    """
    Per-VC AAL5 reassembly

    A frame is delivered only when every cell from index 0 to the eom cell
    arrived. A partial frame is discarded as soon as a cell of a newer frame
    shows up, since VCs are FIFO.
    """

    def __init__(self, name: str = 'reassembler', keep_discard_log: bool = False):
        """
        Initialize Reassembler

        Args:
            name: Label used in log messages
            keep_discard_log: Remember (vc_id, frame_id) of every discarded frame
        """
        self.name = name
        # vc_id -> [frame_id, expected_index, damaged, cells_received]
        self._partial: Dict[int, list] = {}
        self._last_frame: Dict[int, int] = {}
        self.discard_log: Optional[List[Tuple[int, int]]] = [] if keep_discard_log else None
        self.frames_completed = 0
        self.frames_discarded = 0
        self.cells_received = 0
        self.cells_wasted = 0

    def receive(self, cell: Cell) -> Optional[Aal5Frame]:
        """
        Accept one cell

        Args:
            cell: Next cell on its VC, in arrival order

        Returns:
            The completed frame if this cell finished an intact frame

        Raises:
            ReassemblyError: If a cell of an older frame follows a newer one
        """
        self.cells_received += 1
        vc_id = cell.vc_id
        partial = self._partial.get(vc_id)

        if partial is None or partial[0] != cell.frame_id:
            newest = partial[0] if partial is not None else self._last_frame.get(vc_id, -1)
            if cell.frame_id <= newest:
                raise ReassemblyError(
                    f"{self.name}: VC {vc_id} frame {cell.frame_id} interleaved after frame {newest}"
                )
            if partial is not None:
                self._discard(vc_id, partial)
            partial = [cell.frame_id, 0, False, 0]
            self._partial[vc_id] = partial

        if cell.index != partial[1]:
            partial[2] = True
        partial[1] = cell.index + 1
        partial[3] += 1

        if not cell.eom:
            return None

        del self._partial[vc_id]
        if partial[2] or partial[3] != cell.frame.cell_count:
            self._discard(vc_id, partial)
            return None

        self._last_frame[vc_id] = cell.frame_id
        self.frames_completed += 1
        return cell.frame

    def flush(self) -> List[int]:
        """
        Discard every pending partial frame

        Returns:
            Frame ids discarded
        """
        discarded = []
        for vc_id, partial in sorted(self._partial.items()):
            discarded.append(partial[0])
            self._discard(vc_id, partial)
        self._partial.clear()
        return discarded

    def _discard(self, vc_id: int, partial: list):
        self._last_frame[vc_id] = partial[0]
        self.frames_discarded += 1
        self.cells_wasted += partial[3]
        if self.discard_log is not None:
            self.discard_log.append((vc_id, partial[0]))
        logger.debug(f"{self.name}: VC {vc_id} frame {partial[0]} discarded after {partial[3]} cells")

    def get_stats(self) -> Dict[str, int]:
        """Reassembly counters"""
        return {
            'frames_completed': self.frames_completed,
            'frames_discarded': self.frames_discarded,
            'cells_received': self.cells_received,
            'cells_wasted': self.cells_wasted
        }


def reassemble(cells: Iterable[Cell]) -> Tuple[List[Aal5Frame], List[int]]:
    """
    Reassemble a finite cell sequence of one VC

    Args:
        cells: Cells in arrival order

    Returns:
        Tuple of (completed frames, discarded frame ids); a frame still
        incomplete at the end of the sequence counts as discarded
    """
    reassembler = Reassembler(keep_discard_log=True)
    completed = []
    for cell in cells:
        frame = reassembler.receive(cell)
        if frame is not None:
            completed.append(frame)
    reassembler.flush()
    return completed, [frame_id for _, frame_id in reassembler.discard_log]
