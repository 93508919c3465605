"""
ATM cell and AAL5 frame data model
"""
from typing import Any, Optional

CELL_PAYLOAD_BYTES = 48
CELL_HEADER_BYTES = 5
CELL_BYTES = CELL_PAYLOAD_BYTES + CELL_HEADER_BYTES

TCP_HEADER_BYTES = 20
IP_HEADER_BYTES = 20
LLC_HEADER_BYTES = 8
AAL5_TRAILER_BYTES = 8
ENCAPSULATION_BYTES = TCP_HEADER_BYTES + IP_HEADER_BYTES + LLC_HEADER_BYTES + AAL5_TRAILER_BYTES


class Aal5Frame:
    """One TCP/IP packet encapsulated with LLC/SNAP and an AAL5 trailer"""

    __slots__ = ('vc_id', 'frame_id', 'tcp_payload_len', 'total_encapsulated_len', 'cell_count', 'segment')

    def __init__(self, vc_id: int, frame_id: int, tcp_payload_len: int, segment: Optional[Any] = None):
        """
        Initialize an Aal5Frame

        Args:
            vc_id: Virtual circuit carrying the frame
            frame_id: Per-VC frame sequence number
            tcp_payload_len: TCP payload bytes (0 for a pure ACK)
            segment: TCP segment metadata carried by the frame (no payload bytes)
        """
        if tcp_payload_len < 0:
            raise ValueError("tcp_payload_len must be >= 0")
        self.vc_id = vc_id
        self.frame_id = frame_id
        self.tcp_payload_len = tcp_payload_len
        self.total_encapsulated_len = tcp_payload_len + ENCAPSULATION_BYTES
        self.cell_count = -(-self.total_encapsulated_len // CELL_PAYLOAD_BYTES)
        self.segment = segment

    @property
    def wire_bytes(self) -> int:
        """Bytes on the ATM layer, headers and padding included"""
        return CELL_BYTES * self.cell_count

    def __repr__(self) -> str:
        return (f"Aal5Frame(vc={self.vc_id}, frame={self.frame_id}, payload={self.tcp_payload_len}, "
                f"cells={self.cell_count})")


class Cell:
    """One 53-byte ATM cell; payload contents are not materialized"""

    # Travel direction through the two earth stations
    DIRECTION_FORWARD = 'fwd'
    DIRECTION_REVERSE = 'rev'

    payload_bytes = CELL_PAYLOAD_BYTES
    header_bytes = CELL_HEADER_BYTES

    __slots__ = ('vc_id', 'frame_id', 'index', 'eom', 'direction', 'frame')

    def __init__(self, frame: Aal5Frame, index: int, direction: str = DIRECTION_FORWARD):
        """
        Initialize a Cell

        Args:
            frame: Parent AAL5 frame
            index: Position of the cell within the frame (0-based)
            direction: DIRECTION_FORWARD for data, DIRECTION_REVERSE for ACKs
        """
        self.vc_id = frame.vc_id
        self.frame_id = frame.frame_id
        self.index = index
        self.eom = index == frame.cell_count - 1
        self.direction = direction
        self.frame = frame

    @property
    def is_first(self) -> bool:
        """First cell of its frame"""
        return self.index == 0

    def __repr__(self) -> str:
        return f"Cell(vc={self.vc_id}, frame={self.frame_id}, idx={self.index}, eom={self.eom})"
