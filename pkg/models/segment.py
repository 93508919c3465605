"""
TCP segment data model
"""
from typing import Tuple

SackBlock = Tuple[int, int]


class Segment:
    """TCP segment header fields; payload bytes are not materialized"""

    MAX_SACK_BLOCKS = 3

    __slots__ = ('seq', 'length', 'ack', 'sack_blocks', 'is_retransmission')

    def __init__(
        self,
        seq: int = 0,
        length: int = 0,
        ack: int = 0,
        sack_blocks: Tuple[SackBlock, ...] = (),
        is_retransmission: bool = False
    ):
        """
        Initialize a Segment

        Args:
            seq: First byte sequence number
            length: Payload bytes (0 for a pure ACK)
            ack: Cumulative acknowledgment number
            sack_blocks: Up to three [start, end) ranges above ack
            is_retransmission: Segment carries previously sent data
        """
        if length < 0:
            raise ValueError("Segment length must be >= 0")
        if len(sack_blocks) > self.MAX_SACK_BLOCKS:
            raise ValueError(f"At most {self.MAX_SACK_BLOCKS} SACK blocks allowed")
        self.seq = seq
        self.length = length
        self.ack = ack
        self.sack_blocks = tuple(sack_blocks)
        self.is_retransmission = is_retransmission

    @property
    def end(self) -> int:
        """Sequence number following the last payload byte"""
        return self.seq + self.length

    @property
    def is_pure_ack(self) -> bool:
        return self.length == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Segment):
            return NotImplemented
        return (self.seq, self.length, self.ack, self.sack_blocks, self.is_retransmission) == \
            (other.seq, other.length, other.ack, other.sack_blocks, other.is_retransmission)

    def __repr__(self) -> str:
        if self.is_pure_ack:
            return f"Segment(ACK {self.ack}, sack={list(self.sack_blocks)})"
        flag = ', rtx' if self.is_retransmission else ''
        return f"Segment(seq={self.seq}, len={self.length}{flag})"
